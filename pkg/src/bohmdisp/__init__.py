"""Numerical checks of Bohm-potential corrections to wave dispersion relations.

The package samples closed-form wave solutions (plane waves, transversally
modulated traveling waves, quantum packets) on small spacetime lattices,
splits them into amplitude and phase, and verifies with finite differences
that the local wavevector satisfies ``k.k = V_B`` where ``V_B`` is the
sector's Bohm potential, rather than the classical ``k.k = 0`` (or the
classical Hamilton-Jacobi relation in the nonrelativistic sector).
"""

from .errors import BohmdispError
from .kernels import BACKEND as KERNEL_BACKEND

__version__ = "0.1.0"

__all__ = ["BohmdispError", "KERNEL_BACKEND", "__version__"]
