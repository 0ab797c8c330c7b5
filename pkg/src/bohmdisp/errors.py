"""Exception and warning types shared across the package.

Every error raised deliberately by this package derives from
:class:`BohmdispError`, so callers can catch the whole family with one
``except`` clause while still matching specific failure modes by name.
"""


class BohmdispError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(BohmdispError):
    """Coordinates fall outside the valid chart of a background metric."""


class AxisError(BohmdispError):
    """A lattice axis index is out of range or inconsistent with the field."""


class TooFewPoints(BohmdispError):
    """An axis has too few points to support the requested stencil."""


class EvalError(BohmdispError):
    """An analytic evaluator returned non-finite or mis-shaped samples."""


class EmptyMask(BohmdispError):
    """A validity mask kept no points, so masked statistics are undefined."""


class MemoryCap(BohmdispError):
    """A lattice (or a refinement of one) would exceed the point budget."""


class NyquistViolation(BohmdispError):
    """Phase advances too fast per lattice step for unambiguous unwrapping."""


class ZeroAtReference(BohmdispError):
    """The reference point for phase unwrapping has (near-)zero amplitude."""


class PhaseNotSeparable(BohmdispError):
    """Multi-component data does not share a single common phase factor."""


class NullPolarization(BohmdispError):
    """The polarization norm is too close to zero everywhere to divide by."""


class NullAmplitude(BohmdispError):
    """The tensor amplitude norm is too close to zero everywhere to divide by."""


class UnsupportedBackground(BohmdispError):
    """The requested sector is not implemented on this background metric."""


class BranchDomainError(BohmdispError):
    """Solution parameters are outside the validity range of this branch."""


class ZeroWavenumber(BohmdispError):
    """A wavenumber parameter that must be nonzero was zero."""


class LatticeMismatch(BohmdispError):
    """Two objects that must share a lattice were built on different ones."""


class CFLViolation(BohmdispError):
    """The time step violates the stability limit of the integrator."""


class FitIllConditioned(BohmdispError):
    """Too few samples (or degenerate samples) for the requested fit."""


class ConfigError(BohmdispError):
    """A run configuration failed schema validation."""


class BoundaryLeakWarning(UserWarning):
    """A packet evolved under Dirichlet conditions reached the boundary."""
