"""Uniform lattices, field containers, validity masks, and lattice operators.

A :class:`Lattice` is a uniform node-centered grid over up to four axes.
When ``has_time`` is true, axis 0 is coordinate time and the remaining axes
are the first spatial coordinates ``x, y, ...``; coordinates absent from the
lattice are held at zero, and derivatives along them vanish identically
(solutions are sampled on lattices aligned with their symmetry axes).
When ``has_time`` is false the axes are purely spatial, which is the layout
used by the time-stepping engines.

Fields store samples as plain arrays (float64 or complex128) plus an integer
``margin``: the number of boundary planes, per axis, whose values are not
trustworthy because some stencil already consumed neighbours there.  Every
derivative widens the margin; masks always exclude it.

Sign conventions follow :mod:`bohmdisp.geometry`: metric signature
``(-, +, +, +)``, so ``k.k < 0`` is timelike and ``k.k > 0`` spacelike.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import kernels
from .errors import (
    AxisError,
    EmptyMask,
    EvalError,
    LatticeMismatch,
    MemoryCap,
    TooFewPoints,
)
from .geometry import MetricSpec, inverse_metric_diag, volume_factor

__all__ = [
    "Lattice",
    "ScalarField",
    "CovectorField",
    "SymTensorField",
    "Mask",
    "SYM_PAIRS",
    "SYM_WEIGHTS",
    "sym_index",
    "expand_symtensor",
    "sample_scalar",
    "sample_covector",
    "sample_symtensor",
    "partial_derivative",
    "second_derivative",
    "box_flat",
    "laplacian",
    "curved_maxwell_operator",
    "covector_norm2",
    "symtensor_norm2",
    "interior_mask",
    "build_mask",
    "masked_max",
    "masked_mean",
]

DEFAULT_MAX_POINTS = 1 << 25

# Independent components of a symmetric rank-2 spacetime tensor, row-major
# upper triangle, and the multiplicity of each in a full contraction.
SYM_PAIRS = ((0, 0), (0, 1), (0, 2), (0, 3), (1, 1),
             (1, 2), (1, 3), (2, 2), (2, 3), (3, 3))
SYM_WEIGHTS = np.array([1.0, 2.0, 2.0, 2.0, 1.0, 2.0, 2.0, 1.0, 2.0, 1.0])

_SYM_INDEX = {}
for _i, (_m, _n) in enumerate(SYM_PAIRS):
    _SYM_INDEX[(_m, _n)] = _i
    _SYM_INDEX[(_n, _m)] = _i


def sym_index(mu, nu):
    """Position of component ``(mu, nu)`` in the packed symmetric layout."""
    return _SYM_INDEX[(mu, nu)]


@dataclass(frozen=True)
class Lattice:
    """A uniform node-centered grid on up to four axes.

    ``origin[i] + spacing[i] * j`` is the coordinate of node ``j`` on axis
    ``i``; the last node sits at ``origin + spacing * (counts - 1)``, so the
    stated extent is inclusive of both endpoints.
    """

    origin: tuple[float, ...]
    spacing: tuple[float, ...]
    counts: tuple[int, ...]
    has_time: bool = True
    max_points: int = DEFAULT_MAX_POINTS

    def __post_init__(self):
        origin = tuple(float(v) for v in self.origin)
        spacing = tuple(float(v) for v in self.spacing)
        counts = tuple(int(v) for v in self.counts)
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "spacing", spacing)
        object.__setattr__(self, "counts", counts)
        nd = len(counts)
        if not (len(origin) == len(spacing) == nd):
            raise ValueError("origin, spacing, and counts must have equal length")
        if not 1 <= nd <= 4:
            raise ValueError(f"lattice rank must be 1..4, got {nd}")
        if self.has_time and nd < 2:
            raise ValueError("a lattice with a time axis needs at least one "
                             "spatial axis as well")
        if any(n < 5 for n in counts):
            raise TooFewPoints(f"every axis needs at least 5 points, got {counts}")
        if any(not (h > 0.0 and math.isfinite(h)) for h in spacing):
            raise ValueError(f"spacings must be positive and finite, got {spacing}")
        if not all(math.isfinite(v) for v in origin):
            raise ValueError(f"origin must be finite, got {origin}")
        if self.n_points > self.max_points:
            raise MemoryCap(
                f"lattice with {self.n_points} points exceeds the cap of "
                f"{self.max_points}; coarsen it or raise max_points")

    @classmethod
    def from_extent(cls, origin, extent, counts, has_time=True,
                    max_points=DEFAULT_MAX_POINTS):
        """Build a lattice from inclusive per-axis extents instead of spacings."""
        counts = tuple(int(n) for n in counts)
        if any(n < 2 for n in counts):
            raise TooFewPoints(f"counts must allow a nonzero extent, got {counts}")
        spacing = tuple(float(L) / (n - 1) for L, n in zip(extent, counts))
        return cls(origin=tuple(origin), spacing=spacing, counts=counts,
                   has_time=has_time, max_points=max_points)

    @property
    def ndim(self):
        return len(self.counts)

    @property
    def shape(self):
        return self.counts

    @property
    def n_points(self):
        return math.prod(self.counts)

    @property
    def axis_names(self):
        names = ("t", "x", "y", "z") if self.has_time else ("x", "y", "z")
        return names[: self.ndim]

    def spacetime_axis(self, mu):
        """Lattice axis carrying spacetime coordinate ``mu``, or None."""
        if not 0 <= mu <= 3:
            raise AxisError(f"spacetime index must be 0..3, got {mu}")
        ax = mu if self.has_time else mu - 1
        if 0 <= ax < self.ndim:
            return ax
        return None

    def coordinate(self, axis):
        """1-d array of node coordinates along one lattice axis."""
        if not 0 <= axis < self.ndim:
            raise AxisError(f"axis {axis} out of range for rank-{self.ndim} lattice")
        return self.origin[axis] + self.spacing[axis] * np.arange(self.counts[axis])

    def grids(self):
        """Sparse broadcastable coordinate arrays, one per lattice axis."""
        return tuple(np.meshgrid(*(self.coordinate(ax) for ax in range(self.ndim)),
                                 indexing="ij", sparse=True))

    def spacetime_coords(self):
        """Broadcastable ``(t, x, y, z)``; coordinates off the lattice are 0.0."""
        out = [0.0, 0.0, 0.0, 0.0]
        grids = self.grids()
        for ax in range(self.ndim):
            mu = ax if self.has_time else ax + 1
            out[mu] = grids[ax]
        return tuple(out)

    def refined(self):
        """Halve every spacing, keeping all current nodes (counts go 2n - 1)."""
        counts = tuple(2 * n - 1 for n in self.counts)
        spacing = tuple(h / 2.0 for h in self.spacing)
        if math.prod(counts) > self.max_points:
            raise MemoryCap(
                f"refining to {counts} ({math.prod(counts)} points) exceeds the "
                f"cap of {self.max_points}")
        return replace(self, spacing=spacing, counts=counts)

    def describe(self):
        """Plain-data summary used in reports."""
        return {
            "origin": list(self.origin),
            "spacing": list(self.spacing),
            "counts": list(self.counts),
            "axes": list(self.axis_names),
        }


def _coerce_values(values, expected_shape, what):
    values = np.asarray(values)
    if np.issubdtype(values.dtype, np.complexfloating):
        values = np.ascontiguousarray(values, dtype=np.complex128)
    else:
        values = np.ascontiguousarray(values, dtype=np.float64)
    if values.shape != expected_shape:
        raise LatticeMismatch(
            f"{what} values have shape {values.shape}, lattice expects {expected_shape}")
    if not np.all(np.isfinite(values)):
        raise EvalError(f"{what} values contain non-finite entries")
    return values


@dataclass(frozen=True)
class ScalarField:
    """Scalar samples on a lattice (shape == ``lattice.shape``)."""

    lattice: Lattice
    values: np.ndarray
    margin: int = 0

    n_component_dims = 0

    def __post_init__(self):
        object.__setattr__(
            self, "values",
            _coerce_values(self.values, self._expected_shape(), type(self).__name__))
        if self.margin < 0:
            raise ValueError("margin cannot be negative")

    def _expected_shape(self):
        return self.lattice.shape

    @property
    def is_complex(self):
        return np.issubdtype(self.values.dtype, np.complexfloating)

    def with_values(self, values, margin=None):
        """Same lattice, new samples (margin defaults to the current one)."""
        return type(self)(self.lattice, values,
                          self.margin if margin is None else margin)


@dataclass(frozen=True)
class CovectorField(ScalarField):
    """Covector samples; trailing axis of length 4 holds ``(t, x, y, z)``."""

    n_component_dims = 1

    def _expected_shape(self):
        return self.lattice.shape + (4,)

    def component(self, mu):
        return self.values[..., mu]


@dataclass(frozen=True)
class SymTensorField(ScalarField):
    """Symmetric rank-2 samples; trailing axis of length 10 packs the upper
    triangle in :data:`SYM_PAIRS` order."""

    n_component_dims = 1

    def _expected_shape(self):
        return self.lattice.shape + (10,)

    def component(self, mu, nu):
        return self.values[..., sym_index(mu, nu)]


def expand_symtensor(values):
    """Packed ``(..., 10)`` symmetric components to a full ``(..., 4, 4)``."""
    out = np.zeros(values.shape[:-1] + (4, 4), dtype=values.dtype)
    for idx, (mu, nu) in enumerate(SYM_PAIRS):
        out[..., mu, nu] = values[..., idx]
        if mu != nu:
            out[..., nu, mu] = values[..., idx]
    return out


def _sample(lattice, evaluator, n_components, what):
    t, x, y, z = lattice.spacetime_coords()
    try:
        raw = evaluator(t, x, y, z)
    except (FloatingPointError, ZeroDivisionError, OverflowError) as exc:
        raise EvalError(f"{what} evaluator failed: {exc}") from exc
    if n_components == 0:
        parts = (raw,)
    else:
        parts = tuple(raw)
        if len(parts) != n_components:
            raise EvalError(
                f"{what} evaluator must return {n_components} components, "
                f"got {len(parts)}")
    cast = []
    for part in parts:
        part = np.asarray(part)
        try:
            part = np.broadcast_to(part, lattice.shape)
        except ValueError as exc:
            raise EvalError(
                f"{what} evaluator output of shape {part.shape} does not "
                f"broadcast to lattice shape {lattice.shape}") from exc
        cast.append(part)
    if n_components == 0:
        return np.array(cast[0])
    return np.stack(cast, axis=-1)


def sample_scalar(lattice, evaluator):
    """Sample ``evaluator(t, x, y, z)`` into a :class:`ScalarField`."""
    return ScalarField(lattice, _sample(lattice, evaluator, 0, "scalar"))


def sample_covector(lattice, evaluator):
    """Sample an evaluator returning 4 components into a :class:`CovectorField`."""
    return CovectorField(lattice, _sample(lattice, evaluator, 4, "covector"))


def sample_symtensor(lattice, evaluator):
    """Sample an evaluator returning 10 packed components into a
    :class:`SymTensorField`."""
    return SymTensorField(lattice, _sample(lattice, evaluator, 10, "symmetric tensor"))


def _check_axis(field, axis):
    if not 0 <= axis < field.lattice.ndim:
        raise AxisError(
            f"axis {axis} out of range for rank-{field.lattice.ndim} lattice")


def partial_derivative(field, axis, order=2):
    """First derivative along a lattice axis; widens the margin by order/2."""
    _check_axis(field, axis)
    out = kernels.diff1(field.values, axis, field.lattice.spacing[axis], order)
    return field.with_values(out, margin=field.margin + order // 2)


def second_derivative(field, axis, order=2):
    """Second derivative along a lattice axis; widens the margin by order/2."""
    _check_axis(field, axis)
    out = kernels.diff2(field.values, axis, field.lattice.spacing[axis], order)
    return field.with_values(out, margin=field.margin + order // 2)


def box_flat(field, c=1.0, order=2):
    """Flat wave operator ``-(1/c^2) d_t^2 + sum_i d_i^2`` on a spacetime lattice.

    Derivatives along coordinates absent from the lattice are identically
    zero and are skipped.  Uses the fused kernel for scalar fields on rank-3
    lattices at order 2; otherwise composes per-axis stencils in the same
    floating-point operation order.
    """
    lat = field.lattice
    if not lat.has_time:
        raise AxisError("box_flat needs a lattice with a time axis")
    w0 = -1.0 / (float(c) * float(c))
    vals = field.values
    if field.n_component_dims == 0 and lat.ndim == 3 and order == 2:
        out = kernels.box(vals, lat.spacing, w0, order)
    else:
        out = kernels.diff2(vals, 0, lat.spacing[0], order) * w0
        for ax in range(1, lat.ndim):
            out += kernels.diff2(vals, ax, lat.spacing[ax], order)
    return field.with_values(out, margin=field.margin + order // 2)


def laplacian(field, order=2):
    """Sum of second derivatives over the spatial lattice axes."""
    lat = field.lattice
    first_spatial = 1 if lat.has_time else 0
    if first_spatial >= lat.ndim:
        raise AxisError("laplacian needs at least one spatial axis")
    out = kernels.diff2(field.values, first_spatial,
                        lat.spacing[first_spatial], order)
    for ax in range(first_spatial + 1, lat.ndim):
        out += kernels.diff2(field.values, ax, lat.spacing[ax], order)
    return field.with_values(out, margin=field.margin + order // 2)


def curved_maxwell_operator(m: MetricSpec, A: CovectorField, order=2):
    """Source-free Maxwell operator on a diagonal background, upper index.

    For a covector potential ``A`` returns the four quantities

        X^beta = d_alpha [ sqrt(-g) g^{aa} g^{bb} (d_a A_b - d_b A_a) ],

    summed over ``alpha`` (no ``1/sqrt(-g)`` prefactor; divide by
    :func:`bohmdisp.geometry.volume_factor` to get the covariant divergence).
    ``X`` vanishes on solutions of the curved wave equation.  Consumes two
    stencil half-widths of margin.
    """
    lat = A.lattice
    if not lat.has_time:
        raise AxisError("the Maxwell operator needs a lattice with a time axis")
    t = lat.spacetime_coords()[0]
    ginv = inverse_metric_diag(m, t)
    sqrtg = volume_factor(m, t)
    vals = A.values
    half = order // 2

    # dA[mu][nu] = d_mu A_nu; exact scalar zero when mu is off the lattice.
    dA = [[0.0] * 4 for _ in range(4)]
    for mu in range(4):
        ax = lat.spacetime_axis(mu)
        if ax is None:
            continue
        for nu in range(4):
            dA[mu][nu] = kernels.diff1(vals[..., nu], ax, lat.spacing[ax], order)

    out = np.zeros(vals.shape, dtype=vals.dtype)
    for beta in range(4):
        acc = None
        for alpha in range(4):
            ax = lat.spacetime_axis(alpha)
            if ax is None:
                continue
            F = dA[alpha][beta] - dA[beta][alpha]
            inner = sqrtg * ginv[alpha] * ginv[beta] * F
            term = kernels.diff1(inner, ax, lat.spacing[ax], order)
            acc = term if acc is None else acc + term
        out[..., beta] = acc
    return CovectorField(lat, out, margin=A.margin + 2 * half)


def covector_norm2(m: MetricSpec, field: CovectorField):
    """Pointwise ``xi.xi = g^{mm} xi_m xi_m`` and a positive reference scale.

    Returns ``(norm2, scale)`` where ``scale = sum_m |g^{mm}| xi_m^2`` bounds
    ``|norm2|`` from above pointwise and stays positive for any nonzero
    polarization, which makes it a safe yardstick for "norm2 is consistent
    with zero" tests.
    """
    t = field.lattice.spacetime_coords()[0]
    ginv = inverse_metric_diag(m, t)
    vals = field.values
    norm2 = ginv[0] * vals[..., 0] ** 2
    scale = np.abs(ginv[0]) * vals[..., 0] ** 2
    for mu in range(1, 4):
        norm2 = norm2 + ginv[mu] * vals[..., mu] ** 2
        scale = scale + np.abs(ginv[mu]) * vals[..., mu] ** 2
    return norm2, scale


def symtensor_norm2(m: MetricSpec, field: SymTensorField):
    """Pointwise ``zeta.zeta = g^{mm} g^{nn} zeta_mn zeta_mn`` and its scale."""
    t = field.lattice.spacetime_coords()[0]
    ginv = inverse_metric_diag(m, t)
    vals = field.values
    norm2 = 0.0
    scale = 0.0
    for idx, (mu, nu) in enumerate(SYM_PAIRS):
        w = SYM_WEIGHTS[idx]
        factor = ginv[mu] * ginv[nu]
        norm2 = norm2 + w * factor * vals[..., idx] ** 2
        scale = scale + w * np.abs(factor) * vals[..., idx] ** 2
    return norm2, scale


def interior_mask(lattice: Lattice, margin):
    """Boolean array excluding ``margin`` planes at every axis end."""
    margin = int(margin)
    if margin < 0:
        raise ValueError("margin cannot be negative")
    keep = np.ones(lattice.shape, dtype=bool)
    if margin == 0:
        return keep
    for ax, n in enumerate(lattice.counts):
        if 2 * margin >= n:
            return np.zeros(lattice.shape, dtype=bool)
        sl = [slice(None)] * lattice.ndim
        sl[ax] = slice(0, margin)
        keep[tuple(sl)] = False
        sl[ax] = slice(n - margin, n)
        keep[tuple(sl)] = False
    return keep


@dataclass(frozen=True)
class Mask:
    """Points where a derived quantity is trustworthy."""

    lattice: Lattice
    keep: np.ndarray
    margin: int = 0

    def __post_init__(self):
        keep = np.asarray(self.keep, dtype=bool)
        if keep.shape != self.lattice.shape:
            raise LatticeMismatch(
                f"mask shape {keep.shape} does not match lattice {self.lattice.shape}")
        object.__setattr__(self, "keep", keep)

    @property
    def count(self):
        return int(self.keep.sum())

    @property
    def kept_fraction(self):
        """Kept points as a fraction of all lattice points."""
        return self.count / self.keep.size

    def require_nonempty(self, what="mask"):
        if self.count == 0:
            raise EmptyMask(f"{what} kept no points")
        return self

    def __and__(self, other):
        if not isinstance(other, Mask):
            return NotImplemented
        if other.lattice != self.lattice:
            raise LatticeMismatch("cannot intersect masks on different lattices")
        return Mask(self.lattice, self.keep & other.keep,
                    max(self.margin, other.margin))


def build_mask(amp, epsilon_rel=0.05, margin=1):
    """Validity mask for quantities divided by an amplitude.

    Keeps interior points (excluding ``margin`` planes per axis end) where
    ``|amp| >= epsilon_rel * max |amp|``.  ``amp`` must be a real or complex
    :class:`ScalarField`; wrap raw arrays in a field first.
    """
    if not isinstance(amp, ScalarField) or amp.n_component_dims != 0:
        raise TypeError("build_mask expects a ScalarField amplitude")
    if not 0.0 < epsilon_rel <= 0.5:
        raise ValueError(f"epsilon_rel must be in (0, 0.5], got {epsilon_rel}")
    mag = np.abs(amp.values)
    peak = mag.max()
    if peak == 0.0:
        raise EmptyMask("amplitude is identically zero")
    keep = interior_mask(amp.lattice, margin) & (mag >= epsilon_rel * peak)
    mask = Mask(amp.lattice, keep, margin)
    return mask.require_nonempty("amplitude mask")


def masked_max(values, mask: Mask):
    """Max of ``|values|`` over kept points."""
    mask.require_nonempty()
    return float(np.abs(np.asarray(values)[mask.keep]).max())


def masked_mean(values, mask: Mask):
    """Mean of ``|values|`` over kept points."""
    mask.require_nonempty()
    return float(np.abs(np.asarray(values)[mask.keep]).mean())
