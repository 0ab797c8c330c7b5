"""Sector-specific Bohm potentials from real amplitude fields.

Each evaluator forms the quantum-potential combination for its wave sector,
masks points where the defining division is unreliable (stencil margins,
amplitude below ``epsilon_rel`` of peak, vanishing polarization norm), and
returns the potential together with that mask.

Sectors and their potentials (signature ``(-, +, +, +)``):

* ``nonrel``:    ``V_B = -(hbar^2 / 2m) lap(A) / A``  (spatial Laplacian)
* ``scalar``:    ``V_B = box(U) / U`` with ``box = -(1/c^2) d_t^2 + lap``
* ``em_flat``:   ``V_B = xi_n box(xi^n) / xi.xi``
* ``em_curved``: ``V_B = xi_b X^b / (sqrt(-g) xi.xi)`` with ``X`` the
  source-free Maxwell operator of :mod:`bohmdisp.lattice`
* ``gw``:        ``V_B = (zeta^{mn} box(zeta_{mn})
  + 2 R_{manb} zeta^{mn} zeta^{ab}) / zeta.zeta`` on a flat background,
  where the curvature contraction is kept in the formula and is exactly
  zero there

In every sector the local dispersion relation under test is
``g^{mn} k_m k_n = V_B``: a negative potential makes the wavevector
timelike (sub-luminal rays), a positive one spacelike (super-luminal),
and zero recovers the classical null relation.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import NullAmplitude, NullPolarization, UnsupportedBackground
from .geometry import MetricSpec, inverse_metric_diag, riemann_lowered_at, volume_factor
from .lattice import (
    CovectorField,
    Mask,
    ScalarField,
    SymTensorField,
    SYM_PAIRS,
    SYM_WEIGHTS,
    box_flat,
    build_mask,
    covector_norm2,
    curved_maxwell_operator,
    expand_symtensor,
    interior_mask,
    laplacian,
    symtensor_norm2,
)

__all__ = ["Sector", "BohmField", "bohm_nonrel", "bohm_scalar", "bohm_em_flat",
           "bohm_em_curved", "bohm_gw", "bohm_potential"]

DEFAULT_EPSILON_REL = 0.05


class Sector(str, Enum):
    """Wave sector tags used across evaluators, reports, and the CLI."""

    NONREL = "nonrel"
    SCALAR = "scalar"
    EM_FLAT = "em_flat"
    EM_CURVED = "em_curved"
    GW = "gw"


@dataclass(frozen=True)
class BohmField:
    """A Bohm potential with the mask on which it is defined."""

    vb: ScalarField
    mask: Mask
    sector: Sector


def _real_values(field, what):
    if field.is_complex:
        raise TypeError(f"{what} expects a real amplitude field; "
                        "decompose the complex field first")
    return field.values


def _guarded_divide(num, den, keep):
    out = np.zeros(num.shape, dtype=np.float64)
    out[keep] = num[keep] / den[keep]
    return out


def bohm_nonrel(amp: ScalarField, hbar=1.0, mass=1.0,
                epsilon_rel=DEFAULT_EPSILON_REL, order=2):
    """Nonrelativistic quantum potential ``-(hbar^2 / 2m) lap(A) / A``."""
    _real_values(amp, "bohm_nonrel")
    lap = laplacian(amp, order=order)
    mask = build_mask(amp, epsilon_rel, margin=lap.margin)
    num = (-(float(hbar) ** 2) / (2.0 * float(mass))) * lap.values
    vb = _guarded_divide(num, amp.values, mask.keep)
    return BohmField(ScalarField(amp.lattice, vb, lap.margin), mask, Sector.NONREL)


def bohm_scalar(amp: ScalarField, c=1.0, epsilon_rel=DEFAULT_EPSILON_REL, order=2):
    """Relativistic scalar Bohm potential ``box(U) / U`` on flat spacetime."""
    _real_values(amp, "bohm_scalar")
    bx = box_flat(amp, c=c, order=order)
    mask = build_mask(amp, epsilon_rel, margin=bx.margin)
    vb = _guarded_divide(bx.values, amp.values, mask.keep)
    return BohmField(ScalarField(amp.lattice, vb, bx.margin), mask, Sector.SCALAR)


def _norm_mask(lat, norm2, scale, margin, epsilon_rel, error_cls, what):
    peak = float(scale.max())
    if peak == 0.0:
        raise error_cls(f"{what} is identically zero")
    keep = interior_mask(lat, margin) & (np.abs(norm2) >= epsilon_rel * peak)
    mask = Mask(lat, keep, margin)
    if mask.count == 0:
        raise error_cls(
            f"{what} norm is below {epsilon_rel} of its component scale "
            "everywhere in the interior (null or near-null polarization)")
    return mask


def bohm_em_flat(xi: CovectorField, c=1.0, epsilon_rel=DEFAULT_EPSILON_REL, order=2):
    """Electromagnetic Bohm potential ``xi_n box(xi^n) / xi.xi`` on flat
    spacetime, for a real polarization amplitude ``xi``."""
    vals = _real_values(xi, "bohm_em_flat")
    lat = xi.lattice
    metric = MetricSpec.minkowski(c)
    ginv = inverse_metric_diag(metric, lat.spacetime_coords()[0])
    norm2, scale = covector_norm2(metric, xi)

    num = None
    half = order // 2
    for mu in range(4):
        comp = ScalarField(lat, vals[..., mu], xi.margin)
        bx = box_flat(comp, c=c, order=order).values
        term = ginv[mu] * vals[..., mu] * bx
        num = term if num is None else num + term
    margin = xi.margin + half
    mask = _norm_mask(lat, norm2, scale, margin, epsilon_rel,
                      NullPolarization, "polarization")
    vb = _guarded_divide(num, norm2, mask.keep)
    return BohmField(ScalarField(lat, vb, margin), mask, Sector.EM_FLAT)


def bohm_em_curved(m: MetricSpec, xi: CovectorField,
                   epsilon_rel=DEFAULT_EPSILON_REL, order=2):
    """Electromagnetic Bohm potential on a diagonal background,
    ``xi_b X^b / (sqrt(-g) xi.xi)``."""
    vals = _real_values(xi, "bohm_em_curved")
    lat = xi.lattice
    X = curved_maxwell_operator(m, xi, order=order)
    norm2, scale = covector_norm2(m, xi)
    sqrtg = volume_factor(m, lat.spacetime_coords()[0])

    num = None
    for beta in range(4):
        term = vals[..., beta] * X.values[..., beta]
        num = term if num is None else num + term
    den = sqrtg * norm2
    den_scale = sqrtg * scale
    mask = _norm_mask(lat, den, den_scale, X.margin, epsilon_rel,
                      NullPolarization, "polarization")
    vb = _guarded_divide(num, den, mask.keep)
    return BohmField(ScalarField(lat, vb, X.margin), mask, Sector.EM_CURVED)


def bohm_gw(m: MetricSpec, zeta: SymTensorField,
            epsilon_rel=DEFAULT_EPSILON_REL, order=2):
    """Gravitational-wave Bohm potential on a flat background.

    Contracts ``zeta^{mn} box(zeta_{mn})`` plus the curvature term
    ``2 R_{manb} zeta^{mn} zeta^{ab}`` (exactly zero here, but evaluated
    from the background Riemann tensor so the expression stays complete),
    divided by ``zeta.zeta``.  Raises :class:`UnsupportedBackground` for
    curved metrics, whose transverse-traceless sector is not implemented.
    """
    if m.kind != "minkowski":
        raise UnsupportedBackground(
            "the gravitational-wave sector supports only flat backgrounds")
    vals = _real_values(zeta, "bohm_gw")
    lat = zeta.lattice
    ginv = inverse_metric_diag(m, lat.spacetime_coords()[0])
    norm2, scale = symtensor_norm2(m, zeta)

    num = None
    half = order // 2
    for idx, (mu, nu) in enumerate(SYM_PAIRS):
        comp = ScalarField(lat, vals[..., idx], zeta.margin)
        bx = box_flat(comp, c=m.c, order=order).values
        term = (SYM_WEIGHTS[idx] * ginv[mu] * ginv[nu]) * vals[..., idx] * bx
        num = term if num is None else num + term

    # Curvature contraction 2 R_{manb} zeta^{mn} zeta^{ab}; identically zero
    # on this background, but evaluated from the Riemann tensor so the full
    # expression is what the code computes.
    r_low = riemann_lowered_at(m, (0.0, 0.0, 0.0, 0.0))
    curv = np.zeros(lat.shape)
    if np.any(r_low):  # pragma: no cover - unreachable on a flat background
        full = expand_symtensor(vals)
        for mu in range(4):
            for nu in range(4):
                for al in range(4):
                    for be in range(4):
                        rc = r_low[mu, al, nu, be]
                        if rc != 0.0:
                            curv += (2.0 * rc) \
                                * (ginv[mu] * ginv[nu] * full[..., mu, nu]) \
                                * (ginv[al] * ginv[be] * full[..., al, be])
    num = num + curv

    margin = zeta.margin + half
    mask = _norm_mask(lat, norm2, scale, margin, epsilon_rel,
                      NullAmplitude, "tensor amplitude")
    vb = _guarded_divide(num, norm2, mask.keep)
    return BohmField(ScalarField(lat, vb, margin), mask, Sector.GW)


def bohm_potential(sector: Sector, amp, metric: MetricSpec, *,
                   hbar=1.0, mass=1.0, epsilon_rel=DEFAULT_EPSILON_REL, order=2):
    """Dispatch to the sector evaluator appropriate for ``amp``."""
    sector = Sector(sector)
    if sector is Sector.NONREL:
        return bohm_nonrel(amp, hbar=hbar, mass=mass,
                           epsilon_rel=epsilon_rel, order=order)
    if sector is Sector.SCALAR:
        if metric.kind != "minkowski":
            raise UnsupportedBackground(
                "the scalar sector supports only flat backgrounds")
        return bohm_scalar(amp, c=metric.c, epsilon_rel=epsilon_rel, order=order)
    if sector is Sector.EM_FLAT:
        if metric.kind != "minkowski":
            raise UnsupportedBackground(
                "em_flat needs a flat background; use em_curved instead")
        return bohm_em_flat(amp, c=metric.c, epsilon_rel=epsilon_rel, order=order)
    if sector is Sector.EM_CURVED:
        return bohm_em_curved(metric, amp, epsilon_rel=epsilon_rel, order=order)
    if sector is Sector.GW:
        return bohm_gw(metric, amp, epsilon_rel=epsilon_rel, order=order)
    raise ValueError(f"unknown sector {sector!r}")  # pragma: no cover
