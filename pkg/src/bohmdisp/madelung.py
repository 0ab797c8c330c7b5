"""Amplitude/phase (polar) decomposition of complex lattice fields.

A complex field is written ``psi = A * exp(i * S / hbar)`` with real
amplitude ``A`` and real action-valued phase ``S`` (relativistic sectors use
``hbar = 1`` so ``S`` is the plain phase).  Two reconstruction modes exist:

``positive``
    ``A = |psi| >= 0``; the phase is the standard argument unwrapped over the
    lattice.  Resolvable when phase steps between neighbours stay below pi.
    Fields with interior zeros (nodes) make this branch ill-behaved, because
    the argument jumps by pi across a node.

``signed``
    ``A`` may change sign; the phase is unwrapped modulo pi and the sign
    flip is absorbed into ``A``.  This keeps both ``A`` and ``S`` smooth for
    standing-wave profiles like ``cos(kappa y) * exp(i k x)``, at the cost
    of halving the resolvable bandwidth (phase steps must stay below pi/2).

``auto`` picks ``signed`` when the field shows sign-flip evidence or
interior near-zeros, and ``positive`` otherwise.

Unwrapping proceeds axis by axis (``axis_order``) and is anchored at a
reference node with nonzero amplitude, so the result is deterministic and
independent of array iteration details.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    AxisError,
    NyquistViolation,
    PhaseNotSeparable,
    ZeroAtReference,
)
from .lattice import (
    CovectorField,
    Mask,
    ScalarField,
    interior_mask,
    partial_derivative,
)

__all__ = [
    "MadelungPair",
    "WaveVectorField",
    "decompose",
    "decompose_components",
    "reconstruct",
    "wavevector",
]

NYQUIST_FRACTION = 0.95
REFERENCE_REL_FLOOR = 1e-12
NODE_REL_THRESHOLD = 1e-6
IM_REL_TOL = 1e-8
FLIP_AMP_TOL = 0.5


@dataclass(frozen=True)
class MadelungPair:
    """Amplitude and phase of a complex field, ``psi = A exp(i S / hbar)``."""

    amplitude: ScalarField
    phase: ScalarField
    reference: tuple[int, ...]
    hbar: float = 1.0
    mode: str = "positive"
    diagnostics: dict | None = None

    @property
    def lattice(self):
        return self.amplitude.lattice


@dataclass(frozen=True)
class WaveVectorField:
    """Local wavevector ``k_mu = d_mu S`` with its validity mask."""

    k: CovectorField
    valid: Mask

    @property
    def lattice(self):
        return self.k.lattice


def _phase_steps(values, axis):
    """Neighbour phase increments along ``axis`` from the product trick.

    ``angle(psi[j+1] * conj(psi[j]))`` is the principal-value phase step, a
    quantity immune to branch cuts of the pointwise argument.  Pairs with a
    vanishing product carry no information and are returned as 0.
    """
    a = np.moveaxis(values, axis, 0)
    prod = a[1:] * np.conj(a[:-1])
    return np.angle(prod), np.abs(prod)


def _fold_half(steps):
    """Distance of each step from the nearest multiple of pi."""
    return steps - np.pi * np.round(steps / np.pi)


def _weight_floor(values):
    """Pair-product magnitude below which phase steps carry no information.

    Pairs where either amplitude is under ``NODE_REL_THRESHOLD`` of the peak
    sit at node crossings or rounding-level tails; their raw angles are
    noise and must not drive mode selection or Nyquist failures.
    """
    peak = float(np.abs(values).max())
    return (NODE_REL_THRESHOLD * peak) ** 2


def _pick_mode(values, interior):
    """Choose "signed" or "positive" for mode="auto"."""
    mag = np.abs(values)
    peak = mag.max()
    if peak == 0.0:
        return "positive"  # decompose() will fail on the reference check
    if np.any(mag[interior] < NODE_REL_THRESHOLD * peak):
        return "signed"
    w_floor = _weight_floor(values)
    for axis in range(values.ndim):
        steps, weight = _phase_steps(values, axis)
        flips = (np.abs(steps) > 0.5 * np.pi) & \
                (np.abs(_fold_half(steps)) <= 0.25 * np.pi) & (weight > w_floor)
        if np.any(flips):
            return "signed"
    return "positive"


def _check_nyquist(values, mode, nyquist_fraction):
    """Raise if any phase step is too close to the unwrap ambiguity limit."""
    if mode == "signed":
        limit = nyquist_fraction * 0.5 * np.pi
    else:
        limit = nyquist_fraction * np.pi
    w_floor = _weight_floor(values)
    for axis in range(values.ndim):
        steps, weight = _phase_steps(values, axis)
        steps = np.where(weight > w_floor, steps, 0.0)
        if mode == "signed":
            steps = _fold_half(steps)
        worst = float(np.abs(steps).max()) if steps.size else 0.0
        if worst > limit:
            raise NyquistViolation(
                f"phase advances {worst:.3f} rad per step along axis {axis}, "
                f"above the {mode}-mode limit {limit:.3f}; refine the lattice "
                f"or enlarge the solution's wavelength")


def _unwrap_about(theta, axis, anchor, period):
    """Unwrap along ``axis`` sweeping outward from the ``anchor`` index.

    Sweeping away from the anchor (instead of from index 0) means the
    unwrap reaches every point between the anchor and a lattice edge before
    it can cross rounding-level tails near the walls, so junk angles there
    cannot inject period jumps into well-resolved regions.
    """
    th = np.moveaxis(theta, axis, 0)
    out = th.copy()
    out[anchor:] = np.unwrap(th[anchor:], axis=0, period=period)
    out[:anchor + 1] = np.unwrap(th[:anchor + 1][::-1], axis=0,
                                 period=period)[::-1]
    return np.moveaxis(out, 0, axis)


def _sequential_unwrap(theta, axis_order, period, reference):
    out = theta
    for axis in axis_order:
        out = _unwrap_about(out, axis, reference[axis], period)
    return out


def decompose(psi: ScalarField, reference=None, hbar=1.0, mode="auto",
              axis_order=None, nyquist_fraction=NYQUIST_FRACTION,
              im_rel_tol=IM_REL_TOL, flip_amp_tol=FLIP_AMP_TOL):
    """Split a complex scalar field into a :class:`MadelungPair`.

    ``reference`` is the index tuple anchoring the unwrapped phase (defaults
    to the lattice centre); its amplitude must exceed ``1e-12`` of the peak.
    ``axis_order`` controls the unwrap sweep (default: axis 0 upward).
    Raises :class:`NyquistViolation` for under-resolved phases,
    :class:`ZeroAtReference` for a bad anchor, and
    :class:`PhaseNotSeparable` when the signed reconstruction leaves a
    relative imaginary residual above ``im_rel_tol`` or flips sign away
    from a node.
    """
    if psi.n_component_dims != 0:
        raise TypeError("decompose expects a scalar field; use "
                        "decompose_components for multi-component data")
    values = np.asarray(psi.values, dtype=np.complex128)
    lat = psi.lattice
    mag = np.abs(values)
    peak = float(mag.max())

    if reference is None:
        reference = tuple(n // 2 for n in lat.counts)
    reference = tuple(int(i) for i in reference)
    if len(reference) != lat.ndim:
        raise AxisError(f"reference {reference} does not index a rank-{lat.ndim} lattice")
    if peak == 0.0 or mag[reference] < REFERENCE_REL_FLOOR * peak:
        raise ZeroAtReference(
            f"|psi| at reference {reference} is {mag[reference]:.3e} "
            f"(peak {peak:.3e}); pick a reference away from nodes")

    if axis_order is None:
        axis_order = tuple(range(lat.ndim))
    else:
        axis_order = tuple(int(a) for a in axis_order)
        if sorted(axis_order) != list(range(lat.ndim)):
            raise AxisError(f"axis_order {axis_order} must permute all lattice axes")

    if mode == "auto":
        mode = _pick_mode(values, interior_mask(lat, max(1, psi.margin)))
    if mode not in ("signed", "positive"):
        raise ValueError(f"mode must be 'auto', 'signed', or 'positive', got {mode!r}")

    _check_nyquist(values, mode, nyquist_fraction)

    theta_raw = np.angle(values)
    period = np.pi if mode == "signed" else 2.0 * np.pi
    theta = _sequential_unwrap(theta_raw, axis_order, period, reference)
    # Re-anchor so the phase at the reference is the principal value there
    # (outward sweeps leave the anchor untouched, so the shift is zero; kept
    # as a guard against future sweep-order changes).
    shift = period * np.round((theta[reference] - theta_raw[reference]) / period)
    theta = theta - shift

    diagnostics = {"mode": mode}
    if mode == "positive":
        amplitude = mag
        rotated = values * np.exp(-1j * theta)
        im_resid = float(np.abs(rotated.imag).max()) / peak
    else:
        rotated = values * np.exp(-1j * theta)
        if rotated.real[reference] < 0.0:
            theta = theta + np.pi
            rotated = values * np.exp(-1j * theta)
        amplitude = rotated.real
        im_resid = float(np.abs(rotated.imag).max()) / peak
        if im_resid > im_rel_tol:
            raise PhaseNotSeparable(
                f"signed decomposition leaves relative imaginary residual "
                f"{im_resid:.3e} (tolerance {im_rel_tol:.1e})")
        _check_sign_flips(amplitude, flip_amp_tol)
    diagnostics["im_residual_rel"] = im_resid

    amp_field = ScalarField(lat, amplitude, psi.margin)
    phase_field = ScalarField(lat, float(hbar) * theta, psi.margin)
    return MadelungPair(amplitude=amp_field, phase=phase_field,
                        reference=reference, hbar=float(hbar), mode=mode,
                        diagnostics=diagnostics)


def _check_sign_flips(amplitude, flip_amp_tol):
    """Signed amplitudes may only change sign while passing near zero."""
    peak = np.abs(amplitude).max()
    if peak == 0.0:
        return
    for axis in range(amplitude.ndim):
        a = np.moveaxis(amplitude, axis, 0)
        lo, hi = a[:-1], a[1:]
        flips = (lo * hi) < 0.0
        if not np.any(flips):
            continue
        smaller = np.minimum(np.abs(lo), np.abs(hi))
        worst = float(smaller[flips].max())
        if worst > flip_amp_tol * peak:
            raise PhaseNotSeparable(
                f"amplitude flips sign at |A| = {worst:.3e} "
                f"({worst / peak:.2f} of peak) along axis {axis}; "
                f"this indicates a phase mis-fold, not a node crossing")


def decompose_components(field, reference=None, hbar=1.0, mode="auto",
                         axis_order=None, im_rel_tol=IM_REL_TOL):
    """Common-phase decomposition of a multi-component complex field.

    Assumes every component shares one phase factor (components are real
    multiples of a common complex scalar, as for a fixed polarization).  The
    phase is recovered from the component with the largest peak magnitude;
    each component's signed amplitude is then ``Re(comp * exp(-i theta))``.
    Raises :class:`PhaseNotSeparable` if any component keeps a relative
    imaginary residual above ``im_rel_tol``.

    Returns ``(amplitudes, pair)`` where ``amplitudes`` is a real field of
    the same type as ``field`` and ``pair`` is the scalar
    :class:`MadelungPair` of the dominant component.
    """
    if field.n_component_dims != 1:
        raise TypeError("decompose_components expects a multi-component field")
    vals = np.asarray(field.values, dtype=np.complex128)
    peaks = [float(np.abs(vals[..., c]).max()) for c in range(vals.shape[-1])]
    dominant = int(np.argmax(peaks))
    overall_peak = peaks[dominant]
    if overall_peak == 0.0:
        raise ZeroAtReference("all components are identically zero")

    scalar = ScalarField(field.lattice, vals[..., dominant], field.margin)
    pair = decompose(scalar, reference=reference, hbar=hbar, mode=mode,
                     axis_order=axis_order, im_rel_tol=im_rel_tol)
    theta = pair.phase.values / pair.hbar
    rotor = np.exp(-1j * theta)

    amps = np.empty(vals.shape, dtype=np.float64)
    for c in range(vals.shape[-1]):
        rotated = vals[..., c] * rotor
        resid = float(np.abs(rotated.imag).max()) / overall_peak
        if resid > im_rel_tol:
            raise PhaseNotSeparable(
                f"component {c} does not share the common phase "
                f"(relative imaginary residual {resid:.3e})")
        amps[..., c] = rotated.real

    diag = dict(pair.diagnostics or {})
    diag["dominant_component"] = dominant
    pair = MadelungPair(amplitude=pair.amplitude, phase=pair.phase,
                        reference=pair.reference, hbar=pair.hbar,
                        mode=pair.mode, diagnostics=diag)
    amp_field = type(field)(field.lattice, amps, field.margin)
    return amp_field, pair


def reconstruct(pair: MadelungPair):
    """Rebuild the complex field ``A * exp(i S / hbar)`` from a pair."""
    values = pair.amplitude.values * np.exp(
        1j * pair.phase.values / pair.hbar)
    return ScalarField(pair.lattice, values, pair.amplitude.margin)


def wavevector(pair: MadelungPair, order=2):
    """Local wavevector ``k_mu = d_mu S`` on a spacetime lattice.

    Components along coordinates absent from the lattice are exactly zero
    (solutions are sampled in adapted coordinates).  The validity mask is
    the lattice interior after the differentiation margin.
    """
    lat = pair.lattice
    if not lat.has_time:
        raise AxisError("wavevector needs a lattice with a time axis")
    comps = []
    for mu in range(4):
        ax = lat.spacetime_axis(mu)
        if ax is None:
            comps.append(np.zeros(lat.shape))
        else:
            comps.append(partial_derivative(pair.phase, ax, order).values)
    k_vals = np.stack(comps, axis=-1)
    margin = pair.phase.margin + order // 2
    k = CovectorField(lat, k_vals, margin)
    mask = Mask(lat, interior_mask(lat, margin), margin)
    return WaveVectorField(k=k, valid=mask)
