"""Residual checks tying local wavevectors to Bohm potentials.

Every check produces a :class:`ResidualReport` with masked max/mean values
(max drives assertions, mean is diagnostic), the kept-point fraction, an
optional luminality classification, and a ``claim`` string stating the
closed-form relation under test.  Checks never assert by themselves; the
caller (test suite or CLI) compares ``masked_max`` against tolerances.
Checks carry a ``status`` of ``asserted`` or ``reported``; continuity on
curved backgrounds is always ``reported`` (see
:func:`continuity_residual`).

The central check is ``dispersion``: with ``k_mu = d_mu S`` from the phase
and ``V_B`` from the sector's amplitude, the residual is

    g^{mn} k_m k_n - V_B,

which vanishes for exact solutions up to stencil truncation.  Luminality is
classified from the sign of ``k.k`` by majority vote over kept points:
``null`` when ``|k.k|`` is below ``tol_rel`` times the Euclidean scale
``sum_m k_m^2``, else ``timelike`` (negative) or ``spacelike`` (positive).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np

from . import kernels
from .bohm import BohmField, Sector, bohm_potential
from .catalog import (
    CLASS_NULL,
    CLASS_SPACELIKE,
    CLASS_TIMELIKE,
    AnalyticSolution,
)
from .errors import (
    BranchDomainError,
    EmptyMask,
    LatticeMismatch,
    MemoryCap,
    NullPolarization,
)
from .geometry import MetricSpec, inverse_metric_diag, volume_factor
from .lattice import (
    CovectorField,
    Lattice,
    Mask,
    ScalarField,
    SYM_PAIRS,
    SYM_WEIGHTS,
    box_flat,
    curved_maxwell_operator,
    interior_mask,
    masked_max,
    masked_mean,
    sample_covector,
    sample_scalar,
    sample_symtensor,
)
from .madelung import WaveVectorField, decompose, decompose_components, wavevector

__all__ = [
    "ResidualReport",
    "CLASSIFY_TOL_REL",
    "metric_kk",
    "classify_luminality",
    "dispersion_residual",
    "expected_vb_residual",
    "continuity_residual",
    "gauge_residual",
    "wave_residual",
    "alignment_residual",
    "convergence_study",
    "scissor_check",
    "run_solution_suite",
    "run_static_profile",
    "suite_for",
]

CLASSIFY_TOL_REL = 1e-6
ZERO_FLOOR = 1e-13
STATUS_ASSERTED = "asserted"
STATUS_REPORTED = "reported"


@dataclass(frozen=True)
class ResidualReport:
    """One check's outcome; plain-data, deterministic, JSON-ready."""

    check_name: str
    sector: str
    lattice: dict
    masked_max: float
    masked_mean: float
    kept_fraction: float
    orders: list | None = None
    classification: str | None = None
    claim: str = ""
    status: str = STATUS_ASSERTED
    extra: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "check_name": self.check_name,
            "sector": self.sector,
            "lattice": self.lattice,
            "masked_max": self.masked_max,
            "masked_mean": self.masked_mean,
            "kept_fraction": self.kept_fraction,
            "orders": self.orders,
            "classification": self.classification,
            "claim": self.claim,
            "status": self.status,
            "extra": self.extra,
        }


def _report(check_name, sector, lattice, values, mask, **kw):
    return ResidualReport(
        check_name=check_name,
        sector=sector.value if isinstance(sector, Sector) else str(sector),
        lattice=lattice.describe(),
        masked_max=masked_max(values, mask),
        masked_mean=masked_mean(values, mask),
        kept_fraction=mask.kept_fraction,
        **kw,
    )


def metric_kk(m: MetricSpec, kf: WaveVectorField):
    """Pointwise ``k.k = g^{mm} k_m k_m`` and the Euclidean scale ``sum k_m^2``."""
    ginv = inverse_metric_diag(m, kf.lattice.spacetime_coords()[0])
    kv = kf.k.values
    kk = ginv[0] * kv[..., 0] ** 2
    scale = kv[..., 0] ** 2
    for mu in range(1, 4):
        kk = kk + ginv[mu] * kv[..., mu] ** 2
        scale = scale + kv[..., mu] ** 2
    return kk, scale


def classify_luminality(kk, scale, mask: Mask, tol_rel=CLASSIFY_TOL_REL):
    """Majority-vote luminality of ``k.k`` over kept points.

    A point votes ``null`` when ``|k.k| < tol_rel * ref`` with ``ref`` the
    maximum Euclidean ``sum k_m^2`` over kept points, else ``timelike`` for
    negative and ``spacelike`` for positive values.  Returns the majority
    label and a detail dict with the votes and unanimity fraction.
    """
    mask.require_nonempty("classification mask")
    kk_kept = np.asarray(kk)[mask.keep]
    ref = float(np.asarray(scale)[mask.keep].max())
    is_null = np.abs(kk_kept) < tol_rel * ref
    votes = {
        CLASS_NULL: int(is_null.sum()),
        CLASS_TIMELIKE: int(((kk_kept < 0.0) & ~is_null).sum()),
        CLASS_SPACELIKE: int(((kk_kept > 0.0) & ~is_null).sum()),
    }
    label = max(votes, key=lambda name: (votes[name], name))
    unanimity = votes[label] / kk_kept.size
    return label, {"votes": votes, "unanimity": unanimity,
                   "tol_rel": tol_rel, "euclidean_scale": ref}


def dispersion_residual(kf: WaveVectorField, vb: BohmField, m: MetricSpec,
                        claim="g^{mn} k_m k_n = V_B",
                        tol_rel=CLASSIFY_TOL_REL):
    """Absolute residual ``|k.k - V_B|`` on the joint mask, with luminality."""
    if vb.vb.lattice != kf.lattice:
        raise LatticeMismatch("wavevector and Bohm potential live on "
                              "different lattices")
    mask = (kf.valid & vb.mask).require_nonempty("dispersion mask")
    kk, scale = metric_kk(m, kf)
    resid = kk - vb.vb.values
    label, detail = classify_luminality(kk, scale, mask, tol_rel)
    extra = {"vb_masked_max": masked_max(vb.vb.values, mask),
             "kk_masked_max": masked_max(kk, mask), **detail}
    return _report("dispersion", vb.sector, kf.lattice, resid, mask,
                   classification=label, claim=claim, extra=extra)


def expected_vb_residual(vb: BohmField, sol: AnalyticSolution):
    """Absolute residual between measured ``V_B`` and its closed form."""
    if sol.expected_vb is None:
        raise ValueError(f"{sol.name} declares no closed-form potential")
    lat = vb.vb.lattice
    t, x, y, z = lat.spacetime_coords()
    expected = np.broadcast_to(sol.expected_vb(t, x, y, z), lat.shape)
    resid = vb.vb.values - expected
    mask = vb.mask.require_nonempty("expected-potential mask")
    extra = {"expected_masked_max": masked_max(expected, mask),
             "vb_masked_max": masked_max(vb.vb.values, mask)}
    if "branch_sign_warning" in sol.notes:
        extra["branch_sign_warning"] = sol.notes["branch_sign_warning"]
    return _report("expected_vb", vb.sector, lat, resid, mask,
                   claim=sol.notes.get("claim", ""), extra=extra)


def continuity_residual(kf: WaveVectorField, amp2: ScalarField, m: MetricSpec,
                        sector: Sector, status=STATUS_ASSERTED, order=2,
                        claim="covariant divergence of (amplitude^2 k^m) = 0",
                        prediction=None, check_name="continuity"):
    """Covariant divergence of the amplitude-squared wavevector flux.

    Computes ``(1 / sqrt(-g)) d_m (sqrt(-g) amp2 g^{mm} k_m)`` over lattice
    axes.  On flat backgrounds this is the conserved current of the wave
    equation and may be asserted; on curved backgrounds the contraction
    convention for ``amp2`` changes the answer, so results are only ever
    ``reported`` there, with the caller's analytic ``prediction`` array (if
    given) measured alongside and its masked maximum stored in ``extra``.
    """
    lat = kf.lattice
    if amp2.lattice != lat:
        raise LatticeMismatch("amplitude and wavevector lattices differ")
    if m.kind != "minkowski" and status == STATUS_ASSERTED:
        status = STATUS_REPORTED
    t = lat.spacetime_coords()[0]
    ginv = inverse_metric_diag(m, t)
    sqrtg = volume_factor(m, t)
    half = order // 2

    div = None
    for mu in range(4):
        ax = lat.spacetime_axis(mu)
        if ax is None:
            continue
        flux = sqrtg * ginv[mu] * kf.k.values[..., mu] * amp2.values
        term = kernels.diff1(flux, ax, lat.spacing[ax], order)
        div = term if div is None else div + term
    resid = div / sqrtg

    margin = max(kf.k.margin, amp2.margin) + half
    mask = (Mask(lat, interior_mask(lat, margin), margin) & kf.valid)
    mask.require_nonempty("continuity mask")
    extra = {"amp2_masked_max": masked_max(amp2.values, mask)}
    if prediction is not None:
        prediction = np.broadcast_to(prediction, lat.shape)
        extra["prediction_masked_max"] = masked_max(prediction, mask)
        extra["deviation_from_prediction"] = masked_max(resid - prediction, mask)
    return _report(check_name, sector, lat, resid, mask,
                   claim=claim, status=status, extra=extra)


def _component_groups(amp):
    """Rows of (prefactor, covector-of-values) pairs for gauge contractions.

    For a covector this is the single row ``xi_mu``; for a packed symmetric
    tensor, one row per free index ``nu`` holding ``zeta_{mu nu}``.
    """
    vals = amp.values
    if isinstance(amp, CovectorField):
        return [vals]
    return [np.stack([amp.component(mu, nu) for mu in range(4)], axis=-1)
            for nu in range(4)]


def gauge_residual(amp, kf: WaveVectorField, m: MetricSpec, sector: Sector,
                   order=2):
    """Algebraic and differential divergence-gauge residuals.

    Returns ``(algebraic, differential)`` reports.  The algebraic residual
    is ``|g^{mm} k_m xi_m|`` (per free index for tensors, combined as the
    pointwise maximum); the differential one replaces ``k_m xi_m`` with the
    covariant divergence ``(1 / sqrt(-g)) d_m (sqrt(-g) g^{mm} xi_m)``.
    Both vanish for the catalog modes because the polarization index never
    appears among the coordinate dependencies.
    """
    lat = kf.lattice
    if amp.lattice != lat:
        raise LatticeMismatch("amplitude and wavevector lattices differ")
    t = lat.spacetime_coords()[0]
    ginv = inverse_metric_diag(m, t)
    sqrtg = volume_factor(m, t)
    half = order // 2
    rows = _component_groups(amp)

    alg = None
    for row in rows:
        contraction = None
        for mu in range(4):
            term = ginv[mu] * kf.k.values[..., mu] * row[..., mu]
            contraction = term if contraction is None else contraction + term
        mag = np.abs(contraction)
        alg = mag if alg is None else np.maximum(alg, mag)
    alg_margin = max(kf.k.margin, amp.margin)
    alg_mask = (Mask(lat, interior_mask(lat, alg_margin), alg_margin) & kf.valid)
    alg_mask.require_nonempty("algebraic gauge mask")
    alg_report = _report(
        "gauge_algebraic", sector, lat, alg, alg_mask,
        claim="g^{mn} k_m (polarization)_n = 0",
        extra={"amplitude_peak": float(np.abs(amp.values).max())})

    diff = None
    for row in rows:
        div = None
        for mu in range(4):
            ax = lat.spacetime_axis(mu)
            if ax is None:
                continue
            flux = sqrtg * ginv[mu] * row[..., mu]
            term = kernels.diff1(flux, ax, lat.spacing[ax], order)
            div = term if div is None else div + term
        mag = np.abs(div / sqrtg)
        diff = mag if diff is None else np.maximum(diff, mag)
    diff_margin = amp.margin + half
    diff_mask = Mask(lat, interior_mask(lat, diff_margin), diff_margin)
    diff_mask.require_nonempty("differential gauge mask")
    diff_report = _report(
        "gauge_differential", sector, lat, diff, diff_mask,
        claim="covariant divergence of the polarization = 0",
        extra={"amplitude_peak": float(np.abs(amp.values).max())})
    return alg_report, diff_report


def wave_residual(complex_field, m: MetricSpec, sector: Sector, order=2):
    """Relative residual of the sector's classical wave equation.

    Applies the sector's wave operator to the full complex field and
    normalizes the pointwise Euclidean component magnitude by the field's
    peak magnitude, so exact solutions give ~0 and truncation error shows
    up at the stencil order.
    """
    lat = complex_field.lattice
    vals = complex_field.values
    sector = Sector(sector)
    if sector is Sector.EM_CURVED:
        out = curved_maxwell_operator(m, complex_field, order=order)
        resid2 = (np.abs(out.values) ** 2).sum(axis=-1)
        margin = out.margin
    elif sector in (Sector.SCALAR, Sector.EM_FLAT, Sector.GW):
        weights = [1.0] if sector is Sector.SCALAR else (
            [1.0] * 4 if sector is Sector.EM_FLAT else list(SYM_WEIGHTS))
        resid2 = None
        ncomp = 1 if sector is Sector.SCALAR else len(weights)
        for ci in range(ncomp):
            comp_vals = vals if sector is Sector.SCALAR else vals[..., ci]
            comp = ScalarField(lat, comp_vals, complex_field.margin)
            bx = box_flat(comp, c=m.c, order=order).values
            term = weights[ci] * np.abs(bx) ** 2
            resid2 = term if resid2 is None else resid2 + term
        margin = complex_field.margin + order // 2
    else:
        raise ValueError(f"wave_residual does not apply to sector {sector}")

    peak = float(np.abs(vals).max())
    if peak == 0.0:
        raise EmptyMask("field is identically zero")
    resid = np.sqrt(resid2) / peak
    mask = Mask(lat, interior_mask(lat, margin), margin)
    mask.require_nonempty("wave-equation mask")
    return _report("wave_equation", sector, lat, resid, mask,
                   claim="classical wave operator annihilates the full "
                         "complex solution",
                   extra={"normalization": "peak component magnitude"})


def alignment_residual(xi: CovectorField, rhs: CovectorField, m: MetricSpec,
                       epsilon_rel=0.05):
    """Fraction of the curved-operator output orthogonal to the polarization.

    A scalar dispersion relation requires the operator output ``X^b`` to be
    parallel to ``xi^b``; the residual is ``|X_perp| / |X|`` pointwise,
    kept where ``|X|`` exceeds ``epsilon_rel`` of its peak and the
    polarization norm is non-degenerate.  An identically vanishing ``X``
    (plane waves) leaves nothing to align and raises :class:`EmptyMask`.
    """
    lat = xi.lattice
    if rhs.lattice != lat:
        raise LatticeMismatch("polarization and operator output lattices differ")
    t = lat.spacetime_coords()[0]
    ginv = inverse_metric_diag(m, t)
    xiv = xi.values
    Xv = rhs.values

    xi_up = np.stack([ginv[mu] * xiv[..., mu] for mu in range(4)], axis=-1)
    norm2 = (xiv * xi_up).sum(axis=-1)
    norm2_scale = (np.abs(xi_up) * np.abs(xiv)).sum(axis=-1)
    X_mag = np.sqrt((Xv ** 2).sum(axis=-1))
    X_peak = float(X_mag.max())
    # Second differences of the polarization amplitude cannot be resolved
    # below the rounding scale of the stencil; an operator output under that
    # floor (exactly zero for plane waves, whose amplitude is constant) has
    # no direction to compare against.
    rounding_floor = (64.0 * np.finfo(np.float64).eps
                      * float(np.abs(xiv).max())
                      * sum(1.0 / (h * h) for h in lat.spacing))
    if X_peak <= rounding_floor:
        raise EmptyMask("operator output is at rounding level everywhere "
                        "(identically zero for exact null modes); nothing "
                        "to align")

    interior = interior_mask(lat, rhs.margin)
    pol_ok = np.abs(norm2) >= epsilon_rel * float(norm2_scale.max())
    if not np.any(pol_ok & interior):
        raise NullPolarization("polarization norm is degenerate everywhere")
    keep = interior & pol_ok & (X_mag >= epsilon_rel * X_peak)
    mask = Mask(lat, keep, rhs.margin)
    if mask.count == 0:
        raise EmptyMask("operator output is below threshold everywhere "
                        "(identically zero for exact null modes)")

    lam = np.zeros(lat.shape)
    lam[keep] = (xiv[keep] * Xv[keep]).sum(axis=-1) / norm2[keep]
    perp = Xv - lam[..., None] * xi_up
    perp_mag = np.sqrt((perp ** 2).sum(axis=-1))
    resid = np.zeros(lat.shape)
    resid[keep] = perp_mag[keep] / X_mag[keep]
    return _report("alignment", Sector.EM_CURVED, lat, resid, mask,
                   claim="curved wave operator output is parallel to the "
                         "polarization (scalar dispersion relation)",
                   extra={"rhs_peak": X_peak})


def convergence_study(run_check, base_lattice: Lattice, levels=3,
                      zero_floor=ZERO_FLOOR):
    """Run a check at h, h/2, h/4, ... and measure convergence orders.

    ``run_check`` maps a lattice to a :class:`ResidualReport`.  Orders are
    ``log2(r_i / r_(i+1))`` of successive masked maxima; pairs touching a
    residual at or below ``zero_floor`` give a ``None`` (NA) order, since
    machine-zero residuals carry no rate information.  Returns the
    base-level report with ``orders`` filled and per-level maxima in
    ``extra``.  :class:`MemoryCap` failures name the level that tripped.
    """
    if levels < 2:
        raise ValueError(f"a convergence study needs >= 2 levels, got {levels}")
    lat = base_lattice
    maxes = []
    base_report = None
    for level in range(levels):
        report = run_check(lat)
        if base_report is None:
            base_report = report
        maxes.append(report.masked_max)
        if level < levels - 1:
            try:
                lat = lat.refined()
            except MemoryCap as exc:
                raise MemoryCap(f"refinement level {level + 1}: {exc}") from exc
    orders = []
    for r0, r1 in zip(maxes, maxes[1:]):
        if r0 <= zero_floor or r1 <= zero_floor:
            orders.append(None)
        else:
            orders.append(math.log2(r0 / r1))
    extra = dict(base_report.extra)
    extra["level_masked_max"] = maxes
    return replace(base_report, orders=orders, extra=extra)


def scissor_check(sol: AnalyticSolution, lattice: Lattice):
    """Two-null-plane-wave identity for super-luminal modulated modes.

    ``U(y) e^{i k (x - v t)}`` with ``U = cos(kappa y)`` equals the equal
    superposition of the null rays ``exp(i (k x +/- kappa y - omega t))``,
    ``omega = k v``.  The identity residual is sampled (pure algebra, no
    stencils); the null defect ``k^2 + kappa^2 - omega^2 / c^2`` is formed
    in exact rational arithmetic from the solution parameters, where it
    cancels identically.
    """
    if sol.params.get("branch") != "cos":
        raise BranchDomainError(
            "the two-wave identity requires the super-luminal cos branch")
    k = sol.params["k"]
    v = sol.params["v"]
    c = sol.params["c"]
    amplitude = sol.params.get("amplitude", 1.0)
    kappa = sol.params["kappa"]
    omega = k * v

    kq, vq, cq = Fraction(k), Fraction(v), Fraction(c)
    kappa_sq = kq * kq * (vq * vq / (cq * cq) - 1)
    null_defect = kq * kq + kappa_sq - (kq * vq) * (kq * vq) / (cq * cq)
    exact_null = (null_defect == 0)

    t, x, y, z = lattice.spacetime_coords()
    u = np.broadcast_to(np.asarray(sol.evaluator(t, x, y, z))
                        if sol.kind == "scalar"
                        else np.asarray(sol.evaluator(t, x, y, z)[-1]),
                        lattice.shape)
    ray_plus = np.exp(1j * (k * x + kappa * y - omega * t))
    ray_minus = np.exp(1j * (k * x - kappa * y - omega * t))
    recombined = 0.5 * amplitude * (ray_plus + ray_minus)
    resid = np.abs(u - recombined)

    mask = Mask(lattice, np.ones(lattice.shape, dtype=bool), 0)
    return _report(
        "scissor", sol.sector, lattice, resid, mask,
        claim="modulated mode = equal superposition of two null plane waves; "
              "constituents satisfy k^2 + kappa^2 - omega^2/c^2 = 0",
        extra={
            "kappa": kappa,
            "omega": omega,
            "null_defect_exact_zero": bool(exact_null),
            "null_defect_rational": f"{null_defect}",
        })


def _sample_field(sol: AnalyticSolution, lattice: Lattice):
    if sol.kind == "scalar":
        return sample_scalar(lattice, sol.evaluator)
    if sol.kind == "covector":
        return sample_covector(lattice, sol.evaluator)
    if sol.kind == "symtensor":
        return sample_symtensor(lattice, sol.evaluator)
    raise ValueError(f"unknown field kind {sol.kind!r}")  # pragma: no cover


def _apply_perturbation(sol: AnalyticSolution, field, perturb):
    """Detune the phase speed of a sampled mode (negative control).

    ``perturb = {"phase_speed_factor": f}`` multiplies the field by the
    rotor ``exp(-i k (f - 1) v T(t))`` (``T`` = conformal-like time integral
    on expanding backgrounds, plain ``t`` on flat ones), turning an exact
    solution into one whose frequency is off by the factor ``f``.  The
    dispersion residual then plateaus at ``|k^2 v^2 (1 - f^2) / c^2|``
    instead of converging.
    """
    knobs = dict(perturb)
    f = knobs.pop("phase_speed_factor", None)
    if knobs:
        raise ValueError(f"unknown perturbation keys: {sorted(knobs)}")
    if f is None or f == 1.0:
        return field
    k = sol.params.get("k")
    v = sol.params.get("v")
    if k is None or v is None:
        raise ValueError("phase-speed detuning needs a modulated solution "
                         "carrying k and v parameters")
    t = field.lattice.spacetime_coords()[0]
    if sol.metric.kind == "frw":
        tau = sol.metric.scale_factor.integral_inv(np.asarray(t, dtype=np.float64))
    else:
        tau = np.asarray(t, dtype=np.float64)
    rotor = np.exp(-1j * k * (f - 1.0) * v * tau)
    if field.n_component_dims:
        rotor = rotor[..., None]
    return type(field)(field.lattice, field.values * rotor, field.margin)


def _amp_squared(amp, m: MetricSpec, euclidean=False):
    """Squared-amplitude density for the continuity flux.

    Scalars give ``A^2``.  For polarization fields the components are
    contracted either with the inverse metric (``g^{mm} xi_m^2``; the
    density entering the conserved current of the curved wave equation) or
    with the identity (``sum xi_m^2``; the naive Euclidean density, which
    on expanding backgrounds is *not* conserved).
    """
    lat = amp.lattice
    vals = amp.values
    if amp.n_component_dims == 0:
        out = vals * vals
    else:
        ginv = None if euclidean else inverse_metric_diag(
            m, lat.spacetime_coords()[0])
        out = None
        if isinstance(amp, CovectorField):
            for mu in range(4):
                term = vals[..., mu] ** 2
                if ginv is not None:
                    term = ginv[mu] * term
                out = term if out is None else out + term
        else:
            for idx, (mu, nu) in enumerate(SYM_PAIRS):
                term = SYM_WEIGHTS[idx] * vals[..., idx] ** 2
                if ginv is not None:
                    term = ginv[mu] * ginv[nu] * term
                out = term if out is None else out + term
    out = np.ascontiguousarray(np.broadcast_to(out, lat.shape), dtype=np.float64)
    return ScalarField(lat, out, amp.margin)


def _expansion_drift_prediction(sol: AnalyticSolution, amp2: ScalarField,
                                m: MetricSpec):
    """Analytic divergence of the Euclidean-density flux on an expanding
    background: ``2 (da/dt) k v amp2 / (c^2 a^2)``."""
    k = sol.params.get("k")
    v = sol.params.get("v")
    if m.kind != "frw" or k is None or v is None:
        return None
    t = amp2.lattice.spacetime_coords()[0]
    a = m.scale_factor.a(np.asarray(t, dtype=np.float64))
    a_dot = m.scale_factor.a_dot(np.asarray(t, dtype=np.float64))
    return 2.0 * a_dot * k * v * amp2.values / (m.c ** 2 * a ** 2)


def suite_for(sol: AnalyticSolution):
    """Default check list for a catalog solution, by sector and background."""
    sector = Sector(sol.sector)
    if sector is Sector.NONREL:
        raise ValueError("nonrelativistic packets are verified through the "
                         "evolution module, not the lattice suite")
    checks = ["wave_equation", "dispersion"]
    if sol.expected_vb is not None:
        checks.append("expected_vb")
    if sector in (Sector.EM_FLAT, Sector.EM_CURVED, Sector.GW):
        checks.append("gauge")
    if sector is Sector.EM_CURVED and sol.expected_class != CLASS_NULL:
        # Exact null modes drive the curved operator to zero; there is
        # nothing to align (alignment_residual raises EmptyMask).
        checks.append("alignment")
    checks.append("continuity")
    if sol.metric.kind == "frw":
        checks.append("continuity_euclidean")
    return checks


def run_solution_suite(sol: AnalyticSolution, lattice: Lattice, *, order=2,
                       epsilon_rel=None, checks=None,
                       tol_rel=CLASSIFY_TOL_REL, decompose_mode="auto",
                       perturb=None):
    """Sample a catalog solution and run its residual checks.

    Returns a dict of :class:`ResidualReport` keyed by check name, in a
    deterministic order.  ``perturb`` (see :func:`_apply_perturbation`)
    detunes the mode first, turning the suite into a negative control.
    ``epsilon_rel`` is the node-exclusion threshold forwarded to the Bohm
    evaluators (their default when ``None``).
    """
    sector = Sector(sol.sector)
    if sector is Sector.NONREL:
        raise ValueError("nonrelativistic packets are verified through the "
                         "evolution module, not the lattice suite")
    if checks is None:
        checks = suite_for(sol)
    checks = list(checks)
    known = {"wave_equation", "dispersion", "expected_vb", "gauge",
             "alignment", "continuity", "continuity_euclidean", "scissor"}
    unknown = sorted(set(checks) - known)
    if unknown:
        raise ValueError(f"unknown checks {unknown}; available: "
                         f"{sorted(known)}")
    m = sol.metric
    bohm_kw = {"order": order}
    if epsilon_rel is not None:
        bohm_kw["epsilon_rel"] = epsilon_rel

    needs_pair = bool({"dispersion", "expected_vb", "gauge", "alignment",
                       "continuity", "continuity_euclidean"} & set(checks))
    needs_kf = bool({"dispersion", "gauge", "continuity",
                     "continuity_euclidean"} & set(checks))

    field = _sample_field(sol, lattice)
    if perturb:
        field = _apply_perturbation(sol, field, perturb)
    amp = pair = None
    if needs_pair:
        if field.n_component_dims == 0:
            pair = decompose(field, mode=decompose_mode)
            amp = pair.amplitude
        else:
            amp, pair = decompose_components(field, mode=decompose_mode)

    reports = {}
    if "wave_equation" in checks:
        reports["wave_equation"] = wave_residual(field, m, sector, order=order)
    del field  # large complex array; the remaining checks use amp and phase

    kf = wavevector(pair, order=order) if needs_kf else None
    if "dispersion" in checks or "expected_vb" in checks:
        vb = bohm_potential(sector, amp, m, **bohm_kw)
        if "dispersion" in checks:
            reports["dispersion"] = dispersion_residual(
                kf, vb, m, tol_rel=tol_rel)
        if "expected_vb" in checks and sol.expected_vb is not None:
            reports["expected_vb"] = expected_vb_residual(vb, sol)
        del vb
    if "gauge" in checks:
        alg, diff = gauge_residual(amp, kf, m, sector, order=order)
        reports["gauge_algebraic"] = alg
        reports["gauge_differential"] = diff
    if "alignment" in checks:
        rhs = curved_maxwell_operator(m, amp, order=order)
        align_kw = {} if epsilon_rel is None else {"epsilon_rel": epsilon_rel}
        reports["alignment"] = alignment_residual(amp, rhs, m, **align_kw)
    if "continuity" in checks:
        amp2 = _amp_squared(amp, m, euclidean=False)
        reports["continuity"] = continuity_residual(
            kf, amp2, m, sector, order=order)
    if "continuity_euclidean" in checks:
        amp2 = _amp_squared(amp, m, euclidean=True)
        reports["continuity_euclidean"] = continuity_residual(
            kf, amp2, m, sector, status=STATUS_REPORTED, order=order,
            claim="Euclidean-contracted amplitude density drifts at "
                  "2 (da/dt) k v amp2 / (c^2 a^2) on an expanding background",
            prediction=_expansion_drift_prediction(sol, amp2, m),
            check_name="continuity_euclidean")
    if "scissor" in checks:
        reports["scissor"] = scissor_check(sol, lattice)
    return reports


def run_static_profile(sol: AnalyticSolution, lattice: Lattice, *, order=2,
                       epsilon_rel=None):
    """Check a static nonrelativistic amplitude profile's quantum potential.

    For time-independent real profiles there is no phase to track; the
    check is purely that ``-(hbar^2 / 2m) lap(A) / A`` reproduces the
    declared closed form (zero for harmonic profiles).  Returns a dict with
    the single ``expected_vb`` report.
    """
    if Sector(sol.sector) is not Sector.NONREL:
        raise ValueError(f"{sol.name} is not a static nonrelativistic profile")
    field = _sample_field(sol, lattice)
    if field.is_complex:
        raise ValueError("static profiles must be real amplitudes")
    kw = {"order": order,
          "hbar": sol.params.get("hbar", 1.0),
          "mass": sol.params.get("mass", 1.0)}
    if epsilon_rel is not None:
        kw["epsilon_rel"] = epsilon_rel
    vb = bohm_potential(Sector.NONREL, field, sol.metric, **kw)
    return {"expected_vb": expected_vb_residual(vb, sol)}
