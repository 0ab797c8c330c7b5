"""Closed-form wave solutions used as oracles by the verification pipelines.

Every entry packages an exact solution of its sector's classical wave
equation together with the closed-form Bohm potential its amplitude profile
generates, the luminality class its local wavevector should fall in, and
(for packets) closed-form motion oracles.  The central family consists of
transversally modulated traveling waves

    u(t, x, y) = U(y) * exp(i k (x - v t)),

which solve the flat wave equation exactly for any phase speed ``v`` when
the profile is matched to it:

* ``v > c``:  ``U = cos(kappa y)`` with ``kappa = k sqrt(v^2/c^2 - 1)``;
  the local wavevector is timelike and ``box(U)/U = k^2 (1 - v^2/c^2) < 0``.
* ``v < c``:  ``U = cosh(kappa y)`` with ``kappa = k sqrt(1 - v^2/c^2)``;
  the wavevector is spacelike and ``box(U)/U = +kappa^2 > 0``.
* ``v = c``:  constant profile, the ordinary null plane wave.

Both branches satisfy ``k.k = box(U)/U`` with the same closed form
``k^2 (1 - v^2/c^2)``; expected values stored here are validated against
direct evaluation of the defining ratio in the unit tests, and a structured
note records the one case where a differently signed closed form is
sometimes attached to the sub-luminal branch (see ``branch_sign_warning``).
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import special

from .bohm import Sector
from .errors import BranchDomainError, ZeroWavenumber
from .geometry import MetricSpec, ScaleFactor

__all__ = [
    "AnalyticSolution",
    "plane_wave",
    "modulated_scalar",
    "modulated_em_flat",
    "modulated_em_frw",
    "modulated_gw",
    "gaussian_packet",
    "airy_packet",
    "harmonic_profile",
    "list_catalog",
    "build_solution",
    "CLASS_TIMELIKE",
    "CLASS_NULL",
    "CLASS_SPACELIKE",
    "CLASS_NA",
]

CLASS_TIMELIKE = "timelike"
CLASS_NULL = "null"
CLASS_SPACELIKE = "spacelike"
CLASS_NA = "na"


@dataclass(frozen=True)
class AnalyticSolution:
    """A closed-form solution plus the values the pipelines should recover."""

    name: str
    sector: Sector
    kind: str                       # "scalar" | "covector" | "symtensor"
    metric: MetricSpec
    params: dict
    expected_class: str
    evaluator: Callable             # (t, x, y, z) -> samples (see ``kind``)
    expected_vb: Callable | None    # (t, x, y, z) -> closed-form potential
    oracles: dict = field(default_factory=dict)
    notes: dict = field(default_factory=dict)

    def describe(self):
        """Plain-data row for catalog listings and reports."""
        return {
            "name": self.name,
            "sector": self.sector.value,
            "kind": self.kind,
            "params": dict(self.params),
            "expected_class": self.expected_class,
            "claim": self.notes.get("claim", ""),
        }


def _require_wavenumber(k):
    k = float(k)
    if k == 0.0:
        raise ZeroWavenumber("the wavenumber k must be nonzero")
    return k


def _branch_for(v, c, branch):
    if branch is None:
        if v > c:
            return "cos"
        if v < c:
            return "cosh"
        raise BranchDomainError(
            "v == c has a constant profile; use plane_wave instead")
    if branch == "cos" and v <= c:
        raise BranchDomainError(
            f"the cos branch needs a super-luminal phase speed, got v={v} <= c={c}")
    if branch == "cosh" and v >= c:
        raise BranchDomainError(
            f"the cosh branch needs a sub-luminal phase speed, got v={v} >= c={c}")
    if branch not in ("cos", "cosh"):
        raise BranchDomainError(f"branch must be 'cos' or 'cosh', got {branch!r}")
    return branch


def _modulation(k, v, c, branch):
    """Transverse wavenumber ``kappa`` and profile function for a branch."""
    if branch == "cos":
        kappa = abs(k) * math.sqrt(v * v / (c * c) - 1.0)
        return kappa, (lambda y: np.cos(kappa * y))
    kappa = abs(k) * math.sqrt(1.0 - v * v / (c * c))
    return kappa, (lambda y: np.cosh(kappa * y))


def _branch_notes(k, v, c, branch, vb_formula):
    notes = {"claim": f"k.k = box(U)/U = {vb_formula}", "branch": branch}
    if branch == "cosh":
        kk = k * k * (1.0 - v * v / (c * c))
        notes["branch_sign_warning"] = {
            "used_value": kk,
            "used_form": "k^2 (1 - v^2/c^2) = +kappa^2",
            "rejected_form": "k^2 (v^2/c^2 - 1)",
            "detail": (
                "direct evaluation of box(cosh(kappa y))/cosh(kappa y) gives "
                "+kappa^2 > 0, so the sub-luminal branch has a positive "
                "potential and a spacelike wavevector; the sign-flipped "
                "closed form sometimes attached to this branch contradicts "
                "that direct evaluation and is not used"),
        }
    return notes


def plane_wave(k=1.0, c=1.0, amplitude=1.0, sector="scalar"):
    """Null plane wave ``amplitude * exp(i k (x - c t))``; Bohm potential 0.

    Available in every relativistic sector; for the non-scalar sectors the
    same scalar mode rides on the ``z`` (or ``zz``) polarization component,
    exactly as in the modulated constructors but with a constant profile, so
    amplitude, gauge, and dispersion checks are all classically null.
    ``sector="em_curved"`` runs the flat mode through the curved-background
    Maxwell operator (on a Minkowski metric), exercising that code path.
    """
    k = _require_wavenumber(k)
    c = float(c)
    amplitude = float(amplitude)
    sector = Sector(sector)
    if sector is Sector.NONREL:
        raise ValueError("the nonrelativistic sector has no null plane wave; "
                         "use one of the relativistic sectors")

    def scalar_wave(t, x, y, z):
        return amplitude * np.exp(1j * k * (x - c * t))

    if sector is Sector.SCALAR:
        kind = "scalar"
        evaluator = scalar_wave
    elif sector in (Sector.EM_FLAT, Sector.EM_CURVED):
        kind = "covector"

        def evaluator(t, x, y, z):
            zero = np.zeros(np.broadcast(t, x, y, z).shape)
            return (zero, zero, zero, scalar_wave(t, x, y, z))
    else:
        kind = "symtensor"

        def evaluator(t, x, y, z):
            zero = np.zeros(np.broadcast(t, x, y, z).shape)
            comps = [zero] * 10
            comps[9] = scalar_wave(t, x, y, z)
            return tuple(comps)

    def expected_vb(t, x, y, z):
        return np.zeros(np.broadcast(t, x, y, z).shape)

    return AnalyticSolution(
        name=f"plane_wave_{sector.value}", sector=sector, kind=kind,
        metric=MetricSpec.minkowski(c),
        params={"k": k, "c": c, "amplitude": amplitude, "sector": sector.value},
        expected_class=CLASS_NULL, evaluator=evaluator, expected_vb=expected_vb,
        notes={"claim": "k.k = V_B = 0 (constant amplitude, null wave)"})


def modulated_scalar(k=1.0, v=2.0, c=1.0, amplitude=1.0, branch=None):
    """Scalar traveling wave with a transverse profile, exact at any ``v``.

    ``u = amplitude * U(y) * exp(i k (x - v t))`` with the profile matched to
    the phase speed (see the module docstring).  The full complex field
    solves ``box(u) = 0`` exactly; the amplitude alone carries the Bohm
    potential ``box(U)/U = k^2 (1 - v^2/c^2)``.
    """
    k = _require_wavenumber(k)
    v, c, amplitude = float(v), float(c), float(amplitude)
    branch = _branch_for(v, c, branch)
    kappa, profile = _modulation(k, v, c, branch)
    kk = k * k * (1.0 - v * v / (c * c))

    def evaluator(t, x, y, z):
        return amplitude * profile(y) * np.exp(1j * k * (x - v * t))

    def expected_vb(t, x, y, z):
        return np.full(np.broadcast(t, x, y, z).shape, kk)

    notes = _branch_notes(k, v, c, branch, "k^2 (1 - v^2/c^2)")
    return AnalyticSolution(
        name=f"modulated_scalar_{branch}", sector=Sector.SCALAR, kind="scalar",
        metric=MetricSpec.minkowski(c),
        params={"k": k, "v": v, "c": c, "amplitude": amplitude, "branch": branch,
                "kappa": kappa},
        expected_class=CLASS_TIMELIKE if branch == "cos" else CLASS_SPACELIKE,
        evaluator=evaluator, expected_vb=expected_vb, notes=notes)


def modulated_em_flat(k=1.0, v=2.0, c=1.0, amplitude=1.0, branch=None):
    """z-polarized electromagnetic analogue of :func:`modulated_scalar`.

    The potential covector is ``A = (0, 0, 0, U(y) exp(i k (x - v t)))``; it
    satisfies the flat Maxwell equations and the Lorenz condition exactly
    (the polarization direction never appears among the dependencies).
    """
    k = _require_wavenumber(k)
    v, c, amplitude = float(v), float(c), float(amplitude)
    branch = _branch_for(v, c, branch)
    kappa, profile = _modulation(k, v, c, branch)
    kk = k * k * (1.0 - v * v / (c * c))

    def evaluator(t, x, y, z):
        a_z = amplitude * profile(y) * np.exp(1j * k * (x - v * t))
        zero = np.zeros(np.broadcast(t, x, y, z).shape)
        return (zero, zero, zero, a_z)

    def expected_vb(t, x, y, z):
        return np.full(np.broadcast(t, x, y, z).shape, kk)

    notes = _branch_notes(k, v, c, branch, "k^2 (1 - v^2/c^2)")
    return AnalyticSolution(
        name=f"modulated_em_flat_{branch}", sector=Sector.EM_FLAT, kind="covector",
        metric=MetricSpec.minkowski(c),
        params={"k": k, "v": v, "c": c, "amplitude": amplitude, "branch": branch,
                "kappa": kappa},
        expected_class=CLASS_TIMELIKE if branch == "cos" else CLASS_SPACELIKE,
        evaluator=evaluator, expected_vb=expected_vb, notes=notes)


def modulated_em_frw(k=1.0, v=2.0, c=1.0, amplitude=1.0, branch=None,
                     scale_factor=None):
    """z-polarized traveling wave on a spatially flat FRW background.

    ``A_z = U(y) exp(i k x - i k v I(t))`` with ``I`` an antiderivative of
    ``1/a(t)`` solves the curved Maxwell equations exactly for the same
    profile matching as in flat spacetime.  The local wavevector has
    ``k_t = -k v / a`` and ``k_x = k``, giving

        k.k = (k^2 / a(t)^2) (1 - v^2/c^2) = V_B(t),

    so the potential redshifts with the scale factor but the luminality
    class is preserved.
    """
    k = _require_wavenumber(k)
    v, c, amplitude = float(v), float(c), float(amplitude)
    if scale_factor is None:
        scale_factor = ScaleFactor.exponential(0.1)
    elif isinstance(scale_factor, dict):
        scale_factor = ScaleFactor(**scale_factor)
    branch = _branch_for(v, c, branch)
    kappa, profile = _modulation(k, v, c, branch)
    metric = MetricSpec.frw(scale_factor, c=c)
    kk = k * k * (1.0 - v * v / (c * c))

    def evaluator(t, x, y, z):
        phase = k * x - k * v * scale_factor.integral_inv(t)
        zero = np.zeros(np.broadcast(t, x, y, z).shape)
        a_z = amplitude * profile(y) * np.exp(1j * phase)
        return (zero, zero, zero, a_z)

    def expected_vb(t, x, y, z):
        a = scale_factor.a(t)
        return np.broadcast_to(kk / (a * a), np.broadcast(t, x, y, z).shape)

    notes = _branch_notes(k, v, c, branch, "(k^2 / a(t)^2) (1 - v^2/c^2)")
    notes["claim"] = "k.k = (k^2 / a(t)^2) (1 - v^2/c^2) = V_B(t)"
    return AnalyticSolution(
        name=f"modulated_em_frw_{branch}", sector=Sector.EM_CURVED, kind="covector",
        metric=metric,
        params={"k": k, "v": v, "c": c, "amplitude": amplitude, "branch": branch,
                "kappa": kappa, "scale_factor": dataclasses.asdict(scale_factor)},
        expected_class=CLASS_TIMELIKE if branch == "cos" else CLASS_SPACELIKE,
        evaluator=evaluator, expected_vb=expected_vb, notes=notes)


def modulated_gw(k=1.0, v=2.0, c=1.0, amplitude=1.0, branch=None):
    """Gravitational-wave analogue: a zz-polarized metric perturbation.

    Only the ``zz`` component is nonzero, ``zeta_zz = U(y) exp(i k (x - v t))``;
    its divergence gauge condition holds exactly because the polarization
    index never appears among the dependencies.  The background curvature
    term of the potential is exactly zero on flat spacetime, leaving

        k.k = box(U)/U = k^2 (1 - v^2/c^2).
    """
    k = _require_wavenumber(k)
    v, c, amplitude = float(v), float(c), float(amplitude)
    branch = _branch_for(v, c, branch)
    kappa, profile = _modulation(k, v, c, branch)
    kk = k * k * (1.0 - v * v / (c * c))

    def evaluator(t, x, y, z):
        u = amplitude * profile(y) * np.exp(1j * k * (x - v * t))
        zero = np.zeros(np.broadcast(t, x, y, z).shape)
        comps = [zero] * 10
        comps[9] = u          # packed position of the zz component
        return tuple(comps)

    def expected_vb(t, x, y, z):
        return np.full(np.broadcast(t, x, y, z).shape, kk)

    notes = _branch_notes(k, v, c, branch, "k^2 (1 - v^2/c^2)")
    return AnalyticSolution(
        name=f"modulated_gw_{branch}", sector=Sector.GW, kind="symtensor",
        metric=MetricSpec.minkowski(c),
        params={"k": k, "v": v, "c": c, "amplitude": amplitude, "branch": branch,
                "kappa": kappa},
        expected_class=CLASS_TIMELIKE if branch == "cos" else CLASS_SPACELIKE,
        evaluator=evaluator, expected_vb=expected_vb, notes=notes)


def gaussian_packet(sigma=1.0, x0=0.0, p0=0.0, hbar=1.0, mass=1.0):
    """Free 1-d Gaussian packet with closed-form evolution.

    At ``t = 0``: ``psi = (2 pi sigma^2)^(-1/4)
    exp(-(x - x0)^2 / (4 sigma^2) + i p0 (x - x0) / hbar)``.  The evaluator
    implements the exact free evolution for any ``t``; the width oracle is

        width(t) = sigma * sqrt(1 + (hbar t / (2 m sigma^2))^2)

    and the centroid moves at ``p0 / m``.
    """
    sigma, x0, p0 = float(sigma), float(x0), float(p0)
    hbar, mass = float(hbar), float(mass)
    if sigma <= 0.0:
        raise ValueError(f"sigma must be positive, got {sigma}")

    def evaluator(t, x, y, z):
        s_t = sigma * (1.0 + 1j * hbar * np.asarray(t, dtype=np.float64)
                       / (2.0 * mass * sigma * sigma))
        xi = x - x0 - p0 * np.asarray(t, dtype=np.float64) / mass
        norm = (2.0 * np.pi * s_t ** 2) ** (-0.25)
        phase = p0 * (x - x0 - p0 * np.asarray(t, dtype=np.float64)
                      / (2.0 * mass)) / hbar
        out = norm * np.exp(-xi ** 2 / (4.0 * sigma * s_t) + 1j * phase)
        return np.broadcast_to(out, np.broadcast(t, x, y, z).shape)

    def width(t):
        tau = hbar * np.asarray(t, dtype=np.float64) / (2.0 * mass * sigma * sigma)
        return sigma * np.sqrt(1.0 + tau * tau)

    def centroid(t):
        return x0 + p0 * np.asarray(t, dtype=np.float64) / mass

    return AnalyticSolution(
        name="gaussian_packet", sector=Sector.NONREL, kind="scalar",
        metric=MetricSpec.minkowski(1.0),
        params={"sigma": sigma, "x0": x0, "p0": p0, "hbar": hbar, "mass": mass},
        expected_class=CLASS_NA, evaluator=evaluator, expected_vb=None,
        oracles={"width": width, "centroid": centroid},
        notes={"claim": "free packet width grows as "
                        "sigma sqrt(1 + (hbar t / 2 m sigma^2)^2)"})


def airy_packet(B=1.0, hbar=1.0, mass=1.0, taper_start=None, taper_width=None):
    """Non-spreading accelerating Airy packet for the free particle.

    ``psi(x, t) = Ai[(B / hbar^(2/3)) (x - B^3 t^2 / (4 m^2))] *
    exp[i (B^3 t / (2 m hbar)) (x - B^3 t^2 / (6 m^2))]`` solves the free
    equation exactly; every feature of ``|psi|`` accelerates at
    ``B^3 / (2 m^2)`` although no external force acts.  The first peak sits
    at ``x_peak(t) = hbar^(2/3) xi_1 / B + B^3 t^2 / (4 m^2)`` where
    ``xi_1`` is the first stationary point of Ai.

    The optional taper multiplies the oscillatory tail (``x < taper_start``)
    by a half-Gaussian of scale ``taper_width`` to make the state
    normalizable for grid evolution; oracles then hold approximately, for
    features away from the taper.
    """
    B, hbar, mass = float(B), float(hbar), float(mass)
    if B <= 0.0:
        raise ValueError(f"B must be positive, got {B}")
    accel = B ** 3 / (2.0 * mass * mass)
    xi1 = float(special.ai_zeros(1)[1][0])   # first zero of Ai', Ai's first peak

    def evaluator(t, x, y, z):
        t = np.asarray(t, dtype=np.float64)
        arg = (B / hbar ** (2.0 / 3.0)) * (x - B ** 3 * t * t / (4.0 * mass * mass))
        phase = (B ** 3 * t / (2.0 * mass * hbar)) \
            * (x - B ** 3 * t * t / (6.0 * mass * mass))
        out = special.airy(arg)[0] * np.exp(1j * phase)
        if taper_start is not None:
            w = float(taper_width if taper_width is not None else 1.0)
            dist = np.minimum(x - float(taper_start), 0.0)
            out = out * np.exp(-(dist / w) ** 2)
        return np.broadcast_to(out, np.broadcast(t, x, y, z).shape)

    def peak_position(t):
        t = np.asarray(t, dtype=np.float64)
        return hbar ** (2.0 / 3.0) * xi1 / B + B ** 3 * t * t / (4.0 * mass * mass)

    return AnalyticSolution(
        name="airy_packet", sector=Sector.NONREL, kind="scalar",
        metric=MetricSpec.minkowski(1.0),
        params={"B": B, "hbar": hbar, "mass": mass,
                "taper_start": taper_start, "taper_width": taper_width},
        expected_class=CLASS_NA, evaluator=evaluator, expected_vb=None,
        oracles={"peak_position": peak_position, "acceleration": accel},
        notes={"claim": "force-free packet peak accelerates at B^3 / (2 m^2)"})


_PROFILES = {
    # profile -> (callable, laplacian identically zero, lap value if constant, claim)
    "saddle": (lambda x, y: x * x - y * y, True, 0.0,
               "harmonic amplitude x^2 - y^2 gives V_B identically 0"),
    "exp_cos": (lambda x, y: np.exp(x) * np.cos(y), True, 0.0,
                "harmonic amplitude exp(x) cos(y) gives V_B identically 0"),
    "quadratic": (lambda x, y: x * x, False, 2.0,
                  "non-harmonic control x^2 has lap(A) = 2, so "
                  "V_B = -(hbar^2/2m) 2/x^2"),
}


def harmonic_profile(profile="saddle", hbar=1.0, mass=1.0):
    """Static real 2-d amplitude profiles for the nonrelativistic sector.

    Harmonic profiles (``saddle``, ``exp_cos``) have identically vanishing
    Laplacian and hence an identically zero quantum potential regardless of
    magnitude; ``quadratic`` (``A = x^2``) is the non-harmonic control with
    ``V_B = -(hbar^2 / 2m) 2 / x^2``.  The polynomial profiles have degree
    two, so centered second differences evaluate their Laplacians with zero
    truncation error.
    """
    if profile not in _PROFILES:
        raise ValueError(f"profile must be one of {sorted(_PROFILES)}, got {profile!r}")
    fn, is_harmonic, lap_value, claim = _PROFILES[profile]
    hbar, mass = float(hbar), float(mass)

    def evaluator(t, x, y, z):
        return np.broadcast_to(fn(x, y), np.broadcast(t, x, y, z).shape)

    if is_harmonic:
        def expected_vb(t, x, y, z):
            return np.zeros(np.broadcast(t, x, y, z).shape)
    else:
        def expected_vb(t, x, y, z):
            a = fn(x, y)
            with np.errstate(divide="ignore", invalid="ignore"):
                vb = -(hbar * hbar / (2.0 * mass)) * lap_value / a
            vb = np.where(np.isfinite(vb), vb, 0.0)
            return np.broadcast_to(vb, np.broadcast(t, x, y, z).shape)

    return AnalyticSolution(
        name=f"harmonic_profile_{profile}", sector=Sector.NONREL, kind="scalar",
        metric=MetricSpec.minkowski(1.0),
        params={"profile": profile, "hbar": hbar, "mass": mass},
        expected_class=CLASS_NA, evaluator=evaluator, expected_vb=expected_vb,
        notes={"claim": claim, "harmonic": is_harmonic})


_FACTORIES = {
    "plane_wave": plane_wave,
    "modulated_scalar": modulated_scalar,
    "modulated_em_flat": modulated_em_flat,
    "modulated_em_frw": modulated_em_frw,
    "modulated_gw": modulated_gw,
    "gaussian_packet": gaussian_packet,
    "airy_packet": airy_packet,
    "harmonic_profile": harmonic_profile,
}

_LISTING = [
    ("plane_wave", {"sector": "scalar"}),
    ("plane_wave", {"sector": "em_flat"}),
    ("plane_wave", {"sector": "em_curved"}),
    ("plane_wave", {"sector": "gw"}),
    ("modulated_scalar", {"branch": "cos", "v": 2.0}),
    ("modulated_scalar", {"branch": "cosh", "v": 0.5}),
    ("modulated_em_flat", {"branch": "cos", "v": 2.0}),
    ("modulated_em_flat", {"branch": "cosh", "v": 0.5}),
    ("modulated_em_frw", {"branch": "cos", "v": 2.0}),
    ("modulated_em_frw", {"branch": "cosh", "v": 0.5}),
    ("modulated_gw", {"branch": "cos", "v": 2.0}),
    ("modulated_gw", {"branch": "cosh", "v": 0.5}),
    ("gaussian_packet", {}),
    ("airy_packet", {}),
    ("harmonic_profile", {"profile": "saddle"}),
    ("harmonic_profile", {"profile": "exp_cos"}),
    ("harmonic_profile", {"profile": "quadratic"}),
]


_ALIASES = None
_VARIANT_KEYS = ("sector", "branch", "profile")


def _alias_map():
    """Listed instance names (e.g. ``modulated_scalar_cos``) -> build args."""
    global _ALIASES
    if _ALIASES is None:
        _ALIASES = {_FACTORIES[fac](**params).name: (fac, params)
                    for fac, params in _LISTING}
    return _ALIASES


def build_solution(name, params=None):
    """Instantiate a catalog solution by name and parameter dict.

    ``name`` is either a factory name (``modulated_scalar`` with the variant
    chosen through params) or a listed instance name
    (``modulated_scalar_cos``), whose variant-defining params then cannot be
    overridden.
    """
    params = dict(params or {})
    if name in _FACTORIES:
        return _FACTORIES[name](**params)
    alias = _alias_map().get(name)
    if alias is None:
        raise KeyError(f"unknown solution {name!r}; catalog has "
                       f"{sorted(_FACTORIES)} plus the listed variants "
                       f"{sorted(_alias_map())}")
    factory, base = alias
    for key in _VARIANT_KEYS:
        if key in base and params.get(key, base[key]) != base[key]:
            raise ValueError(f"{name!r} fixes {key}={base[key]!r}; build "
                             f"{factory!r} directly to change it")
    return _FACTORIES[factory](**{**base, **params})


def list_catalog():
    """Describe every catalog variant (name, sector, params, expectations)."""
    return [build_solution(name, params).describe() for name, params in _LISTING]
