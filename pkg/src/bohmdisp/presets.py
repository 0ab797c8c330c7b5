"""Named, ready-to-run CLI configurations.

Each preset is a plain config dict accepted by ``bohmdisp verify``,
``bohmdisp evolve``, or ``bohmdisp convergence``.  Together they cover the
full battery: modulated modes in every sector (flat and expanding
backgrounds, both modulation branches), exact null plane waves, the
two-null-wave decomposition identity, static amplitude profiles, and the
packet evolutions (spreading, phase-evolution separation, accelerating
Airy tracking).  Tolerances in the presets are the asserted bounds; checks
with status ``reported`` never gate the exit code.

Lattice extents for the modulated modes cover one period per axis, which
has a pleasant side effect: with the same number of points per period on
every axis, the discrete second differences of the two null constituents
pick up identical wavenumber distortion factors, so the discrete wave
residual of the full complex mode cancels to rounding.
"""

from __future__ import annotations

import copy
import math

__all__ = ["PRESETS", "get_preset", "list_presets"]

_PI = math.pi
_SLEPIAN_EXTENT = [_PI, 2.0 * _PI, 2.0 * _PI / math.sqrt(3.0)]
_SQRT2 = math.sqrt(2.0)


def _verify(name, params, lattice, tolerances, classification=None, **kw):
    config = {
        "task": "verify",
        "solution": {"name": name, "params": params},
        "lattice": lattice,
        "order": 2,
        "tolerances": tolerances,
    }
    if classification is not None:
        config["classification"] = classification
    config.update(kw)
    return config


PRESETS = {
    # Super-luminal modulated scalar mode: V_B = k^2 (1 - v^2/c^2) = -3.
    "scalar-slepian": _verify(
        "modulated_scalar", {"k": 1.0, "v": 2.0, "branch": "cos"},
        {"origin": [0.0, 0.0, 0.0], "extent": _SLEPIAN_EXTENT,
         "counts": [64, 64, 64]},
        {"expected_vb": 5.0e-3, "dispersion": 1.0e-2,
         "wave_equation": 1.0e-10, "continuity": 1.0e-10},
        classification="timelike"),
    "scalar-slepian-orders": {
        "task": "convergence",
        "solution": {"name": "modulated_scalar",
                     "params": {"k": 1.0, "v": 2.0, "branch": "cos"}},
        "lattice": {"origin": [0.0, 0.0, 0.0], "extent": _SLEPIAN_EXTENT,
                    "counts": [64, 64, 64]},
        "order": 2,
        "check": "expected_vb",
        "levels": 3,
        "order_window": {"target": 2.0, "halfwidth": 0.2},
    },
    # Sub-luminal branch: spacelike k.k, V_B = +3; the sign bookkeeping
    # note rides along in the report extras.
    "scalar-cosh": _verify(
        "modulated_scalar", {"k": 2.0, "v": 0.5, "branch": "cosh"},
        {"origin": [0.0, 0.0, 0.0], "extent": [2.0 * _PI, _PI, 1.0],
         "counts": [49, 49, 49]},
        {"expected_vb": 5.0e-3, "dispersion": 5.0e-3},
        classification="spacelike"),
    # Exact null plane wave: every residual at rounding level.
    "plane-wave-null": _verify(
        "plane_wave", {"sector": "scalar", "k": 1.0},
        {"origin": [0.0, 0.0], "extent": [2.0 * _PI, 2.0 * _PI],
         "counts": [65, 65]},
        {"expected_vb": 1.0e-12, "dispersion": 1.0e-12,
         "wave_equation": 1.0e-12},
        classification="null"),
    # Electromagnetic polarization carrying the same modulated mode.
    "em-flat": _verify(
        "modulated_em_flat", {"k": 1.0, "v": 2.0, "branch": "cos"},
        {"origin": [0.0, 0.0, 0.0], "extent": _SLEPIAN_EXTENT,
         "counts": [64, 64, 64]},
        {"expected_vb": 5.0e-3, "dispersion": 1.0e-2,
         "gauge_algebraic": 1.0e-10, "gauge_differential": 1.0e-10},
        classification="timelike"),
    "em-flat-orders": {
        "task": "convergence",
        "solution": {"name": "modulated_em_flat",
                     "params": {"k": 1.0, "v": 2.0, "branch": "cos"}},
        "lattice": {"origin": [0.0, 0.0, 0.0], "extent": _SLEPIAN_EXTENT,
                    "counts": [33, 33, 33]},
        "order": 2,
        "check": "expected_vb",
        "levels": 3,
        "order_window": {"target": 2.0, "halfwidth": 0.2},
    },
    # Photon mode on an exponentially expanding background; continuity is
    # reported in both contraction conventions, never asserted.
    "em-frw": _verify(
        "modulated_em_frw",
        {"k": 1.0, "v": 2.0, "branch": "cos",
         "scale_factor": {"model": "exponential", "a0": 1.0, "H": 0.1}},
        {"origin": [0.0, 0.0, 0.0],
         "spacing": [0.015625, 0.015625, 0.015625],
         "counts": [129, 33, 33]},
        {"expected_vb": 1.0e-2, "dispersion": 1.0e-2,
         "gauge_algebraic": 1.0e-10, "alignment": 1.0e-10},
        classification="timelike"),
    "em-frw-vb-orders": {
        "task": "convergence",
        "solution": {"name": "modulated_em_frw",
                     "params": {"k": 1.0, "v": 2.0, "branch": "cos",
                                "scale_factor": {"model": "exponential",
                                                 "a0": 1.0, "H": 0.1}}},
        "lattice": {"origin": [0.0, 0.0, 0.0],
                    "spacing": [0.015625, 0.015625, 0.015625],
                    "counts": [129, 33, 33]},
        "order": 2,
        "check": "expected_vb",
        "levels": 3,
        "order_window": {"target": 2.0, "halfwidth": 0.2},
    },
    "em-frw-wave-orders": {
        "task": "convergence",
        "solution": {"name": "modulated_em_frw",
                     "params": {"k": 1.0, "v": 2.0, "branch": "cos",
                                "scale_factor": {"model": "exponential",
                                                 "a0": 1.0, "H": 0.1}}},
        "lattice": {"origin": [0.0, 0.0, 0.0],
                    "spacing": [0.015625, 0.015625, 0.015625],
                    "counts": [129, 33, 33]},
        "order": 2,
        "check": "wave_equation",
        "levels": 3,
        "order_window": {"target": 2.0, "halfwidth": 0.2},
    },
    # Gravitational-wave polarization tensor, flat background.
    "gw-flat": _verify(
        "modulated_gw", {"k": 1.0, "v": 2.0, "branch": "cos"},
        {"origin": [0.0, 0.0, 0.0], "extent": _SLEPIAN_EXTENT,
         "counts": [64, 64, 64]},
        {"expected_vb": 5.0e-3, "dispersion": 1.0e-2,
         "gauge_algebraic": 1.0e-10, "gauge_differential": 1.0e-10},
        classification="timelike"),
    # Two-null-plane-wave decomposition of the super-luminal mode.
    "scissor": _verify(
        "modulated_scalar", {"k": 1.0, "v": 2.0, "branch": "cos"},
        {"origin": [0.0, 0.0, 0.0], "extent": _SLEPIAN_EXTENT,
         "counts": [17, 17, 17]},
        {"scissor": 1.0e-12},
        checks=["scissor"]),
    # Static amplitude profiles: harmonic ones have V_B = 0 identically.
    "harmonic-saddle": _verify(
        "harmonic_profile", {"profile": "saddle"},
        {"origin": [-1.0, -1.0], "spacing": [0.015625, 0.015625],
         "counts": [129, 129], "has_time": False},
        {"expected_vb": 1.0e-12}),
    "harmonic-exp-cos": _verify(
        "harmonic_profile", {"profile": "exp_cos"},
        {"origin": [0.0, 0.0], "spacing": [0.0078125, 0.0078125],
         "counts": [129, 129], "has_time": False},
        {"expected_vb": 1.0e-4}),
    "harmonic-quadratic": _verify(
        "harmonic_profile", {"profile": "quadratic"},
        {"origin": [1.0, 0.0], "spacing": [0.015625, 0.015625],
         "counts": [65, 65], "has_time": False},
        {"expected_vb": 1.0e-3}),
    # Free Gaussian spreading: unitarity and the exact width law.
    "gaussian-spreading": {
        "task": "evolve",
        "equation": "schrodinger",
        "initial": {"solution": {"name": "gaussian_packet",
                                 "params": {"sigma": 1.0, "p0": 0.0}}},
        "grid": {"origin": [-16.0], "spacing": [0.03125], "counts": [1025]},
        "dt": 0.002,
        "n_steps": 1000,
        "snapshot_every": 100,
        "boundary": "dirichlet",
        "analysis": ["packet_stats"],
        "expectations": {
            "norm_drift_max": 1.0e-10,
            "width_final": {"value": _SQRT2, "rel_tol": 1.0e-3},
        },
    },
    # Phase-evolution residual with and without the quantum term.
    "qhj-separation": {
        "task": "evolve",
        "equation": "schrodinger",
        "initial": {"solution": {"name": "gaussian_packet",
                                 "params": {"sigma": 1.0, "p0": 0.5}}},
        "grid": {"origin": [-12.0], "spacing": [0.046875], "counts": [513]},
        "dt": 0.00390625,
        "n_steps": 128,
        "snapshot_every": 1,
        "boundary": "dirichlet",
        "analysis": ["qhj"],
        "expectations": {
            "norm_drift_max": 1.0e-10,
            "qhj_masked_max": 2.0e-3,
            "qhj_plateau_rel_max": 0.1,
        },
    },
    # Accelerating Airy packet: force-free peak acceleration B^3 / 2m^2.
    "airy-tracking": {
        "task": "evolve",
        "equation": "schrodinger",
        "initial": {"solution": {"name": "airy_packet",
                                 "params": {"B": 1.0, "taper_start": -28.0,
                                            "taper_width": 4.0}}},
        "grid": {"origin": [-48.0], "spacing": [0.029296875],
                 "counts": [2049]},
        "dt": 0.002,
        "n_steps": 1000,
        "snapshot_every": 100,
        "boundary": "dirichlet",
        "analysis": ["packet_stats"],
        "expectations": {
            "norm_drift_max": 1.0e-10,
            "acceleration": {"value": 0.5, "rel_tol": 0.05,
                             "min_sigma_ratio": 20.0},
        },
    },
    # Classical wave leapfrog: exactly conserved discrete energy.
    "wave-energy": {
        "task": "evolve",
        "equation": "wave",
        "initial": {"standing_wave": {"wavenumbers": [3.0],
                                      "amplitude": 1.0}},
        "grid": {"origin": [0.0], "spacing": [0.02454369260617026],
                 "counts": [256]},
        "dt": 0.004,
        "n_steps": 2000,
        "snapshot_every": 200,
        "boundary": "periodic",
        "c": 1.0,
        "expectations": {"energy_drift_max": 1.0e-6},
    },
}


def get_preset(name):
    """Deep copy of a named preset config (:class:`KeyError` if absent)."""
    if name not in PRESETS:
        raise KeyError(f"unknown preset {name!r}; available: "
                       f"{', '.join(sorted(PRESETS))}")
    return copy.deepcopy(PRESETS[name])


def list_presets():
    """Sorted preset names with their task kinds."""
    return [(name, PRESETS[name]["task"]) for name in sorted(PRESETS)]
