"""Command-line interface: ``catalog``, ``verify``, ``evolve``, ``convergence``.

Configs are JSON documents validated against strict schemas (unknown keys
are rejected) and come either from ``--config FILE`` or a named
``--preset``.  Human-readable check lines go to stderr when ``--json`` is
given (stdout then carries only the canonical JSON payload, suitable for
piping and byte-for-byte comparison across runs); ``--out`` writes the same
payload to a file atomically.

Exit codes: 0 when every gate passes, 1 when a gate fails, 2 for
configuration problems (bad schema, unknown preset, unusable lattice).
"""

from __future__ import annotations

import argparse
import json
import sys

import jsonschema
import numpy as np

from . import evolve as evolve_mod
from . import reportio
from . import verify as verify_mod
from .bohm import Sector
from .catalog import build_solution, list_catalog
from .errors import BohmdispError, ConfigError
from .kernels import BACKEND as KERNEL_BACKEND
from .lattice import Lattice
from .presets import get_preset, list_presets

__all__ = ["main", "run_config", "validate_config"]

FORMAT_NAME = "bohmdisp-report"
FORMAT_VERSION = 1

_NUMBER = {"type": "number"}
_NUMBER_LIST = {"type": "array", "items": _NUMBER,
                "minItems": 1, "maxItems": 4}
_COUNTS = {"type": "array", "items": {"type": "integer", "minimum": 2},
           "minItems": 1, "maxItems": 4}
_SOLUTION = {
    "type": "object",
    "properties": {"name": {"type": "string"}, "params": {"type": "object"}},
    "required": ["name"],
    "additionalProperties": False,
}
_LATTICE = {
    "type": "object",
    "properties": {
        "origin": _NUMBER_LIST,
        "extent": _NUMBER_LIST,
        "spacing": _NUMBER_LIST,
        "counts": _COUNTS,
        "has_time": {"type": "boolean"},
        "max_points": {"type": "integer", "minimum": 1},
    },
    "required": ["origin", "counts"],
    "additionalProperties": False,
}
_CLASS = {"enum": ["timelike", "null", "spacelike"]}

VERIFY_SCHEMA = {
    "type": "object",
    "properties": {
        "task": {"const": "verify"},
        "solution": _SOLUTION,
        "lattice": _LATTICE,
        "order": {"enum": [2, 4]},
        "epsilon_rel": {"type": "number", "exclusiveMinimum": 0.0,
                        "maximum": 0.5},
        "checks": {"type": "array", "items": {"type": "string"},
                   "minItems": 1},
        "decompose_mode": {"enum": ["auto", "signed", "positive"]},
        "perturb": {
            "type": "object",
            "properties": {"phase_speed_factor": _NUMBER},
            "required": ["phase_speed_factor"],
            "additionalProperties": False,
        },
        "tolerances": {"type": "object",
                       "additionalProperties": {"type": "number"}},
        "classification": _CLASS,
    },
    "required": ["task", "solution", "lattice"],
    "additionalProperties": False,
}

CONVERGENCE_SCHEMA = {
    "type": "object",
    "properties": {
        "task": {"const": "convergence"},
        "solution": _SOLUTION,
        "lattice": _LATTICE,
        "order": {"enum": [2, 4]},
        "epsilon_rel": {"type": "number", "exclusiveMinimum": 0.0,
                        "maximum": 0.5},
        "check": {"type": "string"},
        "levels": {"type": "integer", "minimum": 2, "maximum": 6},
        "order_window": {
            "type": "object",
            "properties": {"target": _NUMBER,
                           "halfwidth": {"type": "number",
                                         "exclusiveMinimum": 0.0}},
            "required": ["target", "halfwidth"],
            "additionalProperties": False,
        },
    },
    "required": ["task", "solution", "lattice", "check", "order_window"],
    "additionalProperties": False,
}

EVOLVE_SCHEMA = {
    "type": "object",
    "properties": {
        "task": {"const": "evolve"},
        "equation": {"enum": ["schrodinger", "wave"]},
        "initial": {
            "type": "object",
            "properties": {
                "solution": _SOLUTION,
                "time": _NUMBER,
                "standing_wave": {
                    "type": "object",
                    "properties": {
                        "wavenumbers": {"type": "array", "items": _NUMBER,
                                        "minItems": 1, "maxItems": 2},
                        "amplitude": _NUMBER,
                    },
                    "required": ["wavenumbers"],
                    "additionalProperties": False,
                },
            },
            "additionalProperties": False,
        },
        "grid": {
            "type": "object",
            "properties": {
                "origin": _NUMBER_LIST,
                "extent": _NUMBER_LIST,
                "spacing": _NUMBER_LIST,
                "counts": _COUNTS,
            },
            "required": ["origin", "counts"],
            "additionalProperties": False,
        },
        "dt": {"type": "number", "exclusiveMinimum": 0.0},
        "n_steps": {"type": "integer", "minimum": 1},
        "snapshot_every": {"type": "integer", "minimum": 1},
        "boundary": {"enum": ["dirichlet", "periodic"]},
        "hbar": {"type": "number", "exclusiveMinimum": 0.0},
        "mass": {"type": "number", "exclusiveMinimum": 0.0},
        "c": {"type": "number", "exclusiveMinimum": 0.0},
        "potential": {
            "type": "object",
            "properties": {
                "kind": {"enum": ["none", "harmonic"]},
                "omega": {"type": "number", "exclusiveMinimum": 0.0},
            },
            "required": ["kind"],
            "additionalProperties": False,
        },
        "analysis": {"type": "array",
                     "items": {"enum": ["packet_stats", "qhj"]}},
        "expectations": {
            "type": "object",
            "properties": {
                "norm_drift_max": _NUMBER,
                "energy_drift_max": _NUMBER,
                "width_final": {
                    "type": "object",
                    "properties": {"value": _NUMBER, "rel_tol": _NUMBER},
                    "required": ["value", "rel_tol"],
                    "additionalProperties": False,
                },
                "velocity": {
                    "type": "object",
                    "properties": {"value": _NUMBER, "rel_tol": _NUMBER},
                    "required": ["value", "rel_tol"],
                    "additionalProperties": False,
                },
                "acceleration": {
                    "type": "object",
                    "properties": {"value": _NUMBER, "rel_tol": _NUMBER,
                                   "min_sigma_ratio": _NUMBER},
                    "required": ["value", "rel_tol"],
                    "additionalProperties": False,
                },
                "qhj_masked_max": _NUMBER,
                "qhj_plateau_rel_max": _NUMBER,
            },
            "additionalProperties": False,
        },
    },
    "required": ["task", "equation", "initial", "grid", "dt", "n_steps"],
    "additionalProperties": False,
}

SCHEMAS = {"verify": VERIFY_SCHEMA, "convergence": CONVERGENCE_SCHEMA,
           "evolve": EVOLVE_SCHEMA}


def validate_config(config, expected_task=None):
    """Schema-validate a config dict; raises :class:`ConfigError`."""
    if not isinstance(config, dict):
        raise ConfigError("config must be a JSON object")
    task = config.get("task")
    if task not in SCHEMAS:
        raise ConfigError(f"config 'task' must be one of "
                          f"{sorted(SCHEMAS)}, got {task!r}")
    if expected_task is not None and task != expected_task:
        raise ConfigError(f"config task {task!r} does not match the "
                          f"{expected_task!r} subcommand")
    try:
        jsonschema.validate(config, SCHEMAS[task])
    except jsonschema.ValidationError as exc:
        path = "".join(f"[{p!r}]" for p in exc.absolute_path)
        where = f" at config{path}" if path else ""
        raise ConfigError(f"invalid config{where}: {exc.message}") from exc
    return config


def _build_solution(spec):
    try:
        return build_solution(spec["name"], spec.get("params"))
    except (KeyError, TypeError, ValueError, BohmdispError) as exc:
        raise ConfigError(f"cannot build solution "
                          f"{spec.get('name')!r}: {exc}") from exc


def _build_lattice(spec, default_has_time=True):
    has_extent = "extent" in spec
    has_spacing = "spacing" in spec
    if has_extent == has_spacing:
        raise ConfigError("lattice needs exactly one of 'extent' or "
                          "'spacing'")
    kwargs = {}
    if "max_points" in spec:
        kwargs["max_points"] = spec["max_points"]
    has_time = spec.get("has_time", default_has_time)
    try:
        if has_extent:
            return Lattice.from_extent(spec["origin"], spec["extent"],
                                       spec["counts"], has_time=has_time,
                                       **kwargs)
        return Lattice(origin=tuple(spec["origin"]),
                       spacing=tuple(spec["spacing"]),
                       counts=tuple(spec["counts"]), has_time=has_time,
                       **kwargs)
    except BohmdispError as exc:
        raise ConfigError(f"unusable lattice: {exc}") from exc


def _gate(name, observed, limit, passed, detail=None):
    entry = {"gate": name, "observed": observed, "limit": limit,
             "passed": bool(passed)}
    if detail:
        entry["detail"] = detail
    return entry


def _run_verify(config):
    sol = _build_solution(config["solution"])
    lattice = _build_lattice(config["lattice"])
    order = config.get("order", 2)
    epsilon_rel = config.get("epsilon_rel")
    if Sector(sol.sector) is Sector.NONREL:
        reports = verify_mod.run_static_profile(
            sol, lattice, order=order, epsilon_rel=epsilon_rel)
    else:
        try:
            reports = verify_mod.run_solution_suite(
                sol, lattice, order=order, epsilon_rel=epsilon_rel,
                checks=config.get("checks"),
                decompose_mode=config.get("decompose_mode", "auto"),
                perturb=config.get("perturb"))
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    gates = []
    for name in sorted(config.get("tolerances", {})):
        limit = config["tolerances"][name]
        report = reports.get(name)
        if report is None:
            raise ConfigError(f"tolerance names unknown check {name!r}; "
                              f"this run produced {sorted(reports)}")
        if report.status != "asserted":
            raise ConfigError(
                f"check {name!r} is report-only on this background and "
                f"cannot carry a tolerance")
        gates.append(_gate(name, report.masked_max, limit,
                           report.masked_max <= limit))
    expected_class = config.get("classification")
    if expected_class is not None:
        disp = reports.get("dispersion")
        if disp is None:
            raise ConfigError("a classification expectation needs the "
                              "'dispersion' check in the run")
        gates.append(_gate("classification", disp.classification,
                           expected_class,
                           disp.classification == expected_class))
    return {name: rep.to_dict() for name, rep in reports.items()}, gates


def _run_convergence(config):
    sol = _build_solution(config["solution"])
    base = _build_lattice(config["lattice"])
    order = config.get("order", 2)
    epsilon_rel = config.get("epsilon_rel")
    check = config["check"]

    # "gauge" is one suite token that yields two reports; translate report
    # names back to the token so either can drive a study.
    token = "gauge" if check in ("gauge_algebraic", "gauge_differential") \
        else check

    def run_check(lat):
        if Sector(sol.sector) is Sector.NONREL:
            reports = verify_mod.run_static_profile(
                sol, lat, order=order, epsilon_rel=epsilon_rel)
        else:
            try:
                reports = verify_mod.run_solution_suite(
                    sol, lat, order=order, epsilon_rel=epsilon_rel,
                    checks=[token])
            except ValueError as exc:
                raise ConfigError(str(exc)) from exc
        if check not in reports:
            raise ConfigError(f"check {check!r} is not available for "
                              f"{sol.name}; choose from {sorted(reports)}")
        return reports[check]

    report = verify_mod.convergence_study(run_check, base,
                                          levels=config.get("levels", 3))
    window = config["order_window"]
    gates = []
    for i, measured in enumerate(report.orders):
        name = f"order_{i}"
        if measured is None:
            gates.append(_gate(name, None, None, True,
                               detail="NA: residual at machine zero, no "
                                      "rate information"))
        else:
            ok = abs(measured - window["target"]) <= window["halfwidth"]
            gates.append(_gate(
                name, measured,
                f"{window['target']} +/- {window['halfwidth']}", ok))
    return {check: report.to_dict()}, gates


def _initial_wavefunction(config, grid):
    spec = config["initial"]
    sol_spec = spec.get("solution")
    if sol_spec is None:
        raise ConfigError("schrodinger evolution needs initial.solution")
    sol = _build_solution(sol_spec)
    t0 = spec.get("time", 0.0)
    args = [np.asarray(t0, dtype=np.float64), 0.0, 0.0, 0.0]
    for axis, coords in enumerate(grid.grids()):
        args[axis + 1] = coords
    psi0 = np.ascontiguousarray(
        np.broadcast_to(sol.evaluator(*args), grid.shape),
        dtype=np.complex128)
    return sol, psi0


def _initial_wave_data(config, grid):
    spec = config["initial"]
    sw = spec.get("standing_wave")
    if sw is None:
        raise ConfigError("wave evolution needs initial.standing_wave")
    ks = sw["wavenumbers"]
    if len(ks) != grid.ndim:
        raise ConfigError(f"standing_wave needs {grid.ndim} wavenumbers "
                          f"for this grid, got {len(ks)}")
    amplitude = sw.get("amplitude", 1.0)
    u0 = np.full(grid.shape, amplitude)
    for axis, k in enumerate(ks):
        u0 = u0 * np.cos(k * np.asarray(grid.grids()[axis]))
    return np.ascontiguousarray(u0), np.zeros(grid.shape)


def _build_potential(spec, mass):
    if spec is None or spec["kind"] == "none":
        return None
    omega = spec.get("omega", 1.0)

    def harmonic(*coords):
        total = 0.0
        for c in coords:
            total = total + c * c
        return 0.5 * mass * omega * omega * total

    return harmonic


def _relative_gate(name, observed, expected):
    rel = abs(observed - expected["value"]) / abs(expected["value"])
    return _gate(name, observed,
                 f"{expected['value']} +/- {expected['rel_tol']:.3g} rel",
                 rel <= expected["rel_tol"])


def _run_evolve(config, csv_path=None):
    grid = _build_lattice(config["grid"], default_has_time=False)
    equation = config["equation"]
    hbar = config.get("hbar", 1.0)
    mass = config.get("mass", 1.0)
    reports = {}
    gates = []
    expect = config.get("expectations", {})

    if equation == "schrodinger":
        sol, psi0 = _initial_wavefunction(config, grid)
        result = evolve_mod.schrodinger_evolve(
            grid, psi0, _build_potential(config.get("potential"), mass),
            dt=config["dt"], n_steps=config["n_steps"], hbar=hbar, mass=mass,
            boundary=config.get("boundary", "dirichlet"),
            snapshot_every=config.get("snapshot_every"))
    else:
        u0, v0 = _initial_wave_data(config, grid)
        result = evolve_mod.leapfrog_wave(
            grid, u0, v0, dt=config["dt"], n_steps=config["n_steps"],
            c=config.get("c", 1.0),
            boundary=config.get("boundary", "periodic"),
            snapshot_every=config.get("snapshot_every"))

    summary = {"equation": equation, "n_snapshots": len(result.times),
               "final_time": float(result.times[-1]), **result.extra}
    if result.norm_drift is not None:
        summary["norm_drift"] = result.norm_drift
    if result.energy_drift is not None:
        summary["energy_drift"] = result.energy_drift
    reports["evolution"] = summary

    stats = None
    analyses = config.get("analysis", [])
    if "packet_stats" in analyses:
        stats = evolve_mod.packet_stats(grid, result.times, result.snapshots)
        reports["packet_stats"] = {
            "times": list(stats.times),
            "norms": list(stats.norms),
            "centroids": list(stats.centroids),
            "widths": list(stats.widths),
            "peak_positions": list(stats.peak_positions),
            "velocity": stats.velocity,
            "velocity_stderr": stats.velocity_stderr,
            "acceleration": stats.acceleration,
            "acceleration_stderr": stats.acceleration_stderr,
        }
    if "qhj" in analyses:
        field = evolve_mod.stack_snapshots(grid, result.times,
                                           result.snapshots)
        potential = _build_potential(config.get("potential"), mass)
        vpot = None
        if potential is not None:
            vpot = potential(*field.lattice.spacetime_coords()[1:1 + grid.ndim])
        qhj = evolve_mod.qhj_separation(field, potential=vpot, hbar=hbar,
                                        mass=mass)
        for name, rep in qhj.items():
            reports[name] = rep.to_dict()

    if "norm_drift_max" in expect:
        gates.append(_gate("norm_drift", result.norm_drift,
                           expect["norm_drift_max"],
                           result.norm_drift is not None
                           and result.norm_drift <= expect["norm_drift_max"]))
    if "energy_drift_max" in expect:
        gates.append(_gate("energy_drift", result.energy_drift,
                           expect["energy_drift_max"],
                           result.energy_drift is not None
                           and result.energy_drift
                           <= expect["energy_drift_max"]))
    if "width_final" in expect:
        if stats is None:
            raise ConfigError("width_final expects the packet_stats analysis")
        gates.append(_relative_gate("width_final", float(stats.widths[-1]),
                                    expect["width_final"]))
    if "velocity" in expect:
        if stats is None:
            raise ConfigError("velocity expects the packet_stats analysis")
        gates.append(_relative_gate("velocity", stats.velocity,
                                    expect["velocity"]))
    if "acceleration" in expect:
        if stats is None:
            raise ConfigError("acceleration expects the packet_stats "
                              "analysis")
        spec = expect["acceleration"]
        gates.append(_relative_gate("acceleration", stats.acceleration, spec))
        if "min_sigma_ratio" in spec:
            ratio = (abs(stats.acceleration) / stats.acceleration_stderr
                     if stats.acceleration_stderr > 0.0 else float("inf"))
            gates.append(_gate("acceleration_significance", ratio,
                               spec["min_sigma_ratio"],
                               ratio >= spec["min_sigma_ratio"]))
    if "qhj_masked_max" in expect:
        rep = reports.get("phase_evolution")
        if rep is None:
            raise ConfigError("qhj_masked_max expects the qhj analysis")
        gates.append(_gate("qhj_masked_max", rep["masked_max"],
                           expect["qhj_masked_max"],
                           rep["masked_max"] <= expect["qhj_masked_max"]))
    if "qhj_plateau_rel_max" in expect:
        rep = reports.get("phase_evolution_classical")
        if rep is None:
            raise ConfigError("qhj_plateau_rel_max expects the qhj analysis")
        plateau = rep["extra"]["plateau_rel_max"]
        gates.append(_gate("qhj_plateau_rel", plateau,
                           expect["qhj_plateau_rel_max"],
                           plateau is not None
                           and plateau <= expect["qhj_plateau_rel_max"]))

    if csv_path is not None:
        if grid.ndim != 1:
            raise ConfigError("CSV snapshot dumps support 1-d grids only")
        name = "psi" if equation == "schrodinger" else "u"
        reportio.write_snapshot_csv(csv_path, grid, result.times,
                                    result.snapshots, name)
    return reports, gates


TASK_RUNNERS = {"verify": _run_verify, "convergence": _run_convergence}


def run_config(config, expected_task=None, csv_path=None):
    """Validate and execute a config; returns ``(payload, exit_code)``.

    The payload is the plain-data report document; the exit code is 0 when
    every gate passed and 1 otherwise.  Configuration problems raise
    :class:`ConfigError` instead of returning.  ``csv_path`` dumps evolution
    snapshots (evolve task, 1-d grids only).
    """
    validate_config(config, expected_task)
    task = config["task"]
    if task == "evolve":
        reports, gates = _run_evolve(config, csv_path=csv_path)
    else:
        if csv_path is not None:
            raise ConfigError("CSV output is only available for the "
                              "evolve task")
        reports, gates = TASK_RUNNERS[task](config)
    passed = all(g["passed"] for g in gates)
    payload = {
        "format": FORMAT_NAME,
        "format_version": FORMAT_VERSION,
        "kernel_backend": KERNEL_BACKEND,
        "task": task,
        "config": config,
        "reports": reports,
        "gates": gates,
        "passed": passed,
    }
    return payload, (0 if passed else 1)


def _human_lines(payload):
    lines = []
    for name in sorted(payload["reports"]):
        rep = payload["reports"][name]
        if "masked_max" in rep:
            tag = f" [{rep['classification']}]" if rep.get("classification") \
                else ""
            lines.append(f"CHECK {name}: masked_max={rep['masked_max']:.6e} "
                         f"kept={rep['kept_fraction']:.3f}{tag} "
                         f"({rep['status']})")
            warning = rep.get("extra", {}).get("branch_sign_warning")
            if warning:
                lines.append(f"NOTE {name}: {warning.get('detail', warning)}")
        else:
            keys = ("norm_drift", "energy_drift", "velocity", "acceleration")
            shown = ", ".join(f"{k}={rep[k]:.6e}" for k in keys if k in rep)
            lines.append(f"INFO {name}: {shown}" if shown
                         else f"INFO {name}")
    for gate in payload["gates"]:
        verdict = "PASS" if gate["passed"] else "FAIL"
        observed = gate["observed"]
        if isinstance(observed, float):
            observed = f"{observed:.6e}"
        detail = f" ({gate['detail']})" if "detail" in gate else ""
        lines.append(f"GATE {gate['gate']}: {observed} vs {gate['limit']}"
                     f"{detail} -> {verdict}")
    lines.append(f"RESULT: {'PASS' if payload['passed'] else 'FAIL'} "
                 f"({len(payload['gates'])} gates)")
    return lines


def _load_config(args):
    if getattr(args, "preset", None):
        try:
            return get_preset(args.preset)
        except KeyError as exc:
            raise ConfigError(str(exc.args[0])) from exc
    try:
        with open(args.config, encoding="utf-8") as handle:
            return json.load(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file is not valid JSON: {exc}") from exc


def _emit(payload, args, human_lines):
    stream = sys.stderr if args.json else sys.stdout
    for line in human_lines:
        print(line, file=stream)
    text = reportio.canonical_json(payload)
    if args.json:
        sys.stdout.write(text)
    if getattr(args, "out", None):
        reportio.atomic_write(args.out, text)


def _cmd_catalog(args):
    payload = {
        "format": FORMAT_NAME,
        "format_version": FORMAT_VERSION,
        "kernel_backend": KERNEL_BACKEND,
        "task": "catalog",
        "solutions": list_catalog(),
        "presets": [{"name": n, "task": t} for n, t in list_presets()],
    }
    lines = []
    for entry in payload["solutions"]:
        lines.append(f"{entry['name']}  sector={entry['sector']}  "
                     f"class={entry['expected_class']}")
    lines.append("presets: " + ", ".join(n for n, _ in list_presets()))
    _emit(payload, args, lines)
    return 0


def _cmd_run(args, task):
    config = _load_config(args)
    payload, code = run_config(config, expected_task=task,
                               csv_path=getattr(args, "csv", None))
    _emit(payload, args, _human_lines(payload))
    return code


def _add_common(parser, with_csv=False):
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument("--preset", help="named built-in configuration")
    group.add_argument("--config", help="path to a JSON configuration")
    parser.add_argument("--json", action="store_true",
                        help="print the canonical JSON payload on stdout")
    parser.add_argument("--out", help="write the JSON payload to this file")
    if with_csv:
        parser.add_argument("--csv", help="write snapshot CSV (1-d grids)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="bohmdisp",
        description="Lattice checks of wave dispersion against the Bohm "
                    "potential, plus packet evolution experiments.")
    sub = parser.add_subparsers(dest="command", required=True)

    cat = sub.add_parser("catalog",
                         help="list analytic solutions and presets")
    cat.add_argument("--json", action="store_true")
    cat.add_argument("--out")

    ver = sub.add_parser("verify", help="run residual checks on a lattice")
    _add_common(ver)
    evo = sub.add_parser("evolve", help="run a time evolution with gates")
    _add_common(evo, with_csv=True)
    con = sub.add_parser("convergence",
                         help="measure residual convergence orders")
    _add_common(con)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "catalog":
            return _cmd_catalog(args)
        if args.command in ("verify", "evolve", "convergence"):
            return _cmd_run(args, args.command)
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except BohmdispError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
