"""CLI behavior: schema validation, payload shape, gates, exit codes, files.

Runs go through :func:`bohmdisp.cli.run_config` when the test cares about
the payload, and through :func:`bohmdisp.cli.main` when it cares about
streams and exit codes.  Configs here are deliberately small; the heavier
named presets get one representative run each in the acceptance module.
"""

from __future__ import annotations

import json
import math
import subprocess
import sys
import warnings

import pytest

from bohmdisp import cli
from bohmdisp.cli import run_config, validate_config
from bohmdisp.errors import ConfigError
from bohmdisp.presets import get_preset, list_presets

ONE_PERIOD_EXTENT = [math.pi, 2.0 * math.pi, 2.0 * math.pi / math.sqrt(3.0)]


def _micro_verify_config():
    # Exact null plane wave on matched spacings: residuals at rounding
    # level, so the tight tolerances and the null classification all pass.
    return {
        "task": "verify",
        "solution": {"name": "plane_wave",
                     "params": {"sector": "scalar", "k": 1.0}},
        "lattice": {"origin": [0.0, 0.0],
                    "extent": [2.0 * math.pi, 2.0 * math.pi],
                    "counts": [33, 33]},
        "tolerances": {"dispersion": 1.0e-12, "wave_equation": 1.0e-12},
        "classification": "null",
    }


def _failing_verify_config():
    # Detuning the phase speed by 20% moves the dispersion residual far
    # above the produced tolerance, so exactly one gate fails.
    return {
        "task": "verify",
        "solution": {"name": "modulated_scalar",
                     "params": {"k": 1.0, "v": 2.0, "branch": "cos"}},
        "lattice": {"origin": [0.0, 0.0, 0.0], "extent": ONE_PERIOD_EXTENT,
                    "counts": [17, 17, 17]},
        "perturb": {"phase_speed_factor": 1.2},
        "tolerances": {"dispersion": 1.0e-2},
    }


def _micro_wave_config():
    n = 64
    return {
        "task": "evolve",
        "equation": "wave",
        "initial": {"standing_wave": {"wavenumbers": [3.0],
                                      "amplitude": 1.0}},
        "grid": {"origin": [0.0], "spacing": [2.0 * math.pi / n],
                 "counts": [n]},
        "dt": 0.05,
        "n_steps": 40,
        "snapshot_every": 10,
        "boundary": "periodic",
        "c": 1.0,
        "expectations": {"energy_drift_max": 1.0e-10},
    }


def _micro_convergence_config():
    return {
        "task": "convergence",
        "solution": {"name": "harmonic_profile",
                     "params": {"profile": "exp_cos"}},
        "lattice": {"origin": [0.0, 0.0], "extent": [1.0, 1.0],
                    "counts": [33, 33], "has_time": False},
        "check": "expected_vb",
        "levels": 2,
        "order_window": {"target": 2.0, "halfwidth": 0.25},
    }


class TestValidateConfig:
    def test_every_named_preset_passes_its_schema(self):
        listing = list_presets()
        assert len(listing) == 18
        for name, task in listing:
            config = get_preset(name)
            assert validate_config(config) is config
            assert config["task"] == task

    def test_missing_required_key_is_named(self):
        config = _micro_wave_config()
        del config["dt"]
        with pytest.raises(ConfigError, match="'dt' is a required property"):
            validate_config(config)

    def test_unknown_keys_rejected(self):
        config = _micro_verify_config()
        config["bogus"] = True
        with pytest.raises(ConfigError,
                           match="Additional properties are not allowed"):
            validate_config(config)

    def test_error_message_carries_the_config_path(self):
        config = _micro_verify_config()
        config["order"] = 3
        with pytest.raises(ConfigError, match=r"config\['order'\]"):
            validate_config(config)

    def test_task_must_be_known(self):
        with pytest.raises(ConfigError, match="'task' must be one of"):
            validate_config({"task": "frobnicate"})

    def test_non_mapping_config_rejected(self):
        with pytest.raises(ConfigError, match="must be a JSON object"):
            validate_config([1, 2, 3])

    def test_expected_task_mismatch(self):
        with pytest.raises(ConfigError,
                           match="does not match the 'evolve' subcommand"):
            validate_config(_micro_verify_config(), expected_task="evolve")


class TestRunConfigVerify:
    def test_payload_shape_and_gate_order(self):
        payload, code = run_config(_micro_verify_config())
        assert code == 0
        assert set(payload) == {"format", "format_version", "kernel_backend",
                                "task", "config", "reports", "gates",
                                "passed"}
        assert payload["format"] == "bohmdisp-report"
        assert payload["format_version"] == 1
        assert payload["kernel_backend"] in ("cython", "numpy")
        assert payload["passed"] is True
        # Tolerance gates come out in sorted name order, classification last.
        assert [g["gate"] for g in payload["gates"]] == [
            "dispersion", "wave_equation", "classification"]
        assert all(g["passed"] for g in payload["gates"])
        assert payload["reports"]["dispersion"]["classification"] == "null"

    def test_failed_gate_flips_exit_code(self):
        payload, code = run_config(_failing_verify_config())
        assert code == 1
        assert payload["passed"] is False
        gate = payload["gates"][0]
        assert gate["gate"] == "dispersion"
        assert gate["passed"] is False
        assert gate["observed"] > gate["limit"]

    def test_tolerance_on_unknown_check_rejected(self):
        config = _micro_verify_config()
        config["tolerances"] = {"frobnicate": 1.0}
        with pytest.raises(ConfigError,
                           match="tolerance names unknown check"):
            run_config(config)

    def test_reported_check_cannot_carry_a_tolerance(self):
        # Continuity on the expanding background is report-only; asking it
        # to gate the exit code is a configuration error, not a pass.
        config = {
            "task": "verify",
            "solution": {"name": "modulated_em_frw",
                         "params": {"k": 1.0, "v": 2.0, "branch": "cos",
                                    "scale_factor": {"model": "exponential",
                                                     "a0": 1.0, "H": 0.1}}},
            "lattice": {"origin": [0.0, 0.0, 0.0],
                        "spacing": [0.0625, 0.0625, 0.0625],
                        "counts": [33, 17, 17]},
            "checks": ["continuity"],
            "tolerances": {"continuity": 1.0},
        }
        with pytest.raises(ConfigError, match="cannot carry a tolerance"):
            run_config(config)

    def test_classification_needs_the_dispersion_check(self):
        config = _micro_verify_config()
        config["checks"] = ["wave_equation"]
        config["tolerances"] = {"wave_equation": 1.0e-12}
        with pytest.raises(ConfigError,
                           match="needs the 'dispersion' check"):
            run_config(config)

    def test_csv_rejected_for_verify_task(self, tmp_path):
        with pytest.raises(ConfigError,
                           match="only available for the.*evolve"):
            run_config(_micro_verify_config(),
                       csv_path=str(tmp_path / "x.csv"))

    def test_lattice_needs_exactly_one_size_spec(self):
        config = _micro_verify_config()
        config["lattice"]["spacing"] = [0.1, 0.1]
        with pytest.raises(ConfigError,
                           match="exactly one of 'extent' or 'spacing'"):
            run_config(config)
        del config["lattice"]["spacing"]
        del config["lattice"]["extent"]
        with pytest.raises(ConfigError,
                           match="exactly one of 'extent' or 'spacing'"):
            run_config(config)

    def test_unknown_solution_name_reported(self):
        config = _micro_verify_config()
        config["solution"] = {"name": "frobnicate"}
        with pytest.raises(ConfigError, match="cannot build solution"):
            run_config(config)


class TestRunConfigEvolve:
    def test_wave_micro_run_passes_energy_gate(self):
        payload, code = run_config(_micro_wave_config())
        assert code == 0
        summary = payload["reports"]["evolution"]
        assert summary["equation"] == "wave"
        assert summary["scheme"] == "leapfrog"
        assert summary["n_snapshots"] == 5
        assert summary["final_time"] == pytest.approx(2.0)
        assert summary["energy_drift"] <= 1.0e-10
        (gate,) = payload["gates"]
        assert gate["gate"] == "energy_drift"
        assert gate["passed"]

    def test_csv_dump_has_one_row_per_grid_point_per_snapshot(self, tmp_path):
        path = tmp_path / "snaps.csv"
        payload, code = run_config(_micro_wave_config(), csv_path=str(path))
        assert code == 0
        lines = path.read_text().splitlines()
        assert lines[0] == "t,x,u"
        n_snaps = payload["reports"]["evolution"]["n_snapshots"]
        assert len(lines) == 1 + n_snaps * 64

    def test_csv_needs_a_1d_grid(self, tmp_path):
        config = {
            "task": "evolve",
            "equation": "schrodinger",
            "initial": {"solution": {"name": "gaussian_packet",
                                     "params": {"sigma": 1.0, "p0": 0.0}}},
            "grid": {"origin": [-8.0, -8.0], "spacing": [1.0, 1.0],
                     "counts": [17, 17]},
            "dt": 0.01,
            "n_steps": 2,
        }
        with warnings.catch_warnings():
            # The packet profile is constant along y, so it touches the y
            # edges and trips the boundary-leak warning; that is irrelevant
            # to the CSV shape rule under test.
            warnings.simplefilter("ignore")
            with pytest.raises(ConfigError, match="1-d grids only"):
                run_config(config, csv_path=str(tmp_path / "x.csv"))

    def test_schrodinger_needs_an_initial_solution(self):
        config = _micro_wave_config()
        config["equation"] = "schrodinger"
        config["initial"] = {}
        with pytest.raises(ConfigError, match=r"needs initial\.solution"):
            run_config(config)

    def test_wave_needs_a_standing_wave(self):
        config = _micro_wave_config()
        config["initial"] = {}
        with pytest.raises(ConfigError,
                           match=r"needs initial\.standing_wave"):
            run_config(config)

    def test_wavenumber_count_must_match_the_grid(self):
        config = _micro_wave_config()
        config["initial"]["standing_wave"]["wavenumbers"] = [3.0, 1.0]
        with pytest.raises(ConfigError, match="needs 1 wavenumbers"):
            run_config(config)

    def test_packet_expectations_need_the_packet_analysis(self):
        config = _micro_wave_config()
        config["expectations"]["width_final"] = {"value": 1.0,
                                                 "rel_tol": 0.1}
        with pytest.raises(ConfigError,
                           match="expects the packet_stats analysis"):
            run_config(config)


class TestRunConfigConvergence:
    def test_measured_order_passes_the_window(self):
        payload, code = run_config(_micro_convergence_config())
        assert code == 0
        report = payload["reports"]["expected_vb"]
        assert len(report["orders"]) == 1
        assert report["orders"][0] == pytest.approx(2.0, abs=0.25)
        (gate,) = payload["gates"]
        assert gate["gate"] == "order_0"
        assert gate["passed"]

    def test_machine_zero_residual_gives_na_gate(self):
        # The saddle profile's residual is exactly zero at every level, so
        # there is no rate to measure; the gate records NA and passes.
        config = {
            "task": "convergence",
            "solution": {"name": "harmonic_profile",
                         "params": {"profile": "saddle"}},
            "lattice": {"origin": [-1.0, -1.0], "extent": [2.0, 2.0],
                        "counts": [17, 17], "has_time": False},
            "check": "expected_vb",
            "levels": 2,
            "order_window": {"target": 2.0, "halfwidth": 0.2},
        }
        payload, code = run_config(config)
        assert code == 0
        assert payload["reports"]["expected_vb"]["orders"] == [None]
        (gate,) = payload["gates"]
        assert gate["observed"] is None
        assert gate["limit"] is None
        assert gate["passed"] is True
        assert gate["detail"].startswith("NA: residual at machine zero")

    def test_gauge_report_names_map_back_to_the_suite_token(self):
        # Either gauge report name may drive a study even though the suite
        # takes the single token "gauge"; both residuals are identically
        # zero for this mode, so the study lands on the NA path.
        config = {
            "task": "convergence",
            "solution": {"name": "modulated_em_flat",
                         "params": {"k": 1.0, "v": 2.0, "branch": "cos"}},
            "lattice": {"origin": [0.0, 0.0, 0.0],
                        "extent": ONE_PERIOD_EXTENT,
                        "counts": [17, 17, 17]},
            "check": "gauge_differential",
            "levels": 2,
            "order_window": {"target": 2.0, "halfwidth": 0.2},
        }
        payload, code = run_config(config)
        assert code == 0
        assert "gauge_differential" in payload["reports"]
        assert payload["gates"][0]["passed"] is True

    def test_unknown_check_lists_the_available_ones(self):
        config = _micro_convergence_config()
        config["check"] = "frobnicate"
        with pytest.raises(ConfigError, match="is not available for"):
            run_config(config)


class TestMainStreamsAndFiles:
    def test_catalog_human_listing(self, capsys):
        assert cli.main(["catalog"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert len(lines) == 18  # 17 solutions plus the preset roster
        assert all("sector=" in line for line in lines[:-1])
        assert lines[-1].startswith("presets: ")
        assert "plane-wave-null" in lines[-1]

    def test_catalog_json_payload(self, capsys):
        assert cli.main(["catalog", "--json"]) == 0
        captured = capsys.readouterr()
        payload = json.loads(captured.out)
        assert payload["task"] == "catalog"
        assert len(payload["solutions"]) == 17
        names = [p["name"] for p in payload["presets"]]
        assert names == [n for n, _ in list_presets()]

    def test_catalog_out_file(self, capsys, tmp_path):
        path = tmp_path / "catalog.json"
        assert cli.main(["catalog", "--out", str(path)]) == 0
        capsys.readouterr()
        assert len(json.loads(path.read_text())["solutions"]) == 17

    def test_verify_preset_prints_checks_gates_and_result(self, capsys):
        assert cli.main(["verify", "--preset", "plane-wave-null"]) == 0
        out = capsys.readouterr().out
        assert "CHECK dispersion:" in out
        assert "GATE classification: null vs null -> PASS" in out
        assert "RESULT: PASS (4 gates)" in out

    def test_branch_bookkeeping_note_is_printed(self, capsys):
        assert cli.main(["verify", "--preset", "scalar-cosh"]) == 0
        out = capsys.readouterr().out
        assert "NOTE expected_vb:" in out
        assert "RESULT: PASS" in out

    def test_json_flag_splits_the_streams(self, capsys, tmp_path):
        path = tmp_path / "config.json"
        path.write_text(json.dumps(_micro_verify_config()))
        assert cli.main(["verify", "--config", str(path), "--json"]) == 0
        captured = capsys.readouterr()
        payload = json.loads(captured.out)
        assert payload["passed"] is True
        assert "RESULT: PASS" in captured.err
        assert "RESULT" not in captured.out

    def test_failed_gate_exits_one_with_fail_line(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(_failing_verify_config()))
        assert cli.main(["verify", "--config", str(path), "--json"]) == 1
        captured = capsys.readouterr()
        assert json.loads(captured.out)["passed"] is False
        assert "RESULT: FAIL (1 gates)" in captured.err

    def test_unknown_preset_exits_two_and_lists_names(self, capsys):
        assert cli.main(["verify", "--preset", "frobnicate"]) == 2
        err = capsys.readouterr().err
        assert err.startswith("error: unknown preset 'frobnicate'")
        assert "available:" in err
        assert "airy-tracking" in err

    def test_preset_task_must_match_the_subcommand(self, capsys):
        assert cli.main(["verify", "--preset", "gaussian-spreading"]) == 2
        assert "does not match the 'verify' subcommand" in \
            capsys.readouterr().err

    def test_missing_config_file_exits_two(self, capsys, tmp_path):
        missing = tmp_path / "nope.json"
        assert cli.main(["verify", "--config", str(missing)]) == 2
        assert "cannot read config file" in capsys.readouterr().err

    def test_malformed_json_config_exits_two(self, capsys, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{nope")
        assert cli.main(["verify", "--config", str(path)]) == 2
        assert "not valid JSON" in capsys.readouterr().err

    def test_schema_error_through_main_exits_two(self, capsys, tmp_path):
        config = _micro_wave_config()
        del config["dt"]
        path = tmp_path / "nodt.json"
        path.write_text(json.dumps(config))
        assert cli.main(["evolve", "--config", str(path)]) == 2
        assert "'dt' is a required property" in capsys.readouterr().err

    def test_csv_flag_exists_only_on_evolve(self, capsys):
        with pytest.raises(SystemExit) as excinfo:
            cli.main(["verify", "--preset", "plane-wave-null",
                      "--csv", "x.csv"])
        assert excinfo.value.code == 2
        assert "unrecognized arguments" in capsys.readouterr().err

    def test_preset_and_config_are_mutually_exclusive(self, capsys):
        with pytest.raises(SystemExit) as excinfo:
            cli.main(["verify", "--preset", "plane-wave-null",
                      "--config", "x.json"])
        assert excinfo.value.code == 2
        assert "not allowed with argument" in capsys.readouterr().err

    def test_out_file_is_byte_identical_across_runs(self, capsys, tmp_path):
        first = tmp_path / "run1.json"
        second = tmp_path / "run2.json"
        assert cli.main(["verify", "--preset", "harmonic-quadratic",
                         "--out", str(first)]) == 0
        assert cli.main(["verify", "--preset", "harmonic-quadratic",
                         "--out", str(second)]) == 0
        capsys.readouterr()
        blob = first.read_bytes()
        assert blob == second.read_bytes()
        assert blob.endswith(b"\n")
        assert json.loads(blob)["passed"] is True

    def test_out_file_matches_json_stdout(self, capsys, tmp_path):
        config_path = tmp_path / "config.json"
        config_path.write_text(json.dumps(_micro_verify_config()))
        out_path = tmp_path / "payload.json"
        assert cli.main(["verify", "--config", str(config_path), "--json",
                         "--out", str(out_path)]) == 0
        assert capsys.readouterr().out == out_path.read_text()

    def test_cli_runs_in_a_fresh_interpreter(self):
        code = ("import sys; from bohmdisp.cli import main; "
                "sys.exit(main(['catalog', '--json']))")
        proc = subprocess.run([sys.executable, "-c", code],
                              capture_output=True, text=True, timeout=120)
        assert proc.returncode == 0
        assert json.loads(proc.stdout)["task"] == "catalog"
