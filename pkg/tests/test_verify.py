"""Tests for the residual checks, suites, and convergence machinery."""

import numpy as np
import pytest

from bohmdisp.bohm import Sector, bohm_scalar
from bohmdisp.catalog import (
    build_solution,
    gaussian_packet,
    harmonic_profile,
    modulated_em_frw,
    modulated_scalar,
    plane_wave,
)
from bohmdisp.errors import (
    BranchDomainError,
    EmptyMask,
    LatticeMismatch,
    MemoryCap,
)
from bohmdisp.geometry import MetricSpec, ScaleFactor
from bohmdisp.lattice import (
    CovectorField,
    Lattice,
    Mask,
    ScalarField,
    curved_maxwell_operator,
    sample_scalar,
)
from bohmdisp.madelung import WaveVectorField, decompose, wavevector
from conftest import matched_null_lattice, one_period_lattice

from bohmdisp.verify import (
    alignment_residual,
    classify_luminality,
    convergence_study,
    dispersion_residual,
    expected_vb_residual,
    metric_kk,
    run_solution_suite,
    run_static_profile,
    scissor_check,
    suite_for,
    wave_residual,
)

TWO_PI = 2.0 * np.pi


def _full_mask(lat):
    return Mask(lat, np.ones(lat.shape, dtype=bool), 0)


def _constant_wavevector(lat, kt, kx):
    values = np.zeros(lat.shape + (4,))
    values[..., 0] = kt
    values[..., 1] = kx
    return WaveVectorField(CovectorField(lat, values), _full_mask(lat))


class TestReportShape:
    def test_to_dict_round_trips_all_fields(self):
        sol = harmonic_profile("quadratic")
        lat = Lattice.from_extent((1.0, 0.0), (1.0, 1.0), (33, 33),
                                  has_time=False)
        report = run_static_profile(sol, lat)["expected_vb"]
        d = report.to_dict()
        assert d["check_name"] == "expected_vb"
        assert d["sector"] == "nonrel"
        assert isinstance(d["lattice"], dict)
        assert isinstance(d["masked_max"], float)
        assert 0.0 < d["kept_fraction"] <= 1.0
        assert d["status"] == "asserted"
        assert d["orders"] is None


class TestClassify:
    def _lat(self):
        return Lattice.from_extent((0.0, 0.0), (1.0, 1.0), (9, 9))

    def test_unanimous_timelike(self):
        lat = self._lat()
        kk = np.full(lat.shape, -2.0)
        scale = np.full(lat.shape, 2.0)
        label, detail = classify_luminality(kk, scale, _full_mask(lat))
        assert label == "timelike"
        assert detail["unanimity"] == 1.0
        assert detail["votes"]["spacelike"] == 0

    def test_majority_vote_with_mixed_signs(self):
        lat = self._lat()
        kk = np.full(lat.shape, 1.0)
        kk[0, :] = -1.0     # a minority of timelike votes
        scale = np.ones(lat.shape)
        label, detail = classify_luminality(kk, scale, _full_mask(lat))
        assert label == "spacelike"
        assert detail["votes"]["timelike"] == 9
        assert detail["unanimity"] < 1.0

    def test_near_zero_values_vote_null(self):
        lat = self._lat()
        kk = np.full(lat.shape, 1e-12)
        scale = np.ones(lat.shape)
        label, _ = classify_luminality(kk, scale, _full_mask(lat))
        assert label == "null"

    def test_empty_mask_rejected(self):
        lat = self._lat()
        empty = Mask(lat, np.zeros(lat.shape, dtype=bool), 0)
        with pytest.raises(EmptyMask):
            classify_luminality(np.ones(lat.shape), np.ones(lat.shape), empty)


class TestMetricKk:
    def test_minkowski_contraction(self):
        lat = Lattice.from_extent((0.0, 0.0), (1.0, 1.0), (9, 9))
        kf = _constant_wavevector(lat, kt=2.0, kx=3.0)
        kk, scale = metric_kk(MetricSpec.minkowski(2.0), kf)
        # g^{tt} = -1/c^2 = -1/4, spatial identity.
        np.testing.assert_allclose(kk, -0.25 * 4.0 + 9.0)
        np.testing.assert_allclose(scale, 4.0 + 9.0)

    def test_frw_spatial_components_redshift(self):
        lat = Lattice.from_extent((0.0, 0.0), (1.0, 1.0), (9, 9))
        kf = _constant_wavevector(lat, kt=0.0, kx=1.0)
        metric = MetricSpec.frw(ScaleFactor.constant(2.0), c=1.0)
        kk, _ = metric_kk(metric, kf)
        np.testing.assert_allclose(kk, 1.0 / 4.0)


class TestModulatedSuites:
    def test_scalar_cos_mode(self):
        sol = modulated_scalar(k=1.0, v=2.0, branch="cos")
        reports = run_solution_suite(sol, one_period_lattice())
        assert set(reports) == {"wave_equation", "dispersion", "expected_vb",
                                "continuity"}
        assert reports["wave_equation"].masked_max <= 1e-11
        assert reports["dispersion"].masked_max <= 2e-2
        assert reports["dispersion"].classification == "timelike"
        assert reports["expected_vb"].masked_max <= 2e-2
        assert reports["expected_vb"].extra["vb_masked_max"] == \
            pytest.approx(3.0, abs=0.05)
        assert reports["continuity"].masked_max <= 1e-10
        assert reports["continuity"].status == "asserted"

    def test_scalar_cosh_mode_positive_potential(self):
        lat = Lattice.from_extent((0.0, 0.0, 0.0), (TWO_PI, np.pi, 1.0),
                                  (33, 33, 33))
        sol = modulated_scalar(k=2.0, v=0.5, branch="cosh")
        reports = run_solution_suite(sol, lat)
        assert reports["dispersion"].classification == "spacelike"
        assert reports["expected_vb"].masked_max <= 5e-3
        assert reports["expected_vb"].extra["vb_masked_max"] == \
            pytest.approx(3.0, abs=0.01)
        warning = reports["expected_vb"].extra["branch_sign_warning"]
        assert warning["used_value"] == pytest.approx(3.0)

    def test_detuned_mode_is_a_negative_control(self):
        # Scaling the phase speed by 1.2 breaks the dispersion relation;
        # the residual must blow up far above the clean-mode value.
        sol = modulated_scalar(k=1.0, v=2.0, branch="cos")
        lat = one_period_lattice()
        clean = run_solution_suite(sol, lat, checks=["dispersion"])
        detuned = run_solution_suite(sol, lat, checks=["dispersion"],
                                     perturb={"phase_speed_factor": 1.2})
        assert detuned["dispersion"].masked_max > \
            50.0 * clean["dispersion"].masked_max

    def test_unknown_perturbation_key_rejected(self):
        sol = modulated_scalar(k=1.0, v=2.0, branch="cos")
        with pytest.raises(ValueError, match="unknown perturbation keys"):
            run_solution_suite(sol, one_period_lattice(),
                               checks=["dispersion"],
                               perturb={"frequency_shift": 0.1})

    def test_plane_wave_rounding_level_null(self):
        sol = plane_wave(k=1.0, sector="scalar")
        reports = run_solution_suite(sol, matched_null_lattice())
        assert reports["wave_equation"].masked_max <= 1e-12
        assert reports["dispersion"].masked_max <= 1e-12
        assert reports["dispersion"].classification == "null"

    def test_em_frw_suite_reports(self):
        lat = Lattice((0.0, 0.0, 0.0), (0.03125,) * 3, (65, 17, 17))
        sol = modulated_em_frw(k=1.0, v=2.0, branch="cos")
        reports = run_solution_suite(sol, lat)
        assert set(reports) == {
            "wave_equation", "dispersion", "expected_vb", "gauge_algebraic",
            "gauge_differential", "alignment", "continuity",
            "continuity_euclidean"}
        assert reports["expected_vb"].masked_max <= 1e-2
        assert reports["alignment"].masked_max <= 1e-10
        # The polarization is z-directed and z-independent, so both gauge
        # contractions are identically zero on the lattice.
        assert reports["gauge_algebraic"].masked_max == 0.0
        assert reports["gauge_differential"].masked_max == 0.0
        # Continuity is never asserted on an expanding background.
        assert reports["continuity"].status == "reported"
        euclid = reports["continuity_euclidean"]
        assert euclid.status == "reported"
        # The Euclidean-contracted density really does drift, and the drift
        # matches the analytic expansion-rate prediction.
        assert euclid.masked_max > 0.1
        assert euclid.extra["deviation_from_prediction"] <= \
            1e-4 * euclid.masked_max

    def test_unknown_check_token_rejected(self):
        sol = modulated_scalar(k=1.0, v=2.0, branch="cos")
        with pytest.raises(ValueError, match="unknown checks"):
            run_solution_suite(sol, one_period_lattice(),
                               checks=["dispersal"])

    def test_nonrel_solution_rejected_by_suite(self):
        with pytest.raises(ValueError, match="evolution module"):
            run_solution_suite(gaussian_packet(), one_period_lattice())


class TestSuiteComposition:
    def test_check_lists_by_sector(self):
        assert suite_for(modulated_scalar(v=2.0)) == \
            ["wave_equation", "dispersion", "expected_vb", "continuity"]
        assert "gauge" in suite_for(build_solution("modulated_em_flat_cos"))
        frw = suite_for(modulated_em_frw(v=2.0))
        assert "alignment" in frw
        assert "continuity_euclidean" in frw
        assert "gauge" in suite_for(build_solution("modulated_gw_cos"))

    def test_null_curved_mode_skips_alignment(self):
        # The curved operator annihilates the exact null mode, so there is
        # no direction to compare against.
        checks = suite_for(plane_wave(sector="em_curved"))
        assert "alignment" not in checks

    def test_nonrel_has_no_lattice_suite(self):
        with pytest.raises(ValueError, match="evolution module"):
            suite_for(gaussian_packet())


class TestResidualGuards:
    def test_dispersion_lattice_mismatch(self):
        lat_a = one_period_lattice()
        lat_b = one_period_lattice(counts=(17, 17, 17))
        sol = modulated_scalar(k=1.0, v=2.0, branch="cos")
        field = sample_scalar(lat_a, sol.evaluator)
        pair = decompose(field)
        kf = wavevector(pair)
        amp_b = ScalarField(lat_b, np.ones(lat_b.shape))
        vb = bohm_scalar(amp_b)
        with pytest.raises(LatticeMismatch):
            dispersion_residual(kf, vb, sol.metric)

    def test_expected_vb_needs_a_closed_form(self):
        lat = Lattice.from_extent((-4.0,), (8.0,), (65,), has_time=False)
        sol = gaussian_packet()
        field = sample_scalar(lat, lambda t, x, y, z:
                              np.abs(sol.evaluator(0.0, x, y, z)))
        from bohmdisp.bohm import bohm_nonrel
        vb = bohm_nonrel(field)
        with pytest.raises(ValueError, match="no closed-form potential"):
            expected_vb_residual(vb, sol)

    def test_wave_residual_rejects_nonrel(self):
        lat = Lattice.from_extent((0.0, 0.0), (1.0, 1.0), (9, 9))
        field = ScalarField(lat, np.ones(lat.shape, dtype=complex))
        with pytest.raises(ValueError, match="does not apply"):
            wave_residual(field, MetricSpec.minkowski(1.0), Sector.NONREL)

    def test_wave_residual_rejects_zero_field(self):
        lat = Lattice.from_extent((0.0, 0.0), (1.0, 1.0), (9, 9))
        field = ScalarField(lat, np.zeros(lat.shape, dtype=complex))
        with pytest.raises(EmptyMask, match="identically zero"):
            wave_residual(field, MetricSpec.minkowski(1.0), Sector.SCALAR)


class TestAlignment:
    def test_misaligned_polarization_is_detected(self):
        # Two active components carrying different wavenumbers: the curved
        # operator scales them differently, so the output cannot stay
        # parallel to the input.
        lat = Lattice.from_extent((0.0, 0.0), (2.0, TWO_PI), (17, 65))
        _, x = lat.grids()
        values = np.zeros(lat.shape + (4,))
        values[..., 2] = np.cos(2.0 * x)
        values[..., 3] = np.cos(5.0 * x)
        xi = CovectorField(lat, values)
        metric = MetricSpec.frw(ScaleFactor.exponential(0.1), c=1.0)
        rhs = curved_maxwell_operator(metric, xi)
        report = alignment_residual(xi, rhs, metric)
        assert report.masked_max > 0.1

    def test_annihilated_input_raises_empty_mask(self):
        # A constant polarization is in the operator's kernel: the output
        # is zero everywhere, so alignment is undefined, not "perfect".
        lat = Lattice.from_extent((0.0, 0.0), (2.0, TWO_PI), (17, 65))
        values = np.zeros(lat.shape + (4,))
        values[..., 3] = 1.0
        xi = CovectorField(lat, values)
        metric = MetricSpec.minkowski(1.0)
        rhs = curved_maxwell_operator(metric, xi)
        with pytest.raises(EmptyMask, match="nothing to align"):
            alignment_residual(xi, rhs, metric)


class TestScissor:
    def test_cos_mode_decomposes_into_null_rays(self):
        sol = modulated_scalar(k=1.0, v=2.0, branch="cos")
        report = scissor_check(sol, one_period_lattice(counts=(17, 17, 17)))
        assert report.masked_max <= 1e-12
        assert report.extra["null_defect_exact_zero"] is True
        assert report.extra["null_defect_rational"] == "0"

    def test_defect_cancels_in_exact_rational_arithmetic(self):
        # Awkward binary floats: Fraction(float) is exact, and the defect
        # k^2 + kappa^2 - omega^2/c^2 cancels identically for any params.
        for k, v in [(0.1, 1.3), (0.7, 2.9), (1.9, 1.1)]:
            sol = modulated_scalar(k=k, v=v, branch="cos")
            lat = Lattice.from_extent(
                (0.0, 0.0, 0.0), (1.0, 1.0, 1.0), (9, 9, 9))
            report = scissor_check(sol, lat)
            assert report.extra["null_defect_exact_zero"] is True

    def test_cosh_branch_rejected(self):
        sol = modulated_scalar(k=2.0, v=0.5, branch="cosh")
        lat = Lattice.from_extent((0.0, 0.0, 0.0), (1.0, 1.0, 1.0), (9, 9, 9))
        with pytest.raises(BranchDomainError, match="cos branch"):
            scissor_check(sol, lat)


class TestConvergence:
    def test_second_order_rate_on_truncation_limited_profile(self):
        sol = harmonic_profile("exp_cos")
        base = Lattice.from_extent((0.0, 0.0), (1.0, 1.0), (33, 33),
                                   has_time=False)
        report = convergence_study(
            lambda lat: run_static_profile(sol, lat)["expected_vb"], base,
            levels=3)
        assert len(report.orders) == 2
        for order in report.orders:
            assert order == pytest.approx(2.0, abs=0.2)
        assert len(report.extra["level_masked_max"]) == 3

    def test_machine_zero_residuals_give_na_orders(self):
        # The saddle profile's residual is exactly zero at every level;
        # there is no rate to measure and the order slots hold None.
        sol = harmonic_profile("saddle")
        base = Lattice.from_extent((-1.0, -1.0), (2.0, 2.0), (17, 17),
                                   has_time=False)
        report = convergence_study(
            lambda lat: run_static_profile(sol, lat)["expected_vb"], base,
            levels=3)
        assert report.orders == [None, None]

    def test_memory_cap_names_the_level(self):
        sol = harmonic_profile("exp_cos")
        base = Lattice.from_extent((0.0, 0.0), (1.0, 1.0), (33, 33),
                                   has_time=False, max_points=2000)
        with pytest.raises(MemoryCap, match="refinement level 1"):
            convergence_study(
                lambda lat: run_static_profile(sol, lat)["expected_vb"],
                base, levels=3)

    def test_needs_at_least_two_levels(self):
        sol = harmonic_profile("saddle")
        base = Lattice.from_extent((-1.0, -1.0), (2.0, 2.0), (17, 17),
                                   has_time=False)
        with pytest.raises(ValueError, match=">= 2 levels"):
            convergence_study(
                lambda lat: run_static_profile(sol, lat)["expected_vb"],
                base, levels=1)


class TestStaticProfiles:
    def test_quadratic_control_matches_closed_form(self):
        lat = Lattice.from_extent((1.0, 0.0), (1.0, 1.0), (65, 65),
                                  has_time=False)
        report = run_static_profile(harmonic_profile("quadratic"), lat)
        assert report["expected_vb"].masked_max <= 1e-12

    def test_relativistic_solution_rejected(self):
        sol = modulated_scalar(k=1.0, v=2.0, branch="cos")
        with pytest.raises(ValueError, match="not a static"):
            run_static_profile(sol, one_period_lattice())
