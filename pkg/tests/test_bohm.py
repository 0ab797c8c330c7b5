"""Tests for the sector-specific Bohm potential evaluators."""

import numpy as np
import pytest

from bohmdisp.bohm import (
    BohmField,
    Sector,
    bohm_em_curved,
    bohm_em_flat,
    bohm_gw,
    bohm_nonrel,
    bohm_potential,
    bohm_scalar,
)
from bohmdisp.errors import (
    NullAmplitude,
    NullPolarization,
    UnsupportedBackground,
)
from bohmdisp.geometry import MetricSpec, ScaleFactor
from bohmdisp.lattice import (
    SYM_PAIRS,
    CovectorField,
    Lattice,
    ScalarField,
    SymTensorField,
    interior_mask,
    masked_max,
)

TWO_PI = 2.0 * np.pi


def _cos_lattice(counts=(17, 65)):
    return Lattice.from_extent((0.0, 0.0), (2.0, TWO_PI), counts)


def _cos_amp(lat, k=2.0):
    _, x = lat.grids()
    return np.cos(k * x) * np.ones(lat.shape)


def _z_polarized(lat, profile):
    values = np.zeros(lat.shape + (4,))
    values[..., 3] = profile
    return CovectorField(lat, values)


def _zz_tensor(lat, profile):
    values = np.zeros(lat.shape + (10,))
    values[..., SYM_PAIRS.index((3, 3))] = profile
    return SymTensorField(lat, values)


class TestNonrel:
    def test_saddle_profile_is_exactly_flat(self):
        # x^2 - y^2 is harmonic and its second differences are exact in
        # floating point, so the potential must vanish identically.
        lat = Lattice.from_extent((-1.0, -1.0), (2.0, 2.0), (33, 33),
                                  has_time=False)
        x, y = lat.grids()
        bf = bohm_nonrel(ScalarField(lat, x**2 - y**2))
        assert np.all(bf.vb.values[bf.mask.keep] == 0.0)
        assert bf.sector is Sector.NONREL

    def test_exp_cos_profile_truncation_only(self):
        # e^x cos(y) is harmonic; the residual is pure h^2 truncation.
        n = 129
        lat = Lattice.from_extent((0.0, 0.0), (1.0, 1.0), (n, n),
                                  has_time=False)
        x, y = lat.grids()
        bf = bohm_nonrel(ScalarField(lat, np.exp(x) * np.cos(y)))
        worst = masked_max(np.abs(bf.vb.values), bf.mask)
        assert 0.0 < worst <= 1e-4

    def test_quadratic_profile_matches_closed_form(self):
        # A = x^2 has an exact discrete Laplacian (2.0), so the quotient
        # reproduces -(hbar^2 / 2m) * 2 / x^2 to rounding.
        lat = Lattice.from_extent((1.0,), (1.0,), (65,), has_time=False)
        (x,) = lat.grids()
        hbar, mass = 0.7, 1.3
        bf = bohm_nonrel(ScalarField(lat, x**2), hbar=hbar, mass=mass)
        expected = -(hbar**2) / (2.0 * mass) * 2.0 / x**2
        keep = bf.mask.keep
        rel = np.abs(bf.vb.values[keep] - expected[keep]) \
            / np.abs(expected[keep])
        assert rel.max() <= 1e-12

    def test_scales_as_hbar_squared_over_mass(self):
        lat = Lattice.from_extent((-2.0,), (4.0,), (65,), has_time=False)
        (x,) = lat.grids()
        amp = ScalarField(lat, np.exp(-x**2 / 2.0))
        base = bohm_nonrel(amp, hbar=1.0, mass=1.0)
        scaled = bohm_nonrel(amp, hbar=3.0, mass=2.0)
        np.testing.assert_allclose(
            scaled.vb.values[scaled.mask.keep],
            (9.0 / 2.0) * base.vb.values[base.mask.keep], rtol=1e-13)


class TestScalar:
    def test_cos_mode_gives_minus_k_squared(self):
        lat = _cos_lattice()
        bf = bohm_scalar(ScalarField(lat, _cos_amp(lat, k=2.0)))
        assert masked_max(np.abs(bf.vb.values + 4.0), bf.mask) <= 2e-2
        assert bf.sector is Sector.SCALAR

    def test_order_four_shrinks_truncation(self):
        lat = _cos_lattice()
        amp = ScalarField(lat, _cos_amp(lat, k=2.0))
        worst2 = masked_max(np.abs(bohm_scalar(amp).vb.values + 4.0),
                            bohm_scalar(amp).mask)
        bf4 = bohm_scalar(amp, order=4)
        worst4 = masked_max(np.abs(bf4.vb.values + 4.0), bf4.mask)
        assert worst4 < worst2 / 50.0

    def test_constant_amplitude_gives_zero_potential(self):
        lat = _cos_lattice()
        bf = bohm_scalar(ScalarField(lat, np.ones(lat.shape)))
        assert np.all(bf.vb.values[bf.mask.keep] == 0.0)

    def test_node_crossing_amplitude_is_masked_not_divided(self):
        lat = _cos_lattice()
        bf = bohm_scalar(ScalarField(lat, _cos_amp(lat, k=2.0)),
                         epsilon_rel=0.1)
        interior = interior_mask(lat, bf.vb.margin)
        # Nodes of cos(2x) are excluded, so the mask keeps strictly fewer
        # points than the interior, and excluded points stay exactly zero.
        assert 0 < bf.mask.count
        assert bf.mask.count < np.count_nonzero(interior)
        assert np.all(bf.vb.values[~bf.mask.keep] == 0.0)
        assert np.all(np.isfinite(bf.vb.values))

    def test_complex_amplitude_rejected(self):
        lat = _cos_lattice()
        with pytest.raises(TypeError, match="decompose the complex field"):
            bohm_scalar(ScalarField(lat, np.ones(lat.shape, dtype=complex)))


class TestEmFlat:
    def test_z_polarized_cos_matches_scalar_value(self):
        lat = _cos_lattice()
        xi = _z_polarized(lat, _cos_amp(lat, k=2.0))
        bf = bohm_em_flat(xi)
        assert masked_max(np.abs(bf.vb.values + 4.0), bf.mask) <= 2e-2
        assert bf.sector is Sector.EM_FLAT

    def test_zero_polarization_rejected(self):
        lat = _cos_lattice()
        xi = CovectorField(lat, np.zeros(lat.shape + (4,)))
        with pytest.raises(NullPolarization, match="identically zero"):
            bohm_em_flat(xi)

    def test_null_polarization_rejected(self):
        # xi = (c, 1, 0, 0) has Minkowski norm -1 + 1 = 0 everywhere, so no
        # point survives the norm threshold.
        lat = _cos_lattice()
        values = np.zeros(lat.shape + (4,))
        values[..., 0] = 1.0
        values[..., 1] = 1.0
        with pytest.raises(NullPolarization, match="near-null"):
            bohm_em_flat(CovectorField(lat, values), c=1.0)


class TestEmCurved:
    def test_constant_scale_factor_rescales_wavenumber(self):
        # With a frozen scale factor a0 the comoving mode cos(k x) carries
        # proper wavenumber k / a0, so vb -> -(k/a0)^2.
        lat = _cos_lattice()
        xi = _z_polarized(lat, _cos_amp(lat, k=2.0))
        metric = MetricSpec.frw(ScaleFactor.constant(2.0), c=1.0)
        bf = bohm_em_curved(metric, xi)
        assert masked_max(np.abs(bf.vb.values + 1.0), bf.mask) <= 2e-2
        assert bf.sector is Sector.EM_CURVED

    def test_minkowski_metric_agrees_with_flat_evaluator_in_the_limit(self):
        # The curved evaluator uses the divergence-form operator (two
        # composed first derivatives), whose h^2 truncation constant is
        # larger than the fused second-difference one, so the two agree only
        # as h -> 0: the gap must shrink at second order under refinement.
        gaps = []
        for counts in ((17, 65), (17, 129)):
            lat = _cos_lattice(counts)
            xi = _z_polarized(lat, _cos_amp(lat, k=2.0))
            curved = bohm_em_curved(MetricSpec.minkowski(1.0), xi)
            flat = bohm_em_flat(xi)
            keep = curved.mask.keep & flat.mask.keep
            gaps.append(np.abs(curved.vb.values[keep]
                               - flat.vb.values[keep]).max())
        assert gaps[0] <= 6e-2
        assert gaps[1] == pytest.approx(gaps[0] / 4.0, rel=0.1)


class TestGw:
    def test_zz_polarized_cos_matches_scalar_value(self):
        lat = _cos_lattice()
        zeta = _zz_tensor(lat, _cos_amp(lat, k=2.0))
        bf = bohm_gw(MetricSpec.minkowski(1.0), zeta)
        assert masked_max(np.abs(bf.vb.values + 4.0), bf.mask) <= 2e-2
        assert bf.sector is Sector.GW

    def test_zero_tensor_rejected(self):
        lat = _cos_lattice()
        zeta = SymTensorField(lat, np.zeros(lat.shape + (10,)))
        with pytest.raises(NullAmplitude, match="identically zero"):
            bohm_gw(MetricSpec.minkowski(1.0), zeta)

    def test_curved_background_unsupported(self):
        lat = _cos_lattice()
        zeta = _zz_tensor(lat, _cos_amp(lat, k=2.0))
        metric = MetricSpec.frw(ScaleFactor.exponential(0.1), c=1.0)
        with pytest.raises(UnsupportedBackground, match="flat backgrounds"):
            bohm_gw(metric, zeta)


class TestDispatch:
    def test_sector_strings_round_trip(self):
        lat = _cos_lattice()
        amp = ScalarField(lat, _cos_amp(lat, k=2.0))
        bf = bohm_potential("scalar", amp, MetricSpec.minkowski(1.0))
        assert isinstance(bf, BohmField)
        assert bf.sector is Sector.SCALAR

    def test_scalar_sector_rejects_curved_metric(self):
        lat = _cos_lattice()
        amp = ScalarField(lat, _cos_amp(lat, k=2.0))
        metric = MetricSpec.frw(ScaleFactor.exponential(0.1), c=1.0)
        with pytest.raises(UnsupportedBackground, match="flat backgrounds"):
            bohm_potential(Sector.SCALAR, amp, metric)

    def test_em_flat_sector_points_to_em_curved(self):
        lat = _cos_lattice()
        xi = _z_polarized(lat, _cos_amp(lat, k=2.0))
        metric = MetricSpec.frw(ScaleFactor.exponential(0.1), c=1.0)
        with pytest.raises(UnsupportedBackground, match="use em_curved"):
            bohm_potential(Sector.EM_FLAT, xi, metric)

    def test_nonrel_forwards_hbar_and_mass(self):
        lat = Lattice.from_extent((1.0,), (1.0,), (65,), has_time=False)
        (x,) = lat.grids()
        amp = ScalarField(lat, x**2)
        bf = bohm_potential(Sector.NONREL, amp, MetricSpec.minkowski(1.0),
                            hbar=2.0, mass=0.5)
        expected = -(2.0**2) / (2.0 * 0.5) * 2.0 / x**2
        keep = bf.mask.keep
        np.testing.assert_allclose(bf.vb.values[keep], expected[keep],
                                   rtol=1e-12)
