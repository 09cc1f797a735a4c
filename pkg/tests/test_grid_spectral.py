import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sqglab.grid import (
    GridSpec,
    MultiIndex,
    RealField,
    apply_derivative,
    apply_fractional_laplacian,
    apply_riesz,
    apply_riesz_perp,
    apply_semigroup,
    dealias,
    lp_norm,
    mean_value,
    spectral_l2_norm,
    transform_forward,
    transform_inverse,
)
from sqglab.initial_data import random_band_limited

from conftest import make_random_field


def sine_field(grid, k=1, axis=0):
    X, Y = grid.coordinates()
    c = 2 * np.pi / grid.box_length
    return RealField(grid, np.sin(k * c * (X if axis == 0 else Y)))


class TestGridSpec:
    def test_invariants(self):
        g = GridSpec(64, 10.0)
        assert g.dx == 10.0 / 64

    @pytest.mark.parametrize("n", [8, 15, 17])
    def test_bad_n(self, n):
        with pytest.raises(ValueError):
            GridSpec(n, 1.0)

    def test_bad_length(self):
        with pytest.raises(ValueError):
            GridSpec(32, -1.0)

    def test_wavenumber_range(self):
        g = GridSpec(16, 4.0)
        kx, _ = g.wavenumbers()
        base = 2 * np.pi / 4.0
        assert kx.min() == pytest.approx(-8 * base)
        assert kx.max() == pytest.approx(7 * base)


class TestTransforms:
    def test_constant_is_dc(self, grid_2pi):
        F = transform_forward(RealField(grid_2pi, np.ones(grid_2pi.shape)))
        c = F.coefficients.copy()
        assert c[0, 0] == pytest.approx(grid_2pi.n**2)
        c[0, 0] = 0
        assert np.abs(c).max() < 1e-10

    def test_single_harmonic(self, grid_2pi):
        F = transform_forward(sine_field(grid_2pi))
        mags = np.abs(F.coefficients)
        assert np.count_nonzero(mags > 1e-8) == 2
        assert mags[1, 0] == pytest.approx(grid_2pi.n**2 / 2)
        assert mags[-1, 0] == pytest.approx(grid_2pi.n**2 / 2)

    @given(seed=st.integers(0, 2**31 - 1))
    @settings(max_examples=20, deadline=None)
    def test_round_trip(self, seed):
        g = GridSpec(32, 5.0)
        f = random_band_limited(g, seed, kmax_frac=0.9)
        back = transform_inverse(transform_forward(f))
        scale = max(np.abs(f.values).max(), 1e-30)
        assert np.abs(back.values - f.values).max() / scale < 1e-12

    def test_rejects_non_finite(self, grid_2pi):
        vals = np.zeros(grid_2pi.shape)
        vals[3, 4] = np.nan
        with pytest.raises(ValueError, match="non-finite"):
            transform_forward(RealField(grid_2pi, vals))

    def test_parseval(self, grid_small):
        f = make_random_field(grid_small, 3)
        a = lp_norm(f, 2)
        b = spectral_l2_norm(transform_forward(f))
        assert abs(a - b) / a < 1e-10


class TestFractionalLaplacian:
    def test_unit_wavenumber_eigenfunction(self, grid_2pi):
        f = sine_field(grid_2pi)
        for alpha in (1.2, 1.5, 2.0):
            out = apply_fractional_laplacian(f, alpha)
            assert np.abs(out.values - f.values).max() < 1e-12

    def test_constant_maps_to_zero(self, grid_2pi):
        out = apply_fractional_laplacian(RealField(grid_2pi, np.ones(grid_2pi.shape)), 1.5)
        assert np.abs(out.values).max() < 1e-12

    def test_mode_two_eigenvalue(self, grid_2pi):
        f = sine_field(grid_2pi, k=2)
        out = apply_fractional_laplacian(f, 1.5)
        assert np.abs(out.values - 2**1.5 * f.values).max() < 1e-12

    @pytest.mark.parametrize("alpha", [0.5, 1.0, 2.5])
    def test_alpha_domain(self, grid_2pi, alpha):
        with pytest.raises(ValueError):
            apply_fractional_laplacian(sine_field(grid_2pi), alpha)


class TestSemigroup:
    def test_identity_at_zero(self, grid_small):
        f = make_random_field(grid_small, 1)
        out = apply_semigroup(f, 0.0, 1.5)
        assert np.abs(out.values - f.values).max() < 1e-14

    def test_eigenmode_decay(self, grid_2pi):
        f = sine_field(grid_2pi)
        for alpha in (1.2, 1.8):
            out = apply_semigroup(f, 0.7, alpha)
            assert np.abs(out.values - np.exp(-0.7) * f.values).max() < 1e-12

    def test_composition(self, grid_small):
        f = make_random_field(grid_small, 2)
        one = apply_semigroup(f, 0.9, 1.5)
        two = apply_semigroup(apply_semigroup(f, 0.5, 1.5), 0.4, 1.5)
        assert np.abs(one.values - two.values).max() < 1e-12

    def test_negative_time_rejected(self, grid_2pi):
        with pytest.raises(ValueError):
            apply_semigroup(sine_field(grid_2pi), -0.1, 1.5)

    def test_mean_preserved(self, grid_small):
        f = make_random_field(grid_small, 5)
        out = apply_semigroup(f, 2.0, 1.3)
        assert mean_value(out) == pytest.approx(mean_value(f), abs=1e-13)

    @pytest.mark.parametrize("p", [2.0, 4.0, np.inf])
    def test_contraction(self, grid_small, p):
        f = make_random_field(grid_small, 7)
        for t in (0.1, 1.0, 10.0):
            assert lp_norm(apply_semigroup(f, t, 1.5), p) <= lp_norm(f, p) * (1 + 1e-12)


class TestRiesz:
    def test_quarter_turn_on_harmonic(self, grid_2pi):
        f = sine_field(grid_2pi)
        X, _ = grid_2pi.coordinates()
        out = apply_riesz(f, 1)
        assert np.abs(out.values - np.cos(X)).max() < 1e-12

    def test_transverse_component_vanishes(self, grid_2pi):
        out = apply_riesz(sine_field(grid_2pi), 2)
        assert np.abs(out.values).max() < 1e-12

    def test_perp_is_divergence_free(self, grid_small):
        f = make_random_field(grid_small, 11)
        u1, u2 = apply_riesz_perp(f)
        div = apply_derivative(u1, MultiIndex(1, 0)) + apply_derivative(u2, MultiIndex(0, 1))
        assert np.abs(div.values).max() < 1e-12 * max(1.0, np.abs(u1.values).max())

    @pytest.mark.parametrize("p", [2.0, 4.0, 2.0 / 0.5])
    def test_lp_bounded_ratio(self, p):
        # bounded-ratio property, stable across resolutions
        worst = {}
        for n in (64, 128):
            g = GridSpec(n, 20.0)
            ratios = []
            for seed in range(6):
                f = random_band_limited(g, seed, kmax_frac=0.5)
                ratios.append(lp_norm(apply_riesz(f, 1), p) / lp_norm(f, p))
            worst[n] = max(ratios)
            assert worst[n] < 2.0
        assert abs(worst[64] - worst[128]) < 0.5 * max(worst.values())

    def test_l2_isometry_mean_zero(self, grid_small):
        f = make_random_field(grid_small, 13)
        f = RealField(grid_small, f.values - f.values.mean())
        r1 = apply_riesz(f, 1)
        r2 = apply_riesz(f, 2)
        total = np.sqrt(lp_norm(r1, 2) ** 2 + lp_norm(r2, 2) ** 2)
        assert total == pytest.approx(lp_norm(f, 2), rel=1e-10)

    def test_commutes_with_derivative(self, grid_small):
        f = make_random_field(grid_small, 17)
        k = MultiIndex(1, 1)
        a = apply_riesz(apply_derivative(f, k), 1)
        b = apply_derivative(apply_riesz(f, 1), k)
        assert np.abs(a.values - b.values).max() < 1e-12 * max(1.0, np.abs(a.values).max())


class TestDerivative:
    def test_first(self, grid_2pi):
        X, _ = grid_2pi.coordinates()
        out = apply_derivative(sine_field(grid_2pi), MultiIndex(1, 0))
        assert np.abs(out.values - np.cos(X)).max() < 1e-12

    def test_transverse_second_vanishes(self, grid_2pi):
        out = apply_derivative(sine_field(grid_2pi), MultiIndex(0, 2))
        assert np.abs(out.values).max() < 1e-12

    def test_second(self, grid_2pi):
        f = sine_field(grid_2pi)
        out = apply_derivative(f, MultiIndex(2, 0))
        assert np.abs(out.values + f.values).max() < 1e-12

    def test_order_cap(self):
        with pytest.raises(ValueError):
            MultiIndex(3, 2)


class TestDealias:
    def test_band_limited_unchanged(self, grid_small):
        f = random_band_limited(grid_small, 3, kmax_frac=0.3)
        F = transform_forward(f)
        assert np.abs(dealias(F).coefficients - F.coefficients).max() < 1e-12

    def test_top_mode_zeroed(self):
        g = GridSpec(32, 2 * np.pi)
        f = sine_field(g, k=12)
        F = dealias(transform_forward(f))
        assert np.abs(F.coefficients).max() < 1e-10

    def test_idempotent(self, grid_small):
        F = transform_forward(make_random_field(grid_small, 19))
        once = dealias(F)
        twice = dealias(once)
        assert np.array_equal(once.coefficients, twice.coefficients)


class TestNorms:
    def test_zero(self, grid_2pi):
        z = RealField(grid_2pi, np.zeros(grid_2pi.shape))
        for p in (1, 2, np.inf):
            assert lp_norm(z, p) == 0.0

    def test_sup_of_one(self, grid_small):
        assert lp_norm(RealField(grid_small, np.ones(grid_small.shape)), np.inf) == 1.0

    def test_sine_l2(self, grid_2pi):
        # int sin^2 over the 2pi-periodic box = 2 pi^2
        assert lp_norm(sine_field(grid_2pi), 2) == pytest.approx(np.sqrt(2 * np.pi**2), rel=1e-12)

    @given(c=st.floats(0.01, 100.0), p=st.sampled_from([1.0, 2.0, 3.5, np.inf]))
    @settings(max_examples=25, deadline=None)
    def test_homogeneous(self, c, p):
        g = GridSpec(32, 5.0)
        f = make_random_field(g, 23)
        assert lp_norm(RealField(g, c * f.values), p) == pytest.approx(c * lp_norm(f, p), rel=1e-12)

    def test_p_below_one(self, grid_2pi):
        with pytest.raises(ValueError):
            lp_norm(sine_field(grid_2pi), 0.5)


def test_fields_are_immutable(grid_2pi):
    f = sine_field(grid_2pi)
    with pytest.raises(ValueError):
        f.values[0, 0] = 1.0
