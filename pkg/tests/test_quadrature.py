"""Quadrature: analytic corpus, divergence detection, incomplete gammas."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from logtm.quadrature import (
    DivergentIntegral,
    LogKind,
    WeightedIntegrand,
    gamma_lower,
    gamma_upper,
    h_exp,
    integrate_weighted,
)


def const_one(r):
    return np.ones_like(r)


class TestWeightedIntegral:
    def test_power_rule(self):
        # f = 1, a = n-1, b = 0 -> 1/n
        for n in (2, 3, 4, 7):
            res = integrate_weighted(WeightedIntegrand(const_one, n - 1, 0.0), 1e-10)
            assert res.value == pytest.approx(1.0 / n, rel=1e-9)
            assert res.panels_used >= 1
            assert res.abs_error_estimate >= 0

    def test_log_weight_restricted_interval(self):
        # int_{1/e}^1 r^-1 (ln 1/r)^(-1/2) dr = 2 (antiderivative 2 sqrt(ln 1/r))
        w = WeightedIntegrand(const_one, -1.0, -0.5, LogKind.LOG_ONE_OVER_R, (math.exp(-1.0), 1.0))
        res = integrate_weighted(w, 1e-10)
        assert res.value == pytest.approx(2.0, rel=1e-9)

    def test_log_weight_full_interval_diverges(self):
        w = WeightedIntegrand(const_one, -1.0, -0.5, LogKind.LOG_ONE_OVER_R)
        with pytest.raises(DivergentIntegral):
            integrate_weighted(w, 1e-8)

    def test_divergent_at_r_one(self):
        # b <= -1 with the log(1/r) kind is non-integrable at r = 1
        w = WeightedIntegrand(const_one, 0.0, -1.0, LogKind.LOG_ONE_OVER_R)
        with pytest.raises(DivergentIntegral):
            integrate_weighted(w, 1e-8)

    def test_divergent_at_r_zero(self):
        w = WeightedIntegrand(const_one, -1.5, 0.0, LogKind.LOG_ONE_OVER_R)
        with pytest.raises(DivergentIntegral):
            integrate_weighted(w, 1e-8)

    def test_substitution_identity_grid(self):
        # int_0^1 r^a (ln 1/r)^b dr = Gamma(b+1) / (a+1)^(b+1), 5x5 grid
        for a in (-0.5, 0.0, 0.7, 1.0, 3.0):
            for b in (-0.5, -0.25, 0.0, 1.0, 2.5):
                w = WeightedIntegrand(const_one, a, b)
                res = integrate_weighted(w, 1e-10)
                exact = math.gamma(b + 1.0) / (a + 1.0) ** (b + 1.0)
                assert res.value == pytest.approx(exact, rel=1e-8), (a, b)

    def test_log_e_over_r_kind(self):
        # int_0^1 (ln e/r)^1 dr = int_0^inf (1+t) e^-t dt = 2
        w = WeightedIntegrand(const_one, 0.0, 1.0, LogKind.LOG_E_OVER_R)
        res = integrate_weighted(w, 1e-10)
        assert res.value == pytest.approx(2.0, rel=1e-9)

    def test_nontrivial_f(self):
        # int_0^1 r (ln 1/r) * r dr = int_0^inf t e^{-3t} dt = 1/9
        res = integrate_weighted(
            WeightedIntegrand(lambda r: r, 1.0, 1.0, LogKind.LOG_ONE_OVER_R), 1e-10
        )
        assert res.value == pytest.approx(1.0 / 9.0, rel=1e-9)

    def test_monotone_in_integrand(self):
        small = integrate_weighted(WeightedIntegrand(lambda r: r, 1.0, 0.5), 1e-9).value
        big = integrate_weighted(
            WeightedIntegrand(lambda r: r + 0.2 * np.ones_like(r), 1.0, 0.5), 1e-9
        ).value
        bigger = integrate_weighted(
            WeightedIntegrand(lambda r: r + np.ones_like(r), 1.0, 0.5), 1e-9
        ).value
        assert small < big < bigger

    def test_rel_tol_validated(self):
        with pytest.raises(ValueError):
            integrate_weighted(WeightedIntegrand(const_one, 1.0, 0.0), 1e-1)
        with pytest.raises(ValueError):
            integrate_weighted(WeightedIntegrand(const_one, 1.0, 0.0), 1e-15)

    def test_deterministic(self):
        w = WeightedIntegrand(lambda r: np.exp(r), 0.5, -0.3)
        r1 = integrate_weighted(w, 1e-9)
        r2 = integrate_weighted(w, 1e-9)
        assert r1.value == r2.value and r1.panels_used == r2.panels_used


class TestGammaUpper:
    def test_eta_one(self):
        for y in (0.1, 1.0, 2.0, 10.0):
            assert gamma_upper(1.0, y) == pytest.approx(math.exp(-y), rel=1e-12)

    def test_gaussian(self):
        assert gamma_upper(0.5, 0.0) == pytest.approx(math.sqrt(math.pi), rel=1e-13)

    def test_negative_half_at_one(self):
        # frozen from the adaptive-quadrature oracle of t^(-3/2) e^-t on (1, inf)
        assert gamma_upper(-0.5, 1.0) == pytest.approx(0.178147711781560690, rel=1e-10)

    def test_three_halves_negative(self):
        # frozen oracle value for eta = -3/2, y = 2
        assert gamma_upper(-1.5, 2.0) == pytest.approx(0.0118329941033459971, rel=1e-10)

    def test_small_y_positive_eta(self):
        # frozen oracle value for eta = 1/2, y = 1/4
        assert gamma_upper(0.5, 0.25) == pytest.approx(0.849891838079931130, rel=1e-10)

    def test_moderate(self):
        # frozen oracle value for eta = 2, y = 5
        assert gamma_upper(2.0, 5.0) == pytest.approx(0.0404276819945128026, rel=1e-10)

    def test_zero_eta_small_y(self):
        # E1(0.5) against quadrature of the defining integral
        from logtm.quadrature import adaptive_interval

        val, _, _ = adaptive_interval(lambda t: np.exp(-t) / t, 0.5, 60.0, 1e-13)
        assert gamma_upper(0.0, 0.5) == pytest.approx(val, rel=1e-10)

    def test_rejects_divergent_origin(self):
        with pytest.raises(ValueError):
            gamma_upper(0.0, 0.0)
        with pytest.raises(ValueError):
            gamma_upper(-1.0, 0.0)

    def test_asymptotic_ratio(self):
        # Gamma(eta, y) ~ y^(eta-1) e^-y as y -> inf
        y = 50.0
        for eta in (-0.5, 0.5, 2.0):
            ratio = gamma_upper(eta, y) / (y ** (eta - 1.0) * math.exp(-y))
            assert 0.9 <= ratio <= 1.1


class TestGammaLowerAndH:
    def test_lower_eta_one(self):
        for y in (0.3, 1.0, 4.0):
            assert gamma_lower(1.0, y) == pytest.approx(1.0 - math.exp(-y), rel=1e-12)

    @given(
        st.floats(min_value=0.1, max_value=6.0),
        st.floats(min_value=0.0, max_value=30.0),
    )
    @settings(max_examples=200, deadline=None)
    def test_lower_plus_upper_is_gamma(self, eta, y):
        total = gamma_lower(eta, y) + gamma_upper(eta, y) if y > 0 else math.gamma(eta)
        assert total == pytest.approx(math.gamma(eta), rel=1e-10)

    def test_h_eta_one(self):
        for y in (0.2, 1.0, 2.0):
            assert h_exp(1.0, y) == pytest.approx(math.expm1(y), rel=1e-12)

    def test_h_half_at_one(self):
        # frozen from the adaptive-quadrature oracle of t^(-1/2) e^t on (0, 1)
        assert h_exp(0.5, 1.0) == pytest.approx(2.92530349181436320, rel=1e-10)

    def test_h_large_argument(self):
        # frozen oracle value for eta = 5/2, y = 10
        assert h_exp(2.5, 10.0) == pytest.approx(597598.709726090029, rel=1e-10)

    def test_preconditions(self):
        with pytest.raises(ValueError):
            gamma_lower(0.0, 1.0)
        with pytest.raises(ValueError):
            h_exp(-1.0, 1.0)
