"""Tests for the closed-form thermodynamic functions."""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from imd.thermo import (
    ModelParams,
    g,
    g_derivative,
    log_one_minus_g,
    p0,
    p0_second_form,
    printed_rate_offset,
    rate_function,
    tilde_p,
    variational_pressure,
    variational_pressure_via_rate,
)

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0

finite_h = st.floats(min_value=-30.0, max_value=30.0)


class TestPureDensity:
    def test_value_at_zero_field(self):
        assert abs(g(0.0) - GOLDEN) < 1e-15

    def test_value_at_unit_field_vs_quadratic_root(self):
        # positive root of x^2 + e^{2h} x - e^{2h} = 0 at h = 1
        e2 = math.exp(2.0)
        root = (-e2 + math.sqrt(e2 * e2 + 4.0 * e2)) / 2.0
        assert abs(g(1.0) - root) < 1e-14

    def test_saturated_tail_is_cancellation_free(self):
        assert abs(g(20.0) - (1.0 - math.exp(-40.0))) < 1e-16
        assert np.isfinite(g(700.0))
        assert g(700.0) == 1.0  # saturates without overflow

    @given(finite_h)
    def test_quadratic_identity(self, h):
        one_minus = math.exp(log_one_minus_g(h))
        assert abs(g(h) ** 2 - math.exp(2.0 * h) * one_minus) < 1e-12

    @given(finite_h, finite_h)
    def test_never_decreasing(self, h1, h2):
        # float outputs can tie on ulp-adjacent inputs, but never invert
        if h1 == h2:
            return
        lo, hi = sorted((h1, h2))
        assert g(lo) <= g(hi)

    def test_strictly_increasing_on_grid(self):
        hs = np.linspace(-12.0, 12.0, 241)
        vals = np.asarray(g(hs))
        assert np.all(np.diff(vals) > 0.0)

    @given(finite_h)
    def test_range(self, h):
        assert 0.0 <= g(h) <= 1.0

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            g(math.nan)
        with pytest.raises(ValueError):
            g(math.inf)

    def test_vectorized_matches_scalar(self):
        hs = np.linspace(-5, 5, 11)
        vec = g(hs)
        assert np.allclose(vec, [g(float(h)) for h in hs], rtol=0, atol=0)


class TestPureDensityDerivative:
    def test_first_derivative_closed_form_at_zero(self):
        # 2 g (1-g) / (2-g) with g = golden ratio conjugate
        expected = 2.0 * GOLDEN * (1.0 - GOLDEN) / (2.0 - GOLDEN)
        assert abs(g_derivative(0.0, 1) - expected) < 1e-15
        assert abs(expected - 0.341641) < 1e-6

    @pytest.mark.parametrize("h", [-2.0, -0.3, 0.0, 0.7, 3.0])
    def test_first_derivative_vs_finite_difference(self, h):
        step = 1e-6
        fd = (g(h + step) - g(h - step)) / (2.0 * step)
        assert abs(g_derivative(h, 1) - fd) < 1e-6

    def test_tails_vanish(self):
        assert abs(g_derivative(20.0, 1)) < 1e-15
        # toward -inf the derivative decays like e^h, not faster: at h = -20
        # it is ~2e-9, far from the 1e-15 of the saturated side
        assert abs(g_derivative(-20.0, 1)) < 1e-8

    def test_second_derivative_vanishes_at_inflection(self):
        # g'' = 0 exactly where g^2 - 4g + 2 = 0, i.e. g = 2 - sqrt(2)
        h_star = 0.5 * math.log(2.0 * math.sqrt(2.0) - 2.0)
        assert abs(g(h_star) - (2.0 - math.sqrt(2.0))) < 1e-14
        assert abs(g_derivative(h_star, 2)) < 1e-10

    @pytest.mark.parametrize("k,h", [(2, 0.4), (2, -1.0), (3, 0.4), (3, -1.0)])
    def test_higher_derivatives_vs_finite_difference(self, k, h):
        step = 1e-5
        lower = g_derivative(np.array([h - step, h + step]), k - 1)
        fd = (lower[1] - lower[0]) / (2.0 * step)
        assert abs(g_derivative(h, k) - fd) < 1e-6

    def test_rejects_unsupported_order(self):
        with pytest.raises(ValueError):
            g_derivative(0.0, 4)
        with pytest.raises(ValueError):
            g_derivative(0.0, 0)


class TestPurePressure:
    def test_value_at_zero_field(self):
        assert abs(p0(0.0) - 0.290228819434551) < 1e-12

    @given(finite_h)
    def test_both_printed_forms_agree(self, h):
        assert abs(p0(h) - p0_second_form(h)) < 1e-12

    def test_monomer_saturated_regime(self):
        assert abs(p0(30.0) - 30.0) < 1e-12

    @given(st.floats(min_value=-20.0, max_value=20.0))
    def test_derivative_is_g(self, h):
        step = 1e-6
        fd = (p0(h + step) - p0(h - step)) / (2.0 * step)
        assert abs(fd - g(h)) < 1e-6

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            p0(math.nan)


class TestPressureFunctional:
    def test_constant_in_m_when_no_coupling(self):
        params = ModelParams(0.7, 0.0)
        ms = np.linspace(0.0, 1.0, 7)
        vals = tilde_p(ms, params)
        assert np.allclose(vals, p0(0.7), rtol=0, atol=1e-15)

    def test_frozen_value(self):
        params = ModelParams(0.0, 1.0)
        assert abs(tilde_p(0.5, params) - (-0.25 + p0(0.0))) < 1e-15

    @pytest.mark.parametrize("m,h,J", [(0.3, 0.1, 0.8), (0.62, -0.4, 2.0), (0.9, 1.0, 0.5)])
    def test_second_derivative_vs_finite_difference(self, m, h, J):
        params = ModelParams(h, J)
        step = 1e-4
        fd = (
            tilde_p(m + step, params) - 2.0 * tilde_p(m, params) + tilde_p(m - step, params)
        ) / step**2
        assert abs(tilde_p(m, params, 2) - fd) < 1e-6

    @pytest.mark.parametrize("order", [1, 3, 4])
    def test_higher_orders_vs_finite_difference(self, order):
        params = ModelParams(-0.2, 1.5)
        m, step = 0.55, 1e-4
        lower = [tilde_p(m - step, params, order - 1), tilde_p(m + step, params, order - 1)]
        fd = (lower[1] - lower[0]) / (2.0 * step)
        assert abs(tilde_p(m, params, order) - fd) < 1e-5

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            tilde_p(1.2, ModelParams(0.0, 1.0))
        with pytest.raises(ValueError):
            tilde_p(0.5, ModelParams(0.0, 1.0), order=5)


class TestRateFunction:
    def test_endpoints(self):
        assert rate_function(1.0) == 0.0
        assert rate_function(0.0) == 0.5

    def test_minimum_matches_pure_pressure(self):
        z = g(0.0)
        assert abs(rate_function(z) + p0(0.0)) < 1e-12

    def test_printed_offset_is_exposed_separately(self):
        assert abs(printed_rate_offset() + p0(0.0)) < 1e-15

    @given(st.floats(min_value=-3.0, max_value=3.0))
    def test_legendre_duality_with_pure_pressure(self, h):
        zs = np.linspace(0.0, 1.0, 2001)
        values = h * zs - np.asarray(rate_function(zs))
        i = int(np.argmax(values))
        from scipy.optimize import minimize_scalar

        res = minimize_scalar(
            lambda z: -(h * z - rate_function(z)),
            bounds=(zs[max(i - 1, 0)], zs[min(i + 1, len(zs) - 1)]),
            method="bounded",
            options={"xatol": 1e-13},
        )
        assert abs(-res.fun - p0(h)) < 1e-10
        assert abs(res.x - g(h)) < 1e-5

    def test_convexity_by_second_differences(self):
        zs = np.linspace(0.01, 0.99, 99)
        step = 1e-4
        second = (
            np.asarray(rate_function(zs + step))
            - 2.0 * np.asarray(rate_function(zs))
            + np.asarray(rate_function(zs - step))
        ) / step**2
        assert np.all(second > 0.0)

    def test_domain_error(self):
        with pytest.raises(ValueError):
            rate_function(-0.1)


class TestVariationalPressure:
    def test_reduces_to_pure_pressure_without_coupling(self):
        assert variational_pressure(ModelParams(0.0, 0.0)) == p0(0.0)
        assert abs(variational_pressure_via_rate(ModelParams(0.0, 0.0)) - p0(0.0)) < 1e-10

    def test_value_at_reference_point(self):
        # maximizer from the damped fixed-point oracle in tests/oracles.py
        from oracles import fixed_point_density

        params = ModelParams(0.2, 0.5)
        m_star = fixed_point_density(0.2, 0.5)
        assert abs(m_star - 0.7685922287442881) < 1e-12
        assert abs(variational_pressure(params) - tilde_p(m_star, params)) < 1e-12

    @pytest.mark.parametrize("h,J", [(0.0, 0.5), (-0.45, 2.0), (1.0, 3.0), (-1.0, 1.0)])
    def test_two_routes_agree(self, h, J):
        params = ModelParams(h, J)
        assert abs(
            variational_pressure(params) - variational_pressure_via_rate(params)
        ) < 1e-10
