"""
Tests for truncated Taylor jets and the finite-difference oracle.

Coefficients use the derivative convention: coeffs[k] is the k-th
derivative value, not the k-th Taylor coefficient.
"""

import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from src.core.errors import JetDomainError, JetOrderError
from src.core.jets import (
    Jet,
    Jet2,
    Jet3,
    fd_jet,
    jet_arith,
    jet_const,
    jet_cos,
    jet_func,
    jet_pow,
    jet_sin,
    jet_sqrt,
    jet_var,
)

PARAMS = st.floats(min_value=-3.0, max_value=3.0, allow_nan=False, allow_infinity=False)
ORDERS = st.integers(min_value=0, max_value=4)


@st.composite
def jets(draw, order=None, min_value=-5.0, max_value=5.0):
    k = draw(ORDERS) if order is None else order
    coeffs = draw(
        st.lists(
            st.floats(min_value=min_value, max_value=max_value, allow_nan=False, allow_infinity=False),
            min_size=k + 1,
            max_size=k + 1,
        )
    )
    return Jet(coeffs)


# =============================================================================
# Construction
# =============================================================================


class TestConstruction:
    @pytest.mark.parametrize(
        "c, order, expected",
        [(5.0, 2, [5.0, 0.0, 0.0]), (0.0, 0, [0.0]), (-1.5, 4, [-1.5, 0.0, 0.0, 0.0, 0.0])],
    )
    def test_jet_const(self, c, order, expected):
        assert jet_const(c, order).coeffs.tolist() == expected

    @pytest.mark.parametrize(
        "t0, order, expected",
        [(2.0, 2, [2.0, 1.0, 0.0]), (0.0, 1, [0.0, 1.0]), (math.pi, 3, [math.pi, 1.0, 0.0, 0.0])],
    )
    def test_jet_var(self, t0, order, expected):
        assert jet_var(t0, order).coeffs.tolist() == expected

    def test_jet_var_order_zero_has_no_slope(self):
        assert jet_var(1.25, 0).coeffs.tolist() == [1.25]

    @pytest.mark.parametrize("order", [-1, 5, 7])
    def test_order_out_of_range(self, order):
        with pytest.raises(JetOrderError):
            jet_const(1.0, order)
        with pytest.raises(JetOrderError):
            jet_var(1.0, order)

    def test_too_many_coefficients(self):
        with pytest.raises(JetOrderError):
            Jet([0.0] * 6)

    def test_coefficients_are_read_only(self):
        jet = jet_var(1.0, 2)
        with pytest.raises(ValueError):
            jet.coeffs[0] = 3.0

    def test_vector_jets_require_equal_orders(self):
        with pytest.raises(JetOrderError):
            Jet2(jet_var(0.0, 2), jet_var(0.0, 3))
        with pytest.raises(JetOrderError):
            Jet3(jet_var(0.0, 2), jet_var(0.0, 2), jet_var(0.0, 1))

    def test_truncate_and_derivative(self):
        jet = Jet([1.0, 2.0, 3.0, 4.0])
        assert jet.truncate(1).coeffs.tolist() == [1.0, 2.0]
        assert jet.derivative().coeffs.tolist() == [2.0, 3.0, 4.0]
        with pytest.raises(JetOrderError):
            jet.truncate(4)
        with pytest.raises(JetOrderError):
            jet_const(1.0, 0).derivative()


# =============================================================================
# Arithmetic
# =============================================================================


class TestArithmetic:
    def test_leibniz_product(self):
        result = jet_arith(Jet([1.0, 2.0, 0.0]), Jet([3.0, 1.0, 0.0]), "mul")
        assert result.coeffs.tolist() == [3.0, 7.0, 4.0]

    def test_sum(self):
        assert jet_arith(Jet([1.0, 1.0]), Jet([1.0, -1.0]), "add").coeffs.tolist() == [2.0, 0.0]

    def test_difference(self):
        assert jet_arith(Jet([1.0, 1.0]), Jet([1.0, -1.0]), "sub").coeffs.tolist() == [0.0, 2.0]

    @given(jets(order=4))
    def test_self_quotient_is_one(self, g):
        assume(abs(g[0]) > 1e-2)
        result = jet_arith(g, g, "div")
        np.testing.assert_allclose(result.coeffs, [1.0, 0.0, 0.0, 0.0, 0.0], atol=1e-6)

    def test_division_by_zero_value_part(self):
        with pytest.raises(JetDomainError):
            jet_arith(jet_var(1.0, 2), Jet([0.0, 1.0, 0.0]), "div")
        with pytest.raises(JetDomainError):
            jet_var(1.0, 2) / 0.0

    def test_mismatched_orders(self):
        with pytest.raises(JetOrderError):
            jet_var(0.0, 2) + jet_var(0.0, 3)

    def test_unknown_operation(self):
        with pytest.raises(ValueError):
            jet_arith(jet_var(0.0, 1), jet_var(0.0, 1), "pow")

    def test_scalars_mix_on_both_sides(self):
        t = jet_var(2.0, 2)
        assert (3.0 - t).coeffs.tolist() == [1.0, -1.0, 0.0]
        assert (np.float64(2.0) * t).coeffs.tolist() == [4.0, 2.0, 0.0]
        np.testing.assert_allclose((1.0 / t).coeffs, [0.5, -0.25, 0.25])

    @given(PARAMS, jets(order=3, min_value=-2.0, max_value=2.0))
    def test_product_quotient_inverse(self, t0, a):
        b = jet_cos(jet_var(t0, 3)) + 2.0
        np.testing.assert_allclose(((a * b) / b).coeffs, a.coeffs, atol=1e-9)

    @given(PARAMS)
    def test_product_rule_against_double_angle(self, t0):
        t = jet_var(t0, 4)
        product = jet_sin(t) * jet_cos(t)
        double = 0.5 * jet_sin(2.0 * t)
        np.testing.assert_allclose(product.coeffs, double.coeffs, atol=1e-12)


# =============================================================================
# Elementary functions
# =============================================================================


class TestFunctions:
    def test_sin_at_zero(self):
        assert jet_func(jet_var(0.0, 2), "sin").coeffs.tolist() == [0.0, 1.0, 0.0]

    def test_sqrt_of_constant(self):
        assert jet_func(jet_const(4.0, 1), "sqrt").coeffs.tolist() == [2.0, 0.0]

    def test_sqrt_chain_rule(self):
        # (sqrt g)'' = g''/(2 sqrt g) - g'^2 / (4 g^(3/2)) = -1 for g = 1, g' = 2, g'' = 0
        np.testing.assert_allclose(jet_sqrt(Jet([1.0, 2.0, 0.0])).coeffs, [1.0, 1.0, -1.0])

    @pytest.mark.parametrize("value", [0.0, -1.0])
    def test_sqrt_domain(self, value):
        with pytest.raises(JetDomainError):
            jet_func(jet_const(value, 2), "sqrt")

    def test_fractional_power_of_negative_value(self):
        with pytest.raises(JetDomainError):
            jet_pow(jet_const(-2.0, 1), 1.5)

    def test_pow_const_requires_exponent(self):
        with pytest.raises(ValueError):
            jet_func(jet_var(1.0, 2), "pow_const")

    @given(PARAMS)
    def test_faa_di_bruno_to_order_four(self, t0):
        u = t0 * t0
        s, c = math.sin(u), math.cos(u)
        expected = [
            s,
            2.0 * t0 * c,
            2.0 * c - 4.0 * t0**2 * s,
            -12.0 * t0 * s - 8.0 * t0**3 * c,
            -12.0 * s - 48.0 * t0**2 * c + 16.0 * t0**4 * s,
        ]
        t = jet_var(t0, 4)
        np.testing.assert_allclose(jet_sin(t * t).coeffs, expected, rtol=1e-12, atol=1e-10)

    @given(PARAMS)
    def test_integer_power_matches_repeated_product(self, t0):
        t = jet_var(t0, 4)
        np.testing.assert_allclose(jet_pow(t, 3).coeffs, (t * t * t).coeffs, atol=1e-12)

    @given(st.floats(min_value=0.1, max_value=10.0))
    def test_sqrt_squares_back(self, x0):
        t = jet_var(x0, 4)
        root = jet_sqrt(t * t + 1.0)
        np.testing.assert_allclose((root * root).coeffs, (t * t + 1.0).coeffs, rtol=1e-12, atol=1e-12)


# =============================================================================
# Finite-difference oracle
# =============================================================================


class TestFiniteDifferences:
    def test_sine_slope(self):
        estimate = fd_jet(math.sin, 0.0, 1, 1e-5)
        assert estimate[0] == 0.0
        assert estimate[1] == pytest.approx(1.0, abs=1e-9)

    def test_parabola(self):
        estimate = fd_jet(lambda u: u * u, 3.0, 2, 1e-4)
        np.testing.assert_allclose(estimate.coeffs, [9.0, 6.0, 2.0], atol=1e-5)

    @settings(max_examples=25)
    @given(PARAMS)
    def test_wide_stencil_matches_jets(self, t0):
        analytic = jet_sin(jet_var(t0, 4))
        estimate = fd_jet(math.sin, t0, 4, 1e-2, accuracy=4)
        np.testing.assert_allclose(estimate.coeffs, analytic.coeffs, atol=1e-5)

    def test_invalid_step_and_accuracy(self):
        with pytest.raises(ValueError):
            fd_jet(math.sin, 0.0, 1, 0.0)
        with pytest.raises(ValueError):
            fd_jet(math.sin, 0.0, 1, 1e-3, accuracy=6)

    def test_errors_from_the_function_propagate(self):
        def broken(u):
            raise JetDomainError("outside")

        with pytest.raises(JetDomainError):
            fd_jet(broken, 0.0, 2, 1e-3)
