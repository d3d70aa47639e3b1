import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis.strategies import floats

from finsler_engine.engine import jet as jm
from finsler_engine.engine.jet import Jet, JetOrderError, monomials, n_terms

coordinate = floats(min_value=-2.0, max_value=2.0, allow_nan=False)
positive = floats(min_value=0.2, max_value=3.0, allow_nan=False)


def seeds(values, order):
    return [Jet.variable(v, k, order) for k, v in enumerate(values)]


def test_monomials_are_graded():
    degrees = [sum(alpha) for alpha in monomials()[:n_terms(4)]]
    assert degrees == sorted(degrees)
    assert n_terms(4) == math.comb(8, 4)


def test_product_rule():
    x1, x2, y1, y2 = seeds((0.5, -1.0, 2.0, 3.0), 3)
    f = x1 * x2 * y1
    assert f.value == pytest.approx(-1.0)
    assert f.partial((1, 1, 0, 0)) == pytest.approx(2.0)
    assert f.partial((1, 1, 1, 0)) == pytest.approx(1.0)
    assert f.partial((0, 0, 0, 1)) == 0.0


@given(coordinate, coordinate)
def test_polynomial_partials(a, b):
    x1, x2, _, _ = seeds((a, b, 1.0, 1.0), 4)
    f = x1 ** 3 * x2
    assert f.partial((2, 1, 0, 0)) == pytest.approx(6.0 * a, abs=1e-12)
    assert f.partial((3, 0, 0, 0)) == pytest.approx(6.0 * b, abs=1e-12)
    assert f.partial((1, 0, 0, 0)) == pytest.approx(3.0 * a * a * b, abs=1e-12)


@given(positive)
def test_reciprocal_and_division(a):
    x = Jet.variable(a, 0, 3)
    inverse = 1.0 / x
    assert inverse.value == pytest.approx(1.0 / a)
    assert inverse.partial((1, 0, 0, 0)) == pytest.approx(-1.0 / a ** 2)
    assert inverse.partial((2, 0, 0, 0)) == pytest.approx(2.0 / a ** 3)
    assert np.allclose((x / x).coeffs[1:], 0.0, atol=1e-12)


@settings(max_examples=30)
@given(positive, coordinate)
def test_function_identities(a, b):
    x = Jet.variable(a, 0, 5)
    y = Jet.variable(b, 1, 5)
    assert np.allclose(jm.log(jm.exp(y)).coeffs, y.coeffs, atol=1e-10)
    assert np.allclose((jm.sqrt(x) * jm.sqrt(x)).coeffs, x.coeffs, atol=1e-10)
    unity = jm.sin(y) ** 2 + jm.cos(y) ** 2
    assert unity.value == pytest.approx(1.0)
    assert np.allclose(unity.coeffs[1:], 0.0, atol=1e-10)
    hyperbolic = jm.cosh(y) ** 2 - jm.sinh(y) ** 2
    assert np.allclose(hyperbolic.coeffs[1:], 0.0, atol=1e-8)


def test_tan_and_tanh_derivatives():
    x = Jet.variable(0.3, 0, 2)
    assert jm.tan(x).partial((1, 0, 0, 0)) == pytest.approx(1.0 / math.cos(0.3) ** 2)
    assert jm.tanh(x).partial((1, 0, 0, 0)) == pytest.approx(1.0 - math.tanh(0.3) ** 2)


def test_integer_and_real_powers_agree():
    x = Jet.variable(1.7, 2, 4)
    assert np.allclose((x ** 3).coeffs, x.power(3.0).coeffs)
    assert np.allclose((x ** -2).coeffs, x.power(-2.0).coeffs)


def test_scalar_base_power():
    x = Jet.variable(0.4, 0, 2)
    f = 2.0 ** x
    assert f.partial((1, 0, 0, 0)) == pytest.approx(math.log(2.0) * 2.0 ** 0.4)


def test_numpy_scalar_defers_to_jet():
    x = Jet.variable(1.0, 0, 2)
    for result in (np.float64(2.0) * x, x * np.float64(2.0), np.float64(1.0) + x):
        assert isinstance(result, Jet)


def test_deriv_lowers_order():
    x1, x2, _, _ = seeds((1.0, 2.0, 0.0, 0.0), 3)
    f = x1 * x1 * x2
    d = f.deriv(0)
    assert d.order == 2
    assert d.value == pytest.approx(4.0)
    assert d.deriv(1).value == pytest.approx(2.0)


def test_order_exhaustion():
    x = Jet.constant(1.0, 0)
    with pytest.raises(JetOrderError):
        x.deriv(0)
    with pytest.raises(JetOrderError):
        Jet.variable(1.0, 0, 2).partial((3, 0, 0, 0))


def test_mixed_orders_truncate():
    a = Jet.variable(1.0, 0, 3)
    b = Jet.variable(2.0, 1, 5)
    assert (a + b).order == 3
    assert (a * b).order == 3


def test_non_finite_detection():
    x = Jet.variable(-1.0, 0, 2)
    assert not jm.log(x).is_finite()
    assert jm.value_of(x) == -1.0
    assert jm.value_of(3) == 3.0
