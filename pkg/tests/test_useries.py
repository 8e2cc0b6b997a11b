import math
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cavitypairing.useries import (
    ExpansionPoleError,
    RationalFunction as RF,
    apply_L_mixture,
    f_factor,
    perturbative_weight,
    rf_add,
    rf_div,
    rf_mul,
    taylor,
)

ONE = RF((1,))
U = RF((0, 1))
GEOM = ONE / RF((1, -1))  # 1/(1-u)


def test_inverse_pair_cancels():
    assert rf_mul(GEOM, RF((1, -1))) == ONE


def test_sum_of_reciprocal_factors():
    lhs = rf_add(f_factor(1), RF((1, -1), (1, 1)))
    assert lhs == RF((2, 0, 2), (1, 0, -1))  # (2+2u^2)/(1-u^2)


def test_div_identity():
    assert rf_div(ONE, ONE) == ONE


def test_div_by_zero_function_rejected():
    with pytest.raises(ZeroDivisionError):
        rf_div(ONE, RF((0,)))


def test_geometric_series():
    assert taylor(GEOM, 4) == [1, 1, 1, 1, 1]


def test_f_squared_series():
    assert taylor(f_factor(2), 4) == [1, 4, 8, 12, 16]


def test_f_series():
    assert taylor(f_factor(1), 3) == [1, 2, 2, 2]


def test_expansion_pole_rejected():
    with pytest.raises(ExpansionPoleError):
        taylor(ONE / U, 3)


def test_order_cap():
    with pytest.raises(ValueError):
        taylor(GEOM, 65)
    assert len(taylor(GEOM, 65, order_cap=65)) == 66


def test_f_factor_construction():
    f2 = f_factor(2)
    assert f2.num == (F(1), F(2), F(1))
    assert f2 == f_factor(1) * f_factor(1)
    assert f_factor(1)(0) == 1
    with pytest.raises(ValueError):
        f_factor(0)


def test_perturbative_weight_examples():
    assert all(perturbative_weight(0, n) == 1 for n in range(6))
    assert perturbative_weight(1, 1) == 3
    assert perturbative_weight(1, 2) == 5


@pytest.mark.parametrize("p", range(0, 5))
@pytest.mark.parametrize("n", range(0, 9))
def test_perturbative_weight_combinatorial_oracle(p, n):
    # independent route: sum_j C(p, j) * C(n - j + p, p)
    expect = sum(
        math.comb(p, j) * math.comb(n - j + p, p) for j in range(min(p, n) + 1)
    )
    assert perturbative_weight(p, n) == expect


def test_apply_L_mixture_point_mass():
    assert apply_L_mixture(GEOM, {0: 1}) == 1


def test_apply_L_mixture_uniform():
    assert apply_L_mixture(f_factor(2), {0: F(1, 2), 1: F(1, 2)}) == F(5, 2)


def test_apply_L_mixture_boltzmann_vs_closed_form():
    # truncated geometric weights on f(u)^2/(1-u) resum to f(x)^2
    x = F(1, 3)
    n_max = 40
    z = sum(x**n for n in range(n_max + 1))
    weights = {n: x**n / z for n in range(n_max + 1)}
    rf = f_factor(2) * GEOM
    got = apply_L_mixture(rf, weights, order=n_max)
    closed = ((1 + x) / (1 - x)) ** 2
    assert abs(float(got - closed)) < 1e-10


def test_apply_L_mixture_validation():
    with pytest.raises(ValueError):
        apply_L_mixture(GEOM, {0: F(1, 2), 5: F(1, 2)}, order=3)
    with pytest.raises(ValueError):
        apply_L_mixture(GEOM, {0: F(3, 4)})


def test_thermal_closure_identity_exact():
    # algebraic core of the thermal rearrangement, exact over rationals
    for k in range(1, 21):
        x = F(k, 21)
        assert 1 + 4 * x / (1 - x) ** 2 == ((1 + x) / (1 - x)) ** 2


# -- property tests ---------------------------------------------------------

_coeff = st.fractions(
    min_value=-4, max_value=4, max_denominator=8
)


@st.composite
def rationals(draw):
    """Random rational function with a nonzero denominator at u = 0."""
    num = draw(st.lists(_coeff, min_size=1, max_size=4))
    den = draw(st.lists(_coeff, min_size=1, max_size=4))
    d0 = draw(st.sampled_from([F(1), F(-1), F(2), F(1, 2), F(3)]))
    return RF(num, [d0] + den)


@settings(max_examples=60, deadline=None)
@given(rationals(), rationals(), rationals())
def test_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + b == b + a
    assert a * b == b * a


@settings(max_examples=40, deadline=None)
@given(rationals(), rationals(), st.integers(min_value=0, max_value=32))
def test_taylor_of_product_is_cauchy_convolution(a, b, order):
    ta = taylor(a, order)
    tb = taylor(b, order)
    conv = [
        sum(ta[k] * tb[n - k] for k in range(n + 1)) for n in range(order + 1)
    ]
    assert taylor(a * b, order) == conv


@settings(max_examples=40, deadline=None)
@given(rationals())
def test_reduction_is_canonical(a):
    # re-wrapping the reduced pair must be a fixed point
    again = RF(a.num, a.den)
    assert again == a
    assert a.den[-1] == 1  # monic denominator
