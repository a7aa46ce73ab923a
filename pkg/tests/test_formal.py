import random

import pytest
from gmpy2 import mpq
from hypothesis import given, strategies as st

from wzpi.numerics.formal import (ConvergenceViolation, FormalSeries, ParameterPole, binomial_series,
                                  clausen_check, clausen_derivative_check, clausen_samples, clausen_sides,
                                  euler_check, hypergeometric_series)

ORDER = 8
coeffs = st.lists(st.fractions(min_value=-9, max_value=9, max_denominator=9), min_size=ORDER + 1,
                  max_size=ORDER + 1)
series = coeffs.map(FormalSeries)


def _cauchy_square(c, order):
    return [sum(c[i] * c[n - i] for i in range(n + 1)) for n in range(order + 1)]


def _poch(a, n):
    out = mpq(1)
    for i in range(n):
        out *= a + i
    return out


def test_clausen_first_identity_against_direct_square():
    a, b, order = mpq(1, 4), mpq(1, 4), 30
    base = [_poch(a, n) * _poch(b, n) / (_poch(a + b + mpq(1, 2), n) * _poch(1, n)) for n in range(order + 1)]
    top = [_poch(2 * a, n) * _poch(2 * b, n) * _poch(a + b, n)
           / (_poch(a + b + mpq(1, 2), n) * _poch(2 * a + 2 * b, n) * _poch(1, n)) for n in range(order + 1)]
    assert _cauchy_square(base, order) == top
    assert clausen_check(1, a, b, order)


def test_clausen_degenerate_parameter():
    res = clausen_check(1, 0, mpq(2, 7), 30)
    assert res.passed
    left, right = clausen_sides(1, 0, mpq(2, 7), 30)
    assert left.coeffs == right.coeffs == (1,) + (0,) * 30


def test_clausen_wrong_argument_fails_at_z2():
    z = FormalSeries.variable(30)
    wrong = (z * (FormalSeries.constant(1, 30) + z)).scale(4)
    res = clausen_check(2, mpq(1, 3), mpq(1, 5), 30, argument=wrong)
    assert not res.passed
    assert res.first_failure == 2


@pytest.mark.parametrize("which,a,b,order", [(1, mpq(1, 6), mpq(1, 3), 25), (3, mpq(1, 2), mpq(1, 4), 20)])
def test_clausen_derivative(which, a, b, order):
    assert clausen_derivative_check(which, a, b, order)


def test_derivative_order_zero_vacuous():
    assert clausen_derivative_check(2, mpq(1, 3), mpq(1, 5), 0)


def test_parameter_pole():
    with pytest.raises(ParameterPole):
        hypergeometric_series([mpq(1, 2)], [mpq(-3), 1], 10)


def test_third_identity_needs_prefactor():
    # without the (1 - z)^a factor the two sides differ at z^1
    left, right = clausen_sides(3, mpq(1, 3), mpq(2, 5), 10)
    bare = left * binomial_series(mpq(-1, 3), 10)
    assert bare.first_difference(right) == 1


def test_binomial_series_inverse():
    s = binomial_series(mpq(2, 3), 12) * binomial_series(mpq(-2, 3), 12)
    assert s == FormalSeries.constant(1, 12)


def test_samples_are_deterministic():
    assert clausen_samples(2, 5) == clausen_samples(2, 5)


@pytest.mark.parametrize("which", [1, 2, 3])
def test_clausen_random_samples(which):
    for a, b in clausen_samples(which, 20, 30, seed=11):
        assert clausen_check(which, a, b, 30), (a, b)


def test_euler_instance():
    assert euler_check(mpq(2, 3), mpq(5, 6), 1, mpq(2, 27), 40)


def test_euler_trivial_cases():
    assert euler_check(mpq(1, 3), mpq(1, 7), mpq(5, 2), 0, 30)
    assert euler_check(0, mpq(1, 7), mpq(5, 2), mpq(1, 3), 30)


def test_euler_rejects_large_z():
    with pytest.raises(ConvergenceViolation):
        euler_check(mpq(1, 3), mpq(1, 7), mpq(5, 2), mpq(1, 2), 30)


def test_euler_rejects_pole():
    with pytest.raises(ParameterPole):
        euler_check(mpq(1, 3), mpq(1, 7), -2, mpq(1, 5), 30)


def test_euler_random_admissible():
    rng = random.Random(5)
    for _ in range(10):
        a = mpq(rng.randint(-12, 12), rng.randint(1, 12))
        b = mpq(rng.randint(-12, 12), rng.randint(1, 12))
        c = mpq(rng.randint(1, 24), rng.randint(1, 12))
        z = mpq(rng.randint(-9, 9), rng.randint(20, 40))
        assert euler_check(a, b, c, z, 40), (a, b, c, z)


@given(series, series, series)
def test_product_associative(f, g, h):
    assert (f * g) * h == f * (g * h)


@given(series, series)
def test_truncated_product_matches_cauchy(f, g):
    prod = f * g
    full = [sum(f.coeffs[i] * g.coeffs[n - i] for i in range(n + 1)) for n in range(ORDER + 1)]
    assert list(prod.coeffs) == full


@given(series)
def test_compose_with_variable_is_identity(f):
    assert f.compose(FormalSeries.variable(ORDER)) == f
