import math

import pytest

from asympush.logpoly import (
    LogPolynomial,
    PoleError,
    moment_tail,
    moment_unit_interval,
)
from asympush.quadrature import quad_01, quad_1inf


def test_trailing_zeros_stripped_and_degree():
    p = LogPolynomial((1.0, 2.0, 0.0, 0.0))
    assert p.coeffs == (1.0, 2.0)
    assert p.degree == 1
    assert LogPolynomial(()).degree == -1
    assert LogPolynomial((0.0,)).is_zero


def test_evaluation_horner():
    p = LogPolynomial((1.0, -2.0, 3.0))
    L = 0.7
    assert p(L) == pytest.approx(1.0 - 2.0 * L + 3.0 * L * L)


def test_add_scale_shift():
    p = LogPolynomial((1.0, 1.0))
    q = LogPolynomial((0.0, -1.0, 2.0))
    assert (p + q).coeffs == (1.0, 0.0, 2.0)
    assert p.scale(3.0).coeffs == (3.0, 3.0)
    # shifting the argument: p(L + c) evaluated directly
    c = 0.31
    assert p.shift(c)(1.1) == pytest.approx(p(1.1 + c))


def test_antiderivative_derivative_inverse():
    p = LogPolynomial((2.0, -1.0, 0.5))
    assert p.antiderivative().derivative().coeffs == p.coeffs
    assert p.antiderivative().coefficient(0) == 0.0


def test_times_log_power():
    p = LogPolynomial((1.0, 2.0))
    assert p.times_log_power(2).coeffs == (0.0, 0.0, 1.0, 2.0)


def test_moment_unit_interval_closed_form_vs_quadrature():
    for alpha, k in [(-0.5, 0), (0.3, 1), (1.5, 2), (-0.9, 2)]:
        exact = moment_unit_interval(alpha, k)
        num, _ = quad_01(lambda x: x**alpha * math.log(x) ** k)
        # quadrature struggles near the strong singularity, hence rel not abs
        assert exact == pytest.approx(num, rel=1e-6, abs=1e-9)


def test_moment_tail_closed_form_vs_quadrature():
    for alpha, k in [(-1.5, 0), (-2.3, 1), (-3.0, 2)]:
        exact = moment_tail(alpha, k)
        num, _ = quad_1inf(lambda x: x**alpha * math.log(x) ** k)
        assert exact == pytest.approx(num, abs=1e-9)


def test_moment_cancellation_identity():
    # for every exponent away from -1 the two halves cancel exactly
    for alpha in (-2.5, -1.3, -0.4, 0.7, 1.0 + 2.0j):
        for k in range(4):
            total = moment_unit_interval(alpha, k) + moment_tail(alpha, k)
            assert abs(total) <= 1e-12 * (1.0 + abs(moment_tail(alpha, k)))


def test_moment_pole_at_minus_one():
    with pytest.raises(PoleError):
        moment_unit_interval(-1.0, 0)
    with pytest.raises(PoleError):
        moment_tail(-1.0 + 1e-12, 2)


def test_complex_exponent_moment():
    alpha = -0.5 + 1.0j
    exact = moment_unit_interval(alpha, 1)
    num, _ = quad_01(lambda x: complex(x) ** alpha * math.log(x))
    assert exact == pytest.approx(num, abs=1e-9)
