import cmath
import math

import pytest

from asympush.asymfun import (
    AsymFunction,
    from_expression,
    from_json,
    lim_inf,
    lim_zero,
    make_side,
    mellin,
    mellin_finite_part,
    power_log_multiply,
    primitive,
    pure_power,
    reg_integral,
    rescale,
    scale_reg_integral,
    schwartz,
)
from asympush.logpoly import LogPolynomial
from asympush.quadrature import quad_interval

EULER_GAMMA = 0.5772156649015329


def one_over_one_plus_x(depth: int = 10) -> AsymFunction:
    zero = [(float(m), [(-1.0) ** m]) for m in range(depth)]
    inf = [(-float(m), [(-1.0) ** (m + 1)]) for m in range(1, depth)]
    return from_expression(
        "1/(1+x)", zero_terms=zero, order_zero=float(depth),
        inf_terms=inf, order_inf=depth - 1.0,
    )


def test_side_validation():
    with pytest.raises(ValueError):
        make_side([(5.0, LogPolynomial((1.0,)))], 2.0, "zero")
    with pytest.raises(ValueError):
        make_side([(-5.0, LogPolynomial((1.0,)))], 2.0, "infinity")


def test_pure_power_reg_is_zero():
    for alpha in (-2.5, -1.3, -1.0, -0.4, 0.7, -1.0 + 2.0j):
        for k in (0, 1, 2):
            assert abs(reg_integral(pure_power(alpha, k))) <= 1e-12


def test_reg_integral_exponential():
    assert reg_integral(schwartz("exp(-x)")) == pytest.approx(1.0, abs=1e-10)


def test_reg_integral_one_over_one_plus_x():
    f = one_over_one_plus_x()
    assert abs(reg_integral(f)) <= 1e-10
    F = primitive(f)
    assert lim_zero(F) == pytest.approx(-math.log(2.0), abs=1e-10)
    assert lim_inf(F) == pytest.approx(-math.log(2.0), abs=1e-10)


def test_reg_integral_linearity():
    f = schwartz("exp(-x)")
    g = schwartz("exp(-2*x)")
    s = AsymFunction(
        fn=lambda x: 2.0 * f(x) + g(x),
        exp0=make_side(
            [(t.exponent, t.poly.scale(2.0)) for t in f.exp0.terms]
            + [(t.exponent, t.poly) for t in g.exp0.terms],
            min(f.exp0.order, g.exp0.order),
            "zero",
        ),
        exp_inf=make_side([], 40.0, "infinity"),
    )
    assert reg_integral(s) == pytest.approx(
        2.0 * reg_integral(f) + reg_integral(g), abs=1e-9
    )


def test_euler_constant_from_exponential():
    g = power_log_multiply(schwartz("exp(-x)", n_taylor=12), -1.0)
    assert reg_integral(g) == pytest.approx(-EULER_GAMMA, abs=1e-10)


def test_primitive_matches_quadrature():
    f = schwartz("exp(-x)")
    F = primitive(f)
    for x in (0.5, 2.0, 7.0):
        direct, _ = quad_interval(lambda s: f(s).real, 1.0, x) if x > 1 else quad_interval(lambda s: f(s).real, x, 1.0)
        want = direct if x > 1 else -direct
        assert F(x).real == pytest.approx(want, abs=1e-9)


def test_scale_reg_integral_closed_form():
    f = one_over_one_plus_x()
    for t in (0.1, 0.5, 2.0, 10.0):
        assert scale_reg_integral(f, t) == pytest.approx(math.log(t) / t, abs=1e-8)


def test_rescale_evaluator_and_consistency():
    f = one_over_one_plus_x(depth=8)
    for t in (0.3, 4.0):
        g = rescale(f, t)
        assert g(0.7) == pytest.approx(f(0.7 * t), abs=1e-12)
        assert reg_integral(g) == pytest.approx(scale_reg_integral(f, t), abs=1e-8)


def test_mellin_reflection_formula():
    f = one_over_one_plus_x(depth=12)
    for z in (0.5, 0.3, 1.5):
        want = math.pi / math.sin(math.pi * z)
        got = mellin(f, z).value
        assert got == pytest.approx(want, abs=1e-8)


def test_mellin_gamma_values():
    f = schwartz("exp(-x)", n_taylor=10)
    assert mellin(f, 2.0).value == pytest.approx(1.0, abs=1e-9)  # Gamma(2)
    assert mellin(f, 3.5).value == pytest.approx(math.gamma(3.5), abs=1e-7)


def test_mellin_pole_reported():
    f = schwartz("exp(-x)", n_taylor=10)
    r = mellin(f, 0.0)
    assert r.value is None
    assert any(abs(p.location) < 1e-9 and p.order == 1 for p in r.poles)


def test_mellin_finite_part_matches_reg():
    for f in (schwartz("exp(-x)", n_taylor=10), one_over_one_plus_x(depth=12)):
        assert mellin_finite_part(f, 1.0) == pytest.approx(reg_integral(f), abs=1e-6)


def test_finite_part_at_regular_point_is_value():
    f = power_log_multiply(schwartz("exp(-x)", n_taylor=12), -0.5)
    # no pole at 1: the transform there is just the convergent integral
    assert mellin_finite_part(f, 1.0) == pytest.approx(math.gamma(0.5), abs=1e-7)


def test_power_log_multiply_shifts_data():
    f = schwartz("exp(-x)")
    g = power_log_multiply(f, -0.5, 1)
    assert g(2.0) == pytest.approx(2.0**-0.5 * math.log(2.0) * math.exp(-2.0), abs=1e-12)
    assert any(abs(t.exponent + 0.5) < 1e-9 for t in g.exp0.terms)


def test_nth_deriv_at_zero_symbolic_and_numeric():
    f = schwartz("exp(-3*x)")
    assert f.nth_deriv_at_zero(2) == pytest.approx(9.0, abs=1e-12)
    g = AsymFunction(
        fn=lambda x: math.exp(-3.0 * x),
        exp0=make_side([], 1.0, "zero"),
        exp_inf=make_side([], 1.0, "infinity"),
    )
    assert g.nth_deriv_at_zero(2) == pytest.approx(9.0, rel=1e-4)


def test_support_clips_evaluator():
    f = from_expression("1", zero_terms=[(0.0, [1.0])], order_zero=5.0,
                        order_inf=40.0, support=(0.0, 1.0))
    assert f(0.5) == 1.0
    assert f(2.0) == 0.0
    assert reg_integral(f) == pytest.approx(1.0, abs=1e-10)


def test_from_json_roundtrip():
    d = {
        "expr": "exp(-x)",
        "zero": {
            "order": 3.0,
            "terms": [
                {"exponent": [0.0, 0.0], "logCoeffs": [[1.0, 0.0]]},
                {"exponent": [1.0, 0.0], "logCoeffs": [[-1.0, 0.0]]},
                {"exponent": [2.0, 0.0], "logCoeffs": [[0.5, 0.0]]},
            ],
        },
        "infinity": {"order": 40.0, "terms": []},
    }
    f = from_json(d)
    assert f(1.0) == pytest.approx(math.exp(-1.0))
    assert reg_integral(f) == pytest.approx(1.0, abs=1e-9)


def test_complex_exponent_reg():
    alpha = -1.0 + 3.0j
    f = pure_power(alpha, 1)
    assert abs(reg_integral(f)) <= 1e-12
    assert isinstance(f(2.0), complex)
