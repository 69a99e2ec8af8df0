import math
import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from implicitquad.expression import (
    ExpressionSyntaxError,
    NonIntegerExponent,
    differentiate,
    parse_expression,
)
from implicitquad.implicit import ImplicitFunction, SqrtAtZero, as_function
from implicitquad.interval import Interval

from oracles import ANNULUS, CARDIOID, CASSINI, POLY, sym_gradient
from randexpr import random_box_and_point, random_expression


def test_parse_and_evaluate_examples():
    assert parse_expression("0.04 - (sqrt(x^2+y^2)-0.6)^2").evaluate(0.6, 0) == pytest.approx(0.04, abs=1e-15)
    assert parse_expression(POLY).evaluate(1, 1) == 2.5
    assert ImplicitFunction(ANNULUS).eval(0, 0) == pytest.approx(-0.32, abs=1e-15)


@pytest.mark.parametrize("text, offset", [("x + * y", 4), ("2*(x", 4), ("foo(x)", 0), ("", 0), ("x y", 2)])
def test_syntax_errors_carry_offsets(text, offset):
    with pytest.raises(ExpressionSyntaxError) as info:
        parse_expression(text)
    assert info.value.offset == offset


@pytest.mark.parametrize("text", ["x^0.5", "x^-1", "y^(1/2)"])
def test_non_integer_exponent(text):
    with pytest.raises(NonIntegerExponent):
        parse_expression(text)


def test_precedence():
    ev = lambda s, x=2.0, y=3.0: parse_expression(s).evaluate(x, y)  # noqa: E731
    assert ev("-2^2") == -4
    assert ev("2^3^2") == 512  # right associative
    assert ev("1 + 2*3") == 7
    assert ev("8/2/2") == 2
    assert ev("x - y - 1") == -2
    assert ev("-x^2 + abs(-y)") == -1
    assert ev("x^(1+1)") == 4


def test_parse_is_deterministic():
    assert str(parse_expression(CASSINI)) == str(parse_expression(CASSINI))
    e = parse_expression(POLY)
    assert str(parse_expression(e.to_source().replace("**", "^"))) == str(e)


def test_array_evaluation_matches_scalar():
    e = parse_expression(CARDIOID)
    rng = np.random.default_rng(1)
    x, y = rng.uniform(-1, 1, (2, 50))
    np.testing.assert_allclose(e.evaluate_array(x, y), [e.evaluate(a, b) for a, b in zip(x, y)], rtol=0, atol=1e-15)


def test_gradient_examples():
    assert ImplicitFunction("x^2 + y^2").grad(1, 2) == (2, 4)
    gx, gy = ImplicitFunction(CASSINI).grad(0.5, 0)
    assert gx == pytest.approx(0.48, abs=1e-14)
    assert gy == 0


def test_sqrt_at_zero():
    with pytest.raises(SqrtAtZero):
        ImplicitFunction(ANNULUS).grad(0, 0)


@pytest.mark.parametrize("text", [ANNULUS, CASSINI, CARDIOID, POLY, "x/(1 + y^2) - abs(x)*y"])
def test_gradient_vs_finite_differences_and_sympy(text):
    f = ImplicitFunction(text)
    sx, sy = sym_gradient(text)
    rng = np.random.default_rng(7)
    h = 1e-6
    worst = 0.0
    for x, y in rng.uniform(-1, 1, (1000, 2)):
        if "sqrt" in text and math.hypot(x, y) < 1e-3:
            continue
        if "abs" in text and abs(x) < 1e-3:
            continue
        gx, gy = f.grad(x, y)
        fdx = (f.eval(x + h, y) - f.eval(x - h, y)) / (2 * h)
        fdy = (f.eval(x, y + h) - f.eval(x, y - h)) / (2 * h)
        scale = max(1.0, math.hypot(gx, gy))
        worst = max(worst, abs(gx - fdx) / scale, abs(gy - fdy) / scale)
        if "abs" not in text:
            assert gx == pytest.approx(sx(x, y), rel=1e-12, abs=1e-12)
            assert gy == pytest.approx(sy(x, y), rel=1e-12, abs=1e-12)
    assert worst < 1e-5


def test_differentiate_structure():
    e = parse_expression("x^3*y")
    assert differentiate(e, "x").evaluate(2, 1) == 12
    assert differentiate(e, "y").evaluate(2, 1) == 8
    assert differentiate(parse_expression("3.5"), "x").evaluate(0, 0) == 0
    assert differentiate(parse_expression("x^0 + y"), "x").evaluate(2, 1) == 0


def test_natural_enclosure_examples():
    f = ImplicitFunction(ANNULUS)
    Z = f.interval_eval(Interval(0, 1), Interval(0, 1))
    # hand natural extension: 0.04 - (sqrt(2) - 0.6)^2 .. 0.04
    assert Z.lo <= 0.04 - (math.sqrt(2) - 0.6) ** 2 and Z.hi >= 0.04
    assert Z.lo < 0 < Z.hi
    Z = f.interval_eval(Interval(0.5, 0.7), Interval(0, 0.1))
    assert 0.028 <= Z.lo and Z.hi <= 0.041
    C = ImplicitFunction("2.5").interval_eval(Interval(-3, 4), Interval(0, 1))
    assert C.lo <= 2.5 <= C.hi and C.hi - C.lo <= 2 * math.ulp(2.5)


def test_taylor_form_never_wider():
    f = ImplicitFunction(CASSINI)
    for box in [(0, 1, 0, 1), (0.2, 0.3, 0.1, 0.2), (0.9, 1.0, -0.05, 0.05)]:
        X, Y = Interval(*box[:2]), Interval(*box[2:])
        nat = f.enclose(X, Y, "natural")
        tay = f.enclose(X, Y, "taylor")
        assert nat.lo <= tay.lo and tay.hi <= nat.hi
    with pytest.raises(ValueError):
        f.enclose(X, Y, "bogus")


def test_as_function_accepts_numbers_and_text():
    assert as_function(3.0).eval(1, 1) == 3.0
    assert as_function("x*y").eval(2, 3) == 6
    f = ImplicitFunction(CASSINI)
    assert as_function(f) is f


@given(
    st.sampled_from([ANNULUS, CASSINI, CARDIOID, POLY]),
    st.floats(-2, 2), st.floats(-2, 2), st.floats(1e-9, 1.0), st.floats(1e-9, 1.0),
    st.floats(0, 1), st.floats(0, 1),
)
def test_fixture_enclosure_containment(text, x0, y0, w, h, s, t):
    f = ImplicitFunction(text)
    X, Y = Interval(x0, x0 + w), Interval(y0, y0 + h)
    px, py = min(x0 + s * w, X.hi), min(y0 + t * h, Y.hi)
    v = f.eval(px, py)
    for form in ("natural", "taylor"):
        assert f.enclose(X, Y, form).contains(v)


def test_random_expression_containment():
    rng = random.Random(20240611)
    checked = 0
    while checked < 2000:
        text = random_expression(rng)
        e = parse_expression(text)
        (x0, x1, y0, y1), (px, py) = random_box_and_point(rng)
        try:
            Z = e.evaluate_interval(Interval(x0, x1), Interval(y0, y1))
        except ArithmeticError:
            continue
        try:
            v = e.evaluate(px, py)
        except (ZeroDivisionError, OverflowError):
            continue
        assert Z.contains(v), (text, (x0, x1, y0, y1), (px, py), v, Z)
        checked += 1
