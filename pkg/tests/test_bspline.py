import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from implicitquad.bspline import (
    BSplineSurface,
    OutOfKnotRange,
    bspline_basis_row,
    dump_spline,
    find_span,
    load_spline,
)
from implicitquad.implicit import ImplicitFunction
from implicitquad.interval import Interval
from implicitquad.problem import load_problem

from oracles import KNOTS, P, cox_de_boor, spline_scipy, spline_scipy_grid


@pytest.fixture(scope="module")
def surface():
    return BSplineSurface.uniform_degree(KNOTS, KNOTS, 2, P)


def test_basis_row_endpoints():
    np.testing.assert_array_equal(bspline_basis_row(KNOTS, 2, 0.0), [1, 0, 0, 0, 0])
    np.testing.assert_array_equal(bspline_basis_row(KNOTS, 2, 1.0), [0, 0, 0, 0, 1])


@pytest.mark.parametrize("t", [0.5, 0.0, 0.3, 0.7, 0.123, 0.999, 1.0])
def test_basis_row_vs_recursion(t):
    want = [cox_de_boor(KNOTS, i, 2, t) for i in range(5)]
    np.testing.assert_allclose(bspline_basis_row(KNOTS, 2, t), want, rtol=0, atol=1e-15)


def test_partition_of_unity():
    rng = np.random.default_rng(3)
    knots = [0, 0, 0, 0, 0.2, 0.25, 0.6, 1, 1, 1, 1]
    for t in rng.uniform(0, 1, 1000):
        for kn, p in ((KNOTS, 2), (knots, 3)):
            row = bspline_basis_row(kn, p, t)
            assert np.all(row >= 0)
            assert abs(row.sum() - 1) <= 1e-12


def test_find_span():
    assert find_span(KNOTS, 2, 0.0) == 2
    assert find_span(KNOTS, 2, 0.3) == 3
    assert find_span(KNOTS, 2, 1.0) == 4


@pytest.mark.parametrize("t", [-1e-9, 1.0 + 1e-9, math.nan])
def test_out_of_range(t, surface):
    with pytest.raises(OutOfKnotRange):
        bspline_basis_row(KNOTS, 2, t)
    with pytest.raises(OutOfKnotRange):
        surface.evaluate(t, 0.5)


def test_invalid_surfaces():
    with pytest.raises(ValueError):
        BSplineSurface.uniform_degree(KNOTS, KNOTS, 2, np.zeros((4, 5)))
    with pytest.raises(ValueError):
        BSplineSurface.uniform_degree([0, 0, 0.3, 1, 1], KNOTS, 2, np.zeros((2, 5)))
    with pytest.raises(ValueError):
        BSplineSurface.uniform_degree([0, 0, 0, 0.7, 0.3, 1, 1, 1], KNOTS, 2, P)


def test_corner_interpolation(surface):
    assert surface.evaluate(0, 0) == -1
    assert surface.evaluate(1, 1) == pytest.approx(0.3, abs=1e-15)
    assert surface.evaluate(0, 1) == pytest.approx(-4, abs=1e-15)
    assert surface.evaluate(1, 0) == pytest.approx(-0.2, abs=1e-15)


def test_matches_scipy(surface):
    xs = np.linspace(0, 1, 41)
    want = spline_scipy_grid(xs, xs)
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    np.testing.assert_allclose(surface.evaluate_array(X, Y), want, rtol=0, atol=1e-13)
    rng = np.random.default_rng(11)
    for x, y in rng.uniform(0, 1, (200, 2)):
        assert surface.evaluate(x, y) == pytest.approx(spline_scipy(x, y), abs=1e-13)


def test_derivative_vs_finite_differences(surface):
    f = ImplicitFunction.from_spline(surface)
    rng = np.random.default_rng(5)
    h = 1e-6
    for x, y in rng.uniform(0.01, 0.99, (1000, 2)):
        gx, gy = f.grad(x, y)
        fdx = (f.eval(x + h, y) - f.eval(x - h, y)) / (2 * h)
        fdy = (f.eval(x, y + h) - f.eval(x, y - h)) / (2 * h)
        scale = max(1.0, math.hypot(gx, gy))
        # kinks in the derivative at knot lines are fine for a central difference straddling them
        near_knot = min(abs(x - k) for k in (0.3, 0.7)) < 2 * h or min(abs(y - k) for k in (0.3, 0.7)) < 2 * h
        if not near_knot:
            assert abs(gx - fdx) / scale < 1e-5
            assert abs(gy - fdy) / scale < 1e-5


@given(st.floats(0, 1), st.floats(0, 1), st.floats(0, 0.5), st.floats(0, 0.5), st.floats(0, 1), st.floats(0, 1))
def test_interval_enclosure_contains_samples(x0, y0, w, h, s, t):
    surface = BSplineSurface.uniform_degree(KNOTS, KNOTS, 2, P)
    x1, y1 = min(1.0, x0 + w), min(1.0, y0 + h)
    Z = surface.evaluate_interval(Interval(x0, x1), Interval(y0, y1))
    px, py = x0 + s * (x1 - x0), y0 + t * (y1 - y0)
    px, py = min(px, x1), min(py, y1)
    assert Z.contains(surface.evaluate(px, py))


def test_enclosure_is_reasonably_tight(surface):
    Z = surface.evaluate_interval(Interval(0, 1), Interval(0, 1))
    assert Z.lo >= min(map(min, P)) - 1e-12 and Z.hi <= max(map(max, P)) + 1e-12
    xs = np.linspace(0.31, 0.69, 30)
    vals = spline_scipy_grid(xs, xs)
    Z = surface.evaluate_interval(Interval(0.31, 0.69), Interval(0.31, 0.69))
    assert Z.lo <= vals.min() and vals.max() <= Z.hi
    assert Z.width <= 3 * (vals.max() - vals.min())


def test_load_dump_round_trip(tmp_path, surface):
    path = tmp_path / "s.ini"
    dump_spline(surface, path)
    again = load_spline(path)
    np.testing.assert_array_equal(again.coeffs, surface.coeffs)
    np.testing.assert_array_equal(again.knots_x, surface.knots_x)
    assert again.degree_x == again.degree_y == 2


def test_bundled_spline_matches_data():
    spec = load_problem("spline")
    body = spec.function.body
    np.testing.assert_array_equal(body.coeffs, np.asarray(P, float))
    np.testing.assert_array_equal(body.knots_x, KNOTS)
    assert body.degree_x == 2


def test_interior_knots(surface):
    kx, ky = surface.interior_knots()
    np.testing.assert_array_equal(kx, [0.3, 0.7])
