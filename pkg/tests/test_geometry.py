import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from implicitquad.classify import Cell
from implicitquad.geometry import (
    ROOT_TOL,
    AmbiguousEdge,
    DegenerateConfiguration,
    GeometryError,
    NoIntersections,
    QuadraticBezier,
    VanishingGradient,
    analyze_boundary_cell,
    bezier_arc_length,
    build_quadratic_bezier,
    find_edge_intersections,
    sampson_distance,
    tangent_at,
)
from implicitquad.implicit import ImplicitFunction

from oracles import ANNULUS, CASSINI, bezier_length_simpson


def pts(edge_points):
    return [e.point for e in edge_points]


def test_linear_crossings():
    assert pts(find_edge_intersections(ImplicitFunction("y - 0.5"), Cell(0, 1, 0, 1))) == [(1, 0.5), (0, 0.5)]


def test_annulus_root_on_bottom_edge():
    f = ImplicitFunction(ANNULUS)
    hits = find_edge_intersections(f, Cell(0.5, 1, 0, 0.2))
    x, y = hits[0].point
    assert y == 0 and x == pytest.approx(0.8, abs=1e-12)
    assert abs(f.eval(x, y)) <= 1e-12


def test_roots_are_counterclockwise():
    hits = find_edge_intersections(ImplicitFunction(ANNULUS), Cell(0.5, 1, 0, 0.2))
    assert [e.s for e in hits] == sorted(e.s for e in hits)


def test_closed_loop_inside_cell():
    # small circle: no edge crossing at all
    with pytest.raises(NoIntersections):
        find_edge_intersections(ImplicitFunction("0.01 - x^2 - y^2"), Cell(-1, 1, -1, 1))
    # right Cassini loop, |x| <= sqrt(0.98); the loop touches x = 0 at the origin
    f = ImplicitFunction(CASSINI)
    cell = Cell(0, 1, -0.5, 0.5)
    assert math.sqrt(0.98) < cell.x1
    with pytest.raises(NoIntersections):
        find_edge_intersections(f, cell, check_ambiguity=False)
    with pytest.raises(AmbiguousEdge):
        find_edge_intersections(f, cell)


def test_ambiguous_edge():
    # two roots on the bottom edge, same sign at both ends
    with pytest.raises(AmbiguousEdge):
        find_edge_intersections(ImplicitFunction("0.01 - x^2 - (y + 0.05)^2"), Cell(-1, 1, 0, 1))


def test_tangents():
    tx, ty = tangent_at(ImplicitFunction("1 - x^2 - y^2"), (1, 0))
    assert tx == 0 and abs(ty) == 1
    tx, ty = tangent_at(ImplicitFunction("y - 0.5"), (0.3, 0.5))
    assert abs(tx) == 1 and ty == 0
    with pytest.raises(VanishingGradient):
        tangent_at(ImplicitFunction("x*y"), (0, 0))


def test_bezier_examples():
    b = build_quadratic_bezier(ImplicitFunction("1 - x^2 - y^2"), (1, 0), (0, 1))
    assert b.p1 == pytest.approx((1, 1), abs=1e-14)
    b = build_quadratic_bezier(ImplicitFunction("y"), (0, 0), (1, 0))
    assert b.p1 == (0.5, 0)
    f = ImplicitFunction("y - x^2")
    b = build_quadratic_bezier(f, (-0.5, 0.25), (0.5, 0.25), Cell(-0.5, 0.5, 0, 0.5))
    assert b.p1 == pytest.approx((0, -0.25), abs=1e-14)
    for x, y in b.point(np.linspace(0, 1, 11)):
        assert y == pytest.approx(x * x, abs=1e-14)
    with pytest.raises(DegenerateConfiguration):
        build_quadratic_bezier(f, (0.1, 0.01), (0.1, 0.01))


def test_arc_lengths():
    assert bezier_arc_length(QuadraticBezier((0, 0), (0.5, 0), (1, 0))) == pytest.approx(1, abs=1e-15)
    b = QuadraticBezier((1, 0), (1, 1), (0, 1))
    ref = bezier_length_simpson(b.p0, b.p1, b.p2)
    assert ref == pytest.approx(1.6232, abs=1e-4)
    assert bezier_arc_length(b) == pytest.approx(ref, rel=1e-10)
    p = (0.3, 0.7)
    assert bezier_arc_length(QuadraticBezier(p, p, p)) == 0


def test_sampson_examples():
    assert sampson_distance(ImplicitFunction("x^2 + y^2 - 1"), (2, 0)) == 0.75
    assert sampson_distance(ImplicitFunction("x^2 + y^2 - 1"), (0.6, 0.8)) == pytest.approx(0, abs=1e-16)
    assert sampson_distance(ImplicitFunction("y - 0.5"), (0.3, 0.9)) == pytest.approx(0.4, abs=1e-15)
    with pytest.raises(VanishingGradient):
        sampson_distance(ImplicitFunction("x*y + 1"), (0, 0))


def test_analyze_orientation():
    # inside (f > 0) is above the line
    g = analyze_boundary_cell(ImplicitFunction("y - 0.5"), Cell(0, 1, 0, 1))
    assert sorted(g.inside_corners) == [(0, 1), (1, 1)]
    assert sorted(g.outside_corners) == [(0, 0), (1, 0)]
    assert not g.degenerate
    # walking p0 -> p2 keeps the inside on the left
    (x0, y0), (x2, y2) = g.bezier.p0, g.bezier.p2
    assert (x2 - x0) * (1.0 - y0) - (y2 - y0) * (0.5 - x0) > 0
    with pytest.raises(ValueError):
        analyze_boundary_cell(ImplicitFunction("y - 0.5"), Cell(0, 1, 0, 1), mode="cubic")


def test_too_many_crossings_is_geometry_error():
    with pytest.raises(GeometryError):
        analyze_boundary_cell(ImplicitFunction("x*y"), Cell(-1, 1, -1, 1))


@given(st.floats(-0.45, 0.45), st.floats(0.1, 0.9), st.floats(-0.9, 0.9))
def test_lines_reproduced(angle_shift, y_mid, slope):
    # y = y_mid + slope * (x - 0.5) crossing both vertical edges of [0,1]^2
    assume(0.01 < y_mid - 0.5 * slope < 0.99 and 0.01 < y_mid + 0.5 * slope < 0.99)
    f = ImplicitFunction(f"y - {y_mid!r} - {slope!r}*(x - 0.5)")
    g = analyze_boundary_cell(f, Cell(0, 1, 0, 1))
    b = g.bezier
    assert np.allclose(b.point([0.0, 1.0]), [b.p0, b.p2], atol=0)
    for p in b.point(np.linspace(0, 1, 9)):
        assert sampson_distance(f, p) <= ROOT_TOL


@given(st.floats(0.3, 2.0), st.floats(-0.2, 0.2), st.floats(0.05, 0.2))
def test_parabolas_reproduced(c, h, k):
    # y = c (x - h)^2 + k, cutting the left and right edges of [-0.5,0.5] x [0,1]
    f = ImplicitFunction(f"y - {c!r}*(x - {h!r})^2 - {k!r}")
    cell = Cell(-0.5, 0.5, 0, 1)
    assume(all(0.0 < c * (x - h) ** 2 + k < 1.0 for x in (-0.5, 0.5)))
    g = analyze_boundary_cell(f, cell)
    assert g.tangent_branch
    for p in g.bezier.point(np.linspace(0, 1, 9)):
        assert sampson_distance(f, p) <= 1e-10


@given(st.floats(0.05, 0.95), st.floats(0.05, 0.95), st.floats(0.02, 0.3))
def test_bezier_invariants_on_circles(cx, cy, r):
    f = ImplicitFunction(f"{r * r!r} - (x - {cx!r})^2 - (y - {cy!r})^2")
    cell = Cell(cx, cx + 2 * r, cy - 0.3 * r, cy + 0.5 * r)
    try:
        g = analyze_boundary_cell(f, cell)
    except GeometryError:
        return
    b = g.bezier
    assert bezier_arc_length(b) >= b.chord_length * (1 - 1e-12)
    if g.tangent_branch:
        for t, p in ((0.0, b.p0), (1.0, b.p2)):
            d = b.derivative(t)
            tx, ty = tangent_at(f, p)
            assert abs(d[0] * ty - d[1] * tx) <= 1e-9 * max(1.0, math.hypot(*d))


def test_curve_along_an_edge():
    f = ImplicitFunction("y - 0.5")
    below = analyze_boundary_cell(f, Cell(0, 0.5, 0, 0.5))
    assert below.inside_corners == () and below.degenerate
    above = analyze_boundary_cell(f, Cell(0, 0.5, 0.5, 1))
    assert sorted(above.inside_corners) == [(0, 1), (0.5, 1)]
