"""Boundary reconstruction inside a single boundary cell.

The zero curve of ``f`` is located on the cell edges, and between the two
crossing points it is replaced by a quadratic Bezier whose middle control
point is the intersection of the curve tangents at the crossings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .classify import Cell
from .implicit import ImplicitFunction, SqrtAtZero
from .interval import Interval
from .quadrature import gauss_legendre

__all__ = [
    "ROOT_TOL",
    "GRAD_TOL",
    "ANGLE_TOL",
    "GeometryError",
    "AmbiguousEdge",
    "NoIntersections",
    "TooManyIntersections",
    "DegenerateConfiguration",
    "VanishingGradient",
    "EdgePoint",
    "QuadraticBezier",
    "BoundaryCellGeometry",
    "find_edge_intersections",
    "tangent_at",
    "build_quadratic_bezier",
    "bezier_arc_length",
    "sampson_distance",
    "analyze_boundary_cell",
]

ROOT_TOL = 1e-12
GRAD_TOL = 1e-10
ANGLE_TOL = 1e-8

# 1-D interval refinement used to certify that a same-signed edge has no root
_EDGE_REFINE_DEPTH = 8


class GeometryError(ArithmeticError):
    """The cell cannot be approximated by one Bezier; subdivide it."""


class AmbiguousEdge(GeometryError):
    pass


class NoIntersections(GeometryError):
    pass


class TooManyIntersections(GeometryError):
    pass


class DegenerateConfiguration(GeometryError):
    pass


class VanishingGradient(GeometryError):
    pass


@dataclass(frozen=True)
class EdgePoint:
    """Boundary crossing on the cell perimeter.

    ``s`` is the counterclockwise perimeter parameter: edge ``k`` (0 bottom,
    1 right, 2 top, 3 left) covers ``[k, k+1)`` and corner ``k`` sits at
    ``s = k``.
    """

    point: tuple[float, float]
    s: float


@dataclass(frozen=True)
class QuadraticBezier:
    p0: tuple[float, float]
    p1: tuple[float, float]
    p2: tuple[float, float]

    def control_points(self) -> np.ndarray:
        return np.array([self.p0, self.p1, self.p2], dtype=float)

    def reversed(self) -> QuadraticBezier:
        return QuadraticBezier(self.p2, self.p1, self.p0)

    def point(self, t):
        t = np.asarray(t, dtype=float)
        s = 1.0 - t
        c = self.control_points()
        return (
            np.multiply.outer(s * s, c[0])
            + np.multiply.outer(2.0 * s * t, c[1])
            + np.multiply.outer(t * t, c[2])
        )

    def derivative(self, t):
        t = np.asarray(t, dtype=float)
        c = self.control_points()
        return np.multiply.outer(2.0 * (1.0 - t), c[1] - c[0]) + np.multiply.outer(
            2.0 * t, c[2] - c[1]
        )

    def arc_length(self) -> float:
        return bezier_arc_length(self)

    @property
    def chord_length(self) -> float:
        return math.dist(self.p0, self.p2)


@dataclass(frozen=True)
class BoundaryCellGeometry:
    """Bezier approximation of the boundary inside one cell.

    ``inside_corners`` lists the cell corners with ``f > 0`` in the order met
    walking the perimeter counterclockwise from ``bezier.p2`` to
    ``bezier.p0``; ``outside_corners`` continues from ``p0`` back to ``p2``.
    """

    cell: Cell
    bezier: QuadraticBezier
    inside_corners: tuple
    outside_corners: tuple
    tangent_branch: bool = False

    @property
    def degenerate(self) -> bool:
        return len(self.inside_corners) == 0


# ---------------------------------------------------------------------------
# edge crossings


def _edge_setup(cell: Cell, k: int):
    """(fixed-coordinate axis, fixed value, start, end) of edge ``k``."""
    if k == 0:
        return "y", cell.y0, cell.x0, cell.x1
    if k == 1:
        return "x", cell.x1, cell.y0, cell.y1
    if k == 2:
        return "y", cell.y1, cell.x1, cell.x0
    return "x", cell.x0, cell.y1, cell.y0


def _edge_point(axis, fixed, t):
    return (t, fixed) if axis == "y" else (fixed, t)


def _edge_interval(f: ImplicitFunction, axis, fixed, a, b) -> Interval:
    lo, hi = (a, b) if a <= b else (b, a)
    T = Interval(lo, hi)
    F = Interval(fixed)
    if axis == "y":
        return f.enclose(T, F, "taylor")
    return f.enclose(F, T, "taylor")


def _edge_may_have_root(f, axis, fixed, a, b) -> bool:
    """Interval test, refined by bisection, for a zero of ``f`` on the edge."""
    stack = [(a, b, 0)]
    while stack:
        lo, hi, depth = stack.pop()
        if not _edge_interval(f, axis, fixed, lo, hi).contains_zero():
            continue
        if depth >= _EDGE_REFINE_DEPTH:
            return True
        mid = 0.5 * (lo + hi)
        stack.append((mid, hi, depth + 1))
        stack.append((lo, mid, depth + 1))
    return False


def find_edge_intersections(
    f: ImplicitFunction,
    cell: Cell,
    root_tol: float = ROOT_TOL,
    corner_values=None,
    check_ambiguity: bool = True,
) -> list[EdgePoint]:
    """Crossings of ``f = 0`` with the cell edges, counterclockwise.

    Each edge whose end values have opposite signs contributes one root
    (bracketed solve, bracket width <= ``root_tol`` times the cell size).  A
    corner where ``f`` is exactly zero is itself a crossing.  An edge with
    equal end signs whose interval enclosure cannot be certified
    single-signed raises AmbiguousEdge; no crossing at all raises
    NoIntersections (a closed curve may hide inside).
    """
    corners = cell.corners()
    if corner_values is None:
        corner_values = [f.eval(x, y) for x, y in corners]
    xtol = root_tol * cell.size
    found: list[EdgePoint] = []
    for k in range(4):
        va = corner_values[k]
        vb = corner_values[(k + 1) % 4]
        if va == 0.0:
            found.append(EdgePoint(corners[k], float(k)))
        axis, fixed, a, b = _edge_setup(cell, k)
        if va * vb < 0.0:
            if axis == "y":
                g = lambda t: f.eval(t, fixed)  # noqa: E731
            else:
                g = lambda t: f.eval(fixed, t)  # noqa: E731
            lo, hi = (a, b) if a < b else (b, a)
            r = brentq(g, lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps)
            frac = (r - a) / (b - a)
            frac = min(max(frac, 0.0), 1.0)
            found.append(EdgePoint(_edge_point(axis, fixed, r), k + frac))
        elif va != 0.0 and vb != 0.0 and check_ambiguity:
            if _edge_may_have_root(f, axis, fixed, a, b):
                raise AmbiguousEdge(f"edge {k} of {cell} may hold an even number of roots")
    if not found:
        raise NoIntersections(f"no edge crossings in {cell}")
    found.sort(key=lambda e: e.s)
    return found


# ---------------------------------------------------------------------------
# tangents and Bezier construction


def _gradient(f: ImplicitFunction, p, grad_tol: float):
    try:
        gx, gy = f.grad(p[0], p[1])
    except SqrtAtZero as exc:
        raise VanishingGradient(str(exc)) from None
    norm = math.hypot(gx, gy)
    if not norm > grad_tol or not math.isfinite(norm):
        raise VanishingGradient(f"|grad f| = {norm:.3g} at {p}")
    return gx, gy, norm


def tangent_at(f: ImplicitFunction, p, grad_tol: float = GRAD_TOL) -> tuple[float, float]:
    """Unit tangent ``(-f_y, f_x) / |grad f|``; the domain lies to its left."""
    gx, gy, norm = _gradient(f, p, grad_tol)
    return -gy / norm, gx / norm


def _clip_line(m, d, cell: Cell):
    """Parameter range of ``m + lam * d`` inside the cell."""
    lo, hi = -math.inf, math.inf
    for c, dc, a, b in ((m[0], d[0], cell.x0, cell.x1), (m[1], d[1], cell.y0, cell.y1)):
        if abs(dc) < 1e-300:
            if not a <= c <= b:
                return None
            continue
        t1 = (a - c) / dc
        t2 = (b - c) / dc
        lo = max(lo, min(t1, t2))
        hi = min(hi, max(t1, t2))
    if lo > hi:
        return None
    return lo, hi


def _on_curve_midpoint(f: ImplicitFunction, p0, p2, cell: Cell | None, root_tol: float):
    m = (0.5 * (p0[0] + p2[0]), 0.5 * (p0[1] + p2[1]))
    chord = (p2[0] - p0[0], p2[1] - p0[1])
    length = math.hypot(*chord)
    n = (-chord[1] / length, chord[0] / length)
    fm = f.eval(*m)
    if fm == 0.0:
        return m
    if cell is None:
        rng = (-length, length)
    else:
        rng = _clip_line(m, n, cell)
        if rng is None:
            return None
    g = lambda lam: f.eval(m[0] + lam * n[0], m[1] + lam * n[1])  # noqa: E731
    steps = 16
    for side_end in (rng[1], rng[0]):
        prev_lam, prev_val = 0.0, fm
        for i in range(1, steps + 1):
            lam = side_end * i / steps
            val = g(lam)
            if val == 0.0:
                return (m[0] + lam * n[0], m[1] + lam * n[1])
            if val * prev_val < 0.0:
                lo, hi = sorted((prev_lam, lam))
                r = brentq(g, lo, hi, xtol=root_tol * max(length, 1e-300))
                return (m[0] + r * n[0], m[1] + r * n[1])
            prev_lam, prev_val = lam, val
    return None


def build_quadratic_bezier(
    f: ImplicitFunction,
    p0,
    p2,
    cell: Cell | None = None,
    root_tol: float = ROOT_TOL,
    grad_tol: float = GRAD_TOL,
    angle_tol: float = ANGLE_TOL,
) -> QuadraticBezier:
    """Quadratic Bezier from ``p0`` to ``p2`` tangent to the curve at both ends.

    Falls back to interpolating an on-curve midpoint when the tangents are
    parallel or meet too far away, and to the straight chord when that
    fails as well.
    """
    bez, _ = _build_bezier(f, p0, p2, cell, root_tol, grad_tol, angle_tol)
    return bez


def _build_bezier(f, p0, p2, cell, root_tol, grad_tol, angle_tol):
    p0 = (float(p0[0]), float(p0[1]))
    p2 = (float(p2[0]), float(p2[1]))
    if p0 == p2:
        raise DegenerateConfiguration("coincident Bezier end points")
    t0 = tangent_at(f, p0, grad_tol)
    t2 = tangent_at(f, p2, grad_tol)
    cross = t0[0] * t2[1] - t0[1] * t2[0]
    if abs(cross) > math.sin(angle_tol):
        dx = p2[0] - p0[0]
        dy = p2[1] - p0[1]
        a = (dx * t2[1] - dy * t2[0]) / cross
        p1 = (p0[0] + a * t0[0], p0[1] + a * t0[1])
        if cell is not None:
            cx, cy = cell.center
            ok = abs(p1[0] - cx) <= cell.width and abs(p1[1] - cy) <= cell.height
        else:
            chord = math.dist(p0, p2)
            ok = math.dist(p1, ((p0[0] + p2[0]) / 2, (p0[1] + p2[1]) / 2)) <= 2 * chord
        if ok and math.isfinite(p1[0]) and math.isfinite(p1[1]):
            return QuadraticBezier(p0, p1, p2), True
    p3 = _on_curve_midpoint(f, p0, p2, cell, root_tol)
    if p3 is not None:
        p1 = (2.0 * p3[0] - 0.5 * (p0[0] + p2[0]), 2.0 * p3[1] - 0.5 * (p0[1] + p2[1]))
        return QuadraticBezier(p0, p1, p2), False
    mid = (0.5 * (p0[0] + p2[0]), 0.5 * (p0[1] + p2[1]))
    return QuadraticBezier(p0, mid, p2), False


def linear_bezier(p0, p2) -> QuadraticBezier:
    p0 = (float(p0[0]), float(p0[1]))
    p2 = (float(p2[0]), float(p2[1]))
    return QuadraticBezier(p0, (0.5 * (p0[0] + p2[0]), 0.5 * (p0[1] + p2[1])), p2)


_GL16 = gauss_legendre(16)
_GL16_T = 0.5 * (_GL16.nodes + 1.0)
_GL16_W = 0.5 * _GL16.weights


def bezier_arc_length(b: QuadraticBezier) -> float:
    """Arc length by 16-point Gauss-Legendre on [0, 1]."""
    d = b.derivative(_GL16_T)
    return float(np.dot(_GL16_W, np.hypot(d[:, 0], d[:, 1])))


def sampson_distance(f: ImplicitFunction, p, grad_tol: float = GRAD_TOL) -> float:
    """First-order distance estimate ``|f(p)| / |grad f(p)|``."""
    value = f.eval(p[0], p[1])
    if value == 0.0:
        return 0.0
    _, _, norm = _gradient(f, p, grad_tol)
    return abs(value) / norm


# ---------------------------------------------------------------------------
# whole-cell analysis


def _arc_sign(f, cell: Cell, corner_values, corner_ids, s_from, s_to) -> int:
    if corner_ids:
        vals = [corner_values[k] for k in corner_ids]
        if all(v > 0 for v in vals):
            return 1
        if all(v < 0 for v in vals):
            return -1
        raise TooManyIntersections("corner signs change without a detected crossing")
    s = 0.5 * (s_from + s_to) % 4.0
    k = int(s)
    axis, fixed, a, b = _edge_setup(cell, k)
    v = f.eval(*_edge_point(axis, fixed, a + (s - k) * (b - a)))
    return (v > 0) - (v < 0)


def analyze_boundary_cell(
    f: ImplicitFunction,
    cell: Cell,
    corner_values=None,
    mode: str = "quadratic",
    root_tol: float = ROOT_TOL,
    grad_tol: float = GRAD_TOL,
    angle_tol: float = ANGLE_TOL,
    check_ambiguity: bool = True,
) -> BoundaryCellGeometry:
    """Locate the crossings, fix the inside side and build the Bezier.

    ``mode`` is ``"quadratic"`` (tangent intersection) or ``"linear"``
    (straight chord).  Raises a GeometryError subclass whenever a single
    Bezier cannot describe the boundary in this cell.
    """
    corners = cell.corners()
    if corner_values is None:
        corner_values = [f.eval(x, y) for x, y in corners]
    pts = find_edge_intersections(f, cell, root_tol, corner_values, check_ambiguity)
    if len(pts) != 2:
        raise TooManyIntersections(f"{len(pts)} edge crossings in {cell}")
    a, b = pts
    if a.point == b.point:
        raise DegenerateConfiguration("coincident crossings")
    arc1 = [k for k in range(4) if a.s < k < b.s]
    arc2 = [k for k in range(4) if k > b.s] + [k for k in range(4) if k < a.s]
    sign1 = _arc_sign(f, cell, corner_values, arc1, a.s, b.s)
    sign2 = _arc_sign(f, cell, corner_values, arc2, b.s, a.s + 4.0)
    # an arc that is zero at its test point means the curve runs along that edge
    if sign1 == 0:
        sign1 = -sign2
    elif sign2 == 0:
        sign2 = -sign1
    if sign1 > 0 and sign2 < 0:
        p2, p0, inside, outside = a.point, b.point, arc1, arc2
    elif sign2 > 0 and sign1 < 0:
        p2, p0, inside, outside = b.point, a.point, arc2, arc1
    else:
        raise DegenerateConfiguration(f"cannot tell inside from outside in {cell}")
    if mode == "quadratic":
        bez, tangent = _build_bezier(f, p0, p2, cell, root_tol, grad_tol, angle_tol)
    elif mode == "linear":
        bez, tangent = linear_bezier(p0, p2), False
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return BoundaryCellGeometry(
        cell,
        bez,
        tuple(corners[k] for k in inside),
        tuple(corners[k] for k in outside),
        tangent,
    )
