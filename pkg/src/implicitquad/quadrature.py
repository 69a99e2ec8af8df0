"""Gauss-Legendre rules, tensor rectangles, and integration over the curved
part of a boundary cell through a transfinite (Coons) map of the unit square.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss

from .classify import Cell

__all__ = [
    "GaussRule",
    "UnsupportedOrder",
    "InvalidJacobian",
    "gauss_legendre",
    "integrate_rectangle",
    "CurvedRegionMap",
    "build_curved_region",
    "region_from_path",
    "integrate_boundary_cell",
]

MAX_ORDER = 32


class UnsupportedOrder(ValueError):
    pass


class InvalidJacobian(ValueError):
    """The transfinite map folds over (Jacobian changes sign)."""


@dataclass(frozen=True)
class GaussRule:
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def n(self) -> int:
        return len(self.nodes)


@lru_cache(maxsize=None)
def gauss_legendre(n: int) -> GaussRule:
    """``n``-point Gauss-Legendre rule on [-1, 1]."""
    if not isinstance(n, (int, np.integer)) or not 1 <= n <= MAX_ORDER:
        raise UnsupportedOrder(f"order must be an integer in [1, {MAX_ORDER}], got {n!r}")
    x, w = leggauss(int(n))
    # exact symmetry
    x = 0.5 * (x - x[::-1])
    w = 0.5 * (w + w[::-1])
    x.setflags(write=False)
    w.setflags(write=False)
    return GaussRule(x, w)


@lru_cache(maxsize=None)
def _unit_square_rule(n: int):
    rule = gauss_legendre(n)
    t = 0.5 * (rule.nodes + 1.0)
    w = 0.5 * rule.weights
    U, V = np.meshgrid(t, t, indexing="ij")
    W = np.outer(w, w)
    out = (U.ravel(), V.ravel(), W.ravel())
    for a in out:
        a.setflags(write=False)
    return out


def _values(F, x, y) -> np.ndarray:
    if hasattr(F, "eval_array"):
        return np.asarray(F.eval_array(x, y), dtype=float)
    return np.asarray(F(x, y), dtype=float) * np.ones_like(x)


def integrate_rectangle(F, cell: Cell, n: int = 2) -> float:
    """Tensor ``n x n`` Gauss value of the integral of ``F`` over ``cell``."""
    U, V, W = _unit_square_rule(n)
    x = cell.x0 + (cell.x1 - cell.x0) * U
    y = cell.y0 + (cell.y1 - cell.y0) * V
    return float(np.dot(W, _values(F, x, y)) * cell.area)


# ---------------------------------------------------------------------------
# curved regions


def _segment(a, b) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return np.array([a, 0.5 * (a + b), b])


def _b2(t):
    s = 1.0 - t
    return np.stack([s * s, 2.0 * s * t, t * t], axis=-1)


def _db2(t):
    return np.stack([-2.0 * (1.0 - t), 2.0 - 4.0 * t, 2.0 * t], axis=-1)


def _coons_matrices(u, v):
    """Basis rows ``A, Au, Av`` such that ``S = A @ C``, ``S_u = Au @ C`` and
    ``S_v = Av @ C`` for the stacked controls ``C = [bottom; right; top; left]``."""
    u = np.ravel(u)
    v = np.ravel(v)
    bu, bv, dbu, dbv = _b2(u), _b2(v), _db2(u), _db2(v)
    cu, cv = (1.0 - u)[:, None], (1.0 - v)[:, None]
    uu, vv = u[:, None], v[:, None]
    A = np.hstack([cv * bu, uu * bv, vv * bu, cu * bv])
    Au = np.hstack([cv * dbu, bv, vv * dbu, -bv])
    Av = np.hstack([-bu, uu * dbv, bu, cu * dbv])
    # bilinear corner correction on bottom[0], bottom[2], top[0], top[2]
    for col, a, au, av in (
        (0, (1 - u) * (1 - v), -(1 - v), -(1 - u)),
        (2, u * (1 - v), 1 - v, -u),
        (6, (1 - u) * v, -v, 1 - u),
        (8, u * v, v, u),
    ):
        A[:, col] -= a
        Au[:, col] -= au
        Av[:, col] -= av
    return A, Au, Av


@lru_cache(maxsize=None)
def _rule_matrices(n: int):
    U, V, _ = _unit_square_rule(n)
    return _coons_matrices(U, V)


@lru_cache(maxsize=None)
def _check_matrices(grid: int):
    t = (np.arange(grid) + 0.5) / grid
    U, V = np.meshgrid(t, t, indexing="ij")
    return _coons_matrices(U, V)


def _det(Su, Sv):
    return Su[:, 0] * Sv[:, 1] - Su[:, 1] * Sv[:, 0]


@dataclass(frozen=True, eq=False)
class CurvedRegionMap:
    """Coons patch ``S(u, v)`` over four quadratic Bezier sides.

    ``bottom`` and ``top`` run in ``u`` (left to right), ``left`` and
    ``right`` run in ``v`` (bottom to top); each is a (3, 2) array of control
    points and the sides share corners.  A side may collapse to a point.

    If ``complement_of`` is set the region meant is that cell minus the
    mapped patch.
    """

    bottom: np.ndarray
    right: np.ndarray
    top: np.ndarray
    left: np.ndarray
    complement_of: Cell | None = None

    def __post_init__(self):
        for side in (self.bottom, self.right, self.top, self.left):
            if np.shape(side) != (3, 2):
                raise ValueError("sides must be (3, 2) control arrays")
        tol = 1e-9 * (1.0 + float(np.max(np.abs(self.bottom))))
        pairs = [
            (self.bottom[0], self.left[0]),
            (self.bottom[2], self.right[0]),
            (self.top[0], self.left[2]),
            (self.top[2], self.right[2]),
        ]
        for a, b in pairs:
            if np.max(np.abs(a - b)) > tol:
                raise ValueError("Coons sides do not share corners")

    @property
    def controls(self) -> np.ndarray:
        return np.vstack([self.bottom, self.right, self.top, self.left])

    def map(self, u, v) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        A, _, _ = _coons_matrices(u, np.broadcast_to(v, u.shape))
        return (A @ self.controls).reshape(*u.shape, 2)

    def jacobian(self, u, v) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        _, Au, Av = _coons_matrices(u, np.broadcast_to(v, u.shape))
        C = self.controls
        return _det(Au @ C, Av @ C).reshape(u.shape)

    def check_jacobian(self, grid: int = 20) -> float:
        """Return +1/-1 for the orientation (0 for an empty region); raise
        InvalidJacobian on a fold."""
        _, Au, Av = _check_matrices(grid)
        C = self.controls
        J = _det(Au @ C, Av @ C)
        scale = float(np.max(np.abs(J)))
        if not np.isfinite(scale):
            raise InvalidJacobian("degenerate map")
        extent = float(np.ptp(C, axis=0).max())
        if scale <= 1e-12 * extent * extent:
            # region of zero area (curve along a cell edge); integrates to ~0
            return 0.0
        tol = 1e-12 * scale
        lo = float(J.min())
        hi = float(J.max())
        if lo < -tol and hi > tol:
            raise InvalidJacobian(f"Jacobian changes sign ({lo:.3g} .. {hi:.3g})")
        return 1.0 if hi > tol else -1.0

    def rule(self, n: int = 4):
        """Mapped nodes ``(x, y)`` and weights ``W * |J|`` of the ``n x n`` rule."""
        _, _, W = _unit_square_rule(n)
        A, Au, Av = _rule_matrices(n)
        C = self.controls
        pts = A @ C
        return pts[:, 0], pts[:, 1], W * np.abs(_det(Au @ C, Av @ C))

    def area(self, n: int = 4) -> float:
        return float(np.sum(self.rule(n)[2]))


def region_from_path(bezier_ctrl, path, complement_of: Cell | None = None) -> CurvedRegionMap:
    """Coons map of the region bounded by a Bezier from ``P00`` to ``P10``
    and the polyline ``P10 -> path[0] -> ... -> path[-1] -> P00``.

    ``path`` holds at most two points; an empty path closes the region with
    the straight segment ``P10 -> P00`` (both vertical sides collapse), a
    single point collapses the top side onto it.
    """
    b = np.asarray(bezier_ctrl, dtype=float).reshape(3, 2)
    p00, p10 = b[0], b[2]
    path = [np.asarray(p, dtype=float) for p in path]
    if len(path) == 0:
        right = _segment(p10, p10)
        left = _segment(p00, p00)
        top = _segment(p00, p10)
    elif len(path) == 1:
        c = path[0]
        right = _segment(p10, c)
        left = _segment(p00, c)
        top = _segment(c, c)
    elif len(path) == 2:
        c1, c2 = path
        right = _segment(p10, c1)
        top = _segment(c2, c1)
        left = _segment(p00, c2)
    else:
        raise ValueError("path with more than two corners; use the complement")
    return CurvedRegionMap(b, right, top, left, complement_of)


def build_curved_region(geom) -> CurvedRegionMap:
    """Region map for the inside part of a boundary cell.

    ``geom`` supplies ``cell``, ``bezier`` (with ``control_points()``), and
    the perimeter corner lists ``inside_corners`` (walked counterclockwise
    from ``bezier.p2`` to ``bezier.p0``) and ``outside_corners`` (from ``p0``
    to ``p2``).  With three inside corners the cell minus the outside region
    is used.
    """
    ctrl = np.asarray(geom.bezier.control_points(), dtype=float)
    if len(geom.inside_corners) <= 2:
        region = region_from_path(ctrl, geom.inside_corners)
    else:
        region = region_from_path(ctrl[::-1], geom.outside_corners, complement_of=geom.cell)
    region.check_jacobian()
    return region


def integrate_boundary_cell(F, region: CurvedRegionMap, n: int = 4) -> float:
    """Integral of ``F`` over the region described by ``region``."""
    x, y, w = region.rule(n)
    value = float(np.dot(w, _values(F, x, y)))
    if region.complement_of is not None:
        return integrate_rectangle(F, region.complement_of, n) - value
    return value
