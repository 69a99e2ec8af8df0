"""Tensor-product B-spline surfaces ``f(x, y) = sum_ij P_ij N_i(x) N_j(y)``.

Range enclosures over a box are computed per polynomial piece: the piece is
converted to Bernstein form on the (clipped) box by blossoming, which is the
de Boor recurrence run with a different parameter at every level, carried out
in interval arithmetic. The hull of the Bernstein coefficients encloses the
range of the piece (convex hull property).
"""

from __future__ import annotations

import configparser
from bisect import bisect_right
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .interval import Interval

__all__ = [
    "OutOfKnotRange",
    "BSplineSurface",
    "find_span",
    "bspline_basis_row",
    "load_spline",
    "dump_spline",
]


class OutOfKnotRange(ValueError):
    pass


def _check_knots(knots: np.ndarray, degree: int) -> None:
    if degree < 0:
        raise ValueError("degree must be >= 0")
    if knots.ndim != 1 or knots.size < 2 * (degree + 1):
        raise ValueError("knot vector too short for the degree")
    if np.any(np.diff(knots) < 0):
        raise ValueError("knots must be nondecreasing")
    if not (np.all(knots[: degree + 1] == knots[0]) and np.all(knots[-degree - 1 :] == knots[-1])):
        raise ValueError("knot vector must be open (end knots repeated degree+1 times)")
    if knots[-1] <= knots[0]:
        raise ValueError("knot vector has zero length")


_EPS = float(np.finfo(float).eps)
_PAD_ULPS = 8


def find_span(knots, degree: int, t: float) -> int:
    """Index ``k`` with ``knots[k] <= t < knots[k+1]`` (last span closed on the right)."""
    n = len(knots) - degree - 1
    if not knots[0] <= t <= knots[-1]:
        raise OutOfKnotRange(f"t={t!r} outside [{knots[0]}, {knots[-1]}]")
    if t >= knots[n]:
        return n - 1
    return bisect_right(knots, t) - 1


def _basis_funs(knots, degree: int, span: int, t: float) -> list[float]:
    # triangular Cox-de Boor table for the degree+1 nonzero functions
    N = [1.0] + [0.0] * degree
    left = [0.0] * (degree + 1)
    right = [0.0] * (degree + 1)
    for j in range(1, degree + 1):
        left[j] = t - knots[span + 1 - j]
        right[j] = knots[span + j] - t
        saved = 0.0
        for r in range(j):
            temp = N[r] / (right[r + 1] + left[j - r])
            N[r] = saved + right[r + 1] * temp
            saved = left[j - r] * temp
        N[j] = saved
    return N


def bspline_basis_row(knots, degree: int, t: float) -> np.ndarray:
    """Values of all ``len(knots) - degree - 1`` basis functions at ``t``."""
    knots = np.asarray(knots, dtype=float)
    span = find_span(knots, degree, t)
    row = np.zeros(len(knots) - degree - 1)
    row[span - degree : span + 1] = _basis_funs(knots, degree, span, float(t))
    return row


def _basis_rows(knots: np.ndarray, degree: int, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised nonzero basis values: (spans[m], values[m, degree+1])."""
    n = len(knots) - degree - 1
    if not np.all((t >= knots[0]) & (t <= knots[-1])):
        raise OutOfKnotRange(f"parameter outside [{knots[0]}, {knots[-1]}]")
    spans = np.searchsorted(knots, t, side="right") - 1
    spans = np.minimum(spans, n - 1)
    m = t.shape[0]
    N = np.zeros((m, degree + 1))
    N[:, 0] = 1.0
    left = np.zeros((m, degree + 1))
    right = np.zeros((m, degree + 1))
    for j in range(1, degree + 1):
        left[:, j] = t - knots[spans + 1 - j]
        right[:, j] = knots[spans + j] - t
        saved = np.zeros(m)
        for r in range(j):
            temp = N[:, r] / (right[:, r + 1] + left[:, j - r])
            N[:, r] = saved + right[:, r + 1] * temp
            saved = left[:, j - r] * temp
        N[:, j] = saved
    return spans, N


def _bernstein_matrix(knots, degree: int, span: int, a: float, b: float) -> np.ndarray:
    """Matrix ``B`` with ``B @ c`` the Bernstein coefficients on ``[a, b]`` of
    the span polynomial whose active B-spline coefficients are ``c``.

    Row ``k`` is the blossom at ``(a,) * (p - k) + (b,) * k``; for ``[a, b]``
    inside the span every row is a set of convex weights.
    """
    p = degree
    B = np.empty((p + 1, p + 1))
    for k in range(p + 1):
        args = [a] * (p - k) + [b] * k
        d = np.eye(p + 1)
        for r in range(1, p + 1):
            t = args[r - 1]
            for j in range(p, r - 1, -1):
                lo_k = knots[span - p + j]
                alpha = (t - lo_k) / (knots[span + 1 + j - r] - lo_k)
                d[j] = (1.0 - alpha) * d[j - 1] + alpha * d[j]
        B[k] = d[p]
    return B


@dataclass(frozen=True, eq=False)
class BSplineSurface:
    """Tensor-product B-spline; ``coeffs[i, j]`` multiplies ``N_i(x) N_j(y)``."""

    knots_x: np.ndarray
    knots_y: np.ndarray
    degree_x: int
    degree_y: int
    coeffs: np.ndarray
    _derivs: dict = field(default_factory=dict, repr=False, compare=False)
    _lists: tuple = field(default=(), init=False, repr=False, compare=False)

    def __post_init__(self):
        kx = np.asarray(self.knots_x, dtype=float)
        ky = np.asarray(self.knots_y, dtype=float)
        c = np.asarray(self.coeffs, dtype=float)
        object.__setattr__(self, "knots_x", kx)
        object.__setattr__(self, "knots_y", ky)
        object.__setattr__(self, "coeffs", c)
        _check_knots(kx, self.degree_x)
        _check_knots(ky, self.degree_y)
        shape = (len(kx) - self.degree_x - 1, len(ky) - self.degree_y - 1)
        if c.shape != shape:
            raise ValueError(f"coeffs shape {c.shape} does not match knots/degree {shape}")
        # plain-list copies for the scalar path
        object.__setattr__(self, "_lists", (kx.tolist(), ky.tolist(), c.tolist()))

    @classmethod
    def uniform_degree(cls, knots_x, knots_y, degree: int, coeffs) -> BSplineSurface:
        return cls(knots_x, knots_y, degree, degree, coeffs)

    @property
    def x_range(self) -> tuple[float, float]:
        return float(self.knots_x[0]), float(self.knots_x[-1])

    @property
    def y_range(self) -> tuple[float, float]:
        return float(self.knots_y[0]), float(self.knots_y[-1])

    def interior_knots(self) -> tuple[np.ndarray, np.ndarray]:
        """Distinct knots strictly inside the parameter ranges."""
        kx = np.unique(self.knots_x)[1:-1]
        ky = np.unique(self.knots_y)[1:-1]
        return kx, ky

    # -- point evaluation ---------------------------------------------------

    def evaluate(self, x: float, y: float) -> float:
        px, py = self.degree_x, self.degree_y
        kx, ky, coeffs = self._lists
        sx = find_span(kx, px, x)
        sy = find_span(ky, py, y)
        Nx = _basis_funs(kx, px, sx, float(x))
        Ny = _basis_funs(ky, py, sy, float(y))
        total = 0.0
        for a in range(px + 1):
            row = coeffs[sx - px + a]
            acc = 0.0
            for b in range(py + 1):
                acc += row[sy - py + b] * Ny[b]
            total += Nx[a] * acc
        return float(total)

    __call__ = evaluate

    def evaluate_array(self, x, y) -> np.ndarray:
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        shape = x.shape
        xf = x.ravel()
        yf = y.ravel()
        px, py = self.degree_x, self.degree_y
        sx, Nx = _basis_rows(self.knots_x, px, xf)
        sy, Ny = _basis_rows(self.knots_y, py, yf)
        out = np.zeros(xf.shape[0])
        for a in range(px + 1):
            for b in range(py + 1):
                out += Nx[:, a] * Ny[:, b] * self.coeffs[sx - px + a, sy - py + b]
        return out.reshape(shape)

    # -- derivatives ----------------------------------------------------------

    def derivative(self, direction: str) -> BSplineSurface:
        """Exact partial derivative as a lower-degree spline surface."""
        if direction in self._derivs:
            return self._derivs[direction]
        if direction == "x":
            p, k, c = self.degree_x, self.knots_x, self.coeffs
        elif direction == "y":
            p, k, c = self.degree_y, self.knots_y, self.coeffs.T
        else:
            raise ValueError(direction)
        if p == 0:
            # piecewise constant: derivative vanishes inside every span
            dc, dk, dp = np.zeros_like(c), k, 0
        else:
            n = c.shape[0]
            denom = (k[p + 1 : p + n] - k[1:n])[:, None]
            dc = p * (c[1:] - c[:-1]) / denom
            dk = k[1:-1]
            dp = p - 1
        if direction == "x":
            d = BSplineSurface(dk, self.knots_y, dp, self.degree_y, dc)
        else:
            d = BSplineSurface(self.knots_x, dk, self.degree_x, dp, dc.T)
        self._derivs[direction] = d
        return d

    # -- interval enclosure ---------------------------------------------------

    @staticmethod
    def _spans_over(knots, degree, lo, hi):
        out = []
        for s in range(find_span(knots, degree, lo), find_span(knots, degree, hi) + 1):
            if knots[s + 1] <= knots[s]:
                continue
            a = max(lo, knots[s])
            b = min(hi, knots[s + 1])
            if a <= b:
                out.append((s, a, b))
        return out

    def evaluate_interval(self, X: Interval, Y: Interval) -> Interval:
        """Guaranteed enclosure of the range of the surface over ``X x Y``."""
        xlo, xhi = self.x_range
        ylo, yhi = self.y_range
        if X.lo < xlo or X.hi > xhi or Y.lo < ylo or Y.hi > yhi:
            raise OutOfKnotRange(f"box {X} x {Y} outside the knot range")
        px, py = self.degree_x, self.degree_y
        lo = hi = None
        for sx, ax, bx in self._spans_over(self.knots_x, px, X.lo, X.hi):
            Bx = _bernstein_matrix(self.knots_x, px, sx, ax, bx)
            for sy, ay, by in self._spans_over(self.knots_y, py, Y.lo, Y.hi):
                By = _bernstein_matrix(self.knots_y, py, sy, ay, by)
                block = self.coeffs[sx - px : sx + 1, sy - py : sy + 1]
                bern = Bx @ block @ By.T
                # the weights are convex, so every rounding error is a small
                # multiple of eps * max|block|
                pad = _PAD_ULPS * (px + py + 2) ** 2 * _EPS * float(np.max(np.abs(block)))
                blo = float(bern.min()) - pad
                bhi = float(bern.max()) + pad
                lo = blo if lo is None else min(lo, blo)
                hi = bhi if hi is None else max(hi, bhi)
        if lo is None:
            raise OutOfKnotRange(f"box {X} x {Y} touches no knot span")
        return Interval(lo, hi)


# ---------------------------------------------------------------------------
# file format


def _floats(text: str) -> list[float]:
    return [float(tok) for tok in text.replace(",", " ").replace(";", " ").split()]


def load_spline(path) -> BSplineSurface:
    """Read a spline surface from a ``key = value`` text file.

    Keys (section ``[spline]``): ``knots_x``, ``knots_y``, ``degree`` (or
    ``degree_x``/``degree_y``) and ``coeffs``, row-major with rows separated
    by ``;`` or newlines; row ``i`` holds ``P_i0 .. P_im``.
    """
    cp = configparser.ConfigParser()
    with open(path, encoding="utf-8") as fh:
        cp.read_file(fh)
    if "spline" not in cp:
        raise ValueError(f"{path}: missing [spline] section")
    sec = cp["spline"]
    kx = _floats(sec["knots_x"])
    ky = _floats(sec["knots_y"])
    if "degree" in sec:
        dx = dy = int(sec["degree"])
    else:
        dx = int(sec["degree_x"])
        dy = int(sec["degree_y"])
    rows = [r for r in sec["coeffs"].replace(";", "\n").splitlines() if r.strip()]
    coeffs = np.array([_floats(r) for r in rows])
    return BSplineSurface(kx, ky, dx, dy, coeffs)


def dump_spline(surface: BSplineSurface, path) -> None:
    lines = ["[spline]"]
    lines.append("knots_x = " + ", ".join(repr(float(v)) for v in surface.knots_x))
    lines.append("knots_y = " + ", ".join(repr(float(v)) for v in surface.knots_y))
    if surface.degree_x == surface.degree_y:
        lines.append(f"degree = {surface.degree_x}")
    else:
        lines.append(f"degree_x = {surface.degree_x}")
        lines.append(f"degree_y = {surface.degree_y}")
    lines.append("coeffs =")
    for row in surface.coeffs:
        lines.append("    " + ", ".join(repr(float(v)) for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
