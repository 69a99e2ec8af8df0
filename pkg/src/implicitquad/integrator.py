"""Adaptive quadtree integration over ``{f >= 0}`` and the uniform baselines.

The adaptive driver classifies each cell, integrates interior cells with a
tensor Gauss rule, and for boundary cells builds the Bezier boundary, bounds
the integral of the neglected sliver, and either integrates the curved part
or quadrisects.  Cells that shrink below ``min_cell`` are settled by the
sign at their center and their full ``M * area`` goes to the residual bound.

The uniform baselines quadrisect every boundary cell down to the prescribed
width ``1.2 * h / 2**k`` and then use a straight chord (``uniform_L``) or the
tangent Bezier (``uniform_Q``) without any error test.
"""

from __future__ import annotations

import math
import re
import time
from dataclasses import asdict, dataclass, field, fields, replace

import numpy as np

from .classify import Cell, CellClass, classify_corner_values
from .estimate import DEFAULT_SAMPLES, bound_abs_integrand, estimate_local_error
from .geometry import GeometryError, analyze_boundary_cell
from .implicit import ImplicitFunction, as_function
from .interval import IntervalError
from .quadrature import (
    InvalidJacobian,
    _unit_square_rule,
    build_curved_region,
    integrate_boundary_cell,
    integrate_rectangle,
)

__all__ = [
    "METHODS",
    "CLASSIFIERS",
    "IntegrationConfig",
    "IntegrationReport",
    "CellRecord",
    "ComparisonRow",
    "parse_split",
    "initial_cells",
    "adaptive_integrate",
    "uniform_integrate",
    "integrate",
    "compare_methods",
    "match_uniform_level",
]

METHODS = ("adaptive", "uniform_L", "uniform_Q")
CLASSIFIERS = ("interval", "corners")

_SPLIT_RE = re.compile(r"^\s*([xy])\s*=\s*([-+0-9.eE]+)\s*$")


def parse_split(spec) -> tuple[str, float]:
    """``"x=0.3"`` or ``("x", 0.3)`` -> ``("x", 0.3)``."""
    if isinstance(spec, str):
        m = _SPLIT_RE.match(spec)
        if not m:
            raise ValueError(f"bad split line {spec!r}; expected 'x=c' or 'y=c'")
        return m.group(1), float(m.group(2))
    axis, value = spec
    if axis not in ("x", "y"):
        raise ValueError(f"bad split axis {axis!r}")
    return axis, float(value)


@dataclass(frozen=True)
class IntegrationConfig:
    tau: float = 1e-3
    gauss_n: int = 2
    min_cell: float | None = None
    classifier: str = "interval"
    method: str = "adaptive"
    uniform_level: int = 4
    singular_splits: tuple = ()
    n_samples: int = DEFAULT_SAMPLES
    boundary_gauss_n: int | None = None
    max_depth: int | None = None
    enclosure: str = "taylor"
    trace: bool = False

    def __post_init__(self):
        if not self.tau > 0:
            raise ValueError("tau must be positive")
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}")
        if self.classifier not in CLASSIFIERS:
            raise ValueError(f"classifier must be one of {CLASSIFIERS}")
        if not 1 <= self.gauss_n <= 32:
            raise ValueError("gauss_n must be in [1, 32]")
        if self.uniform_level < 0:
            raise ValueError("uniform_level must be >= 0")
        if self.n_samples < 2:
            raise ValueError("n_samples must be >= 2")
        if self.min_cell is not None and not self.min_cell > 0:
            raise ValueError("min_cell must be positive")
        if self.enclosure not in ("natural", "taylor"):
            raise ValueError("enclosure must be 'natural' or 'taylor'")
        if self.max_depth is not None and self.max_depth < 0:
            raise ValueError("max_depth must be >= 0")
        object.__setattr__(
            self, "singular_splits", tuple(parse_split(s) for s in self.singular_splits)
        )

    @property
    def curved_gauss_n(self) -> int:
        if self.boundary_gauss_n is not None:
            return self.boundary_gauss_n
        return max(self.gauss_n, 4)


@dataclass
class CellRecord:
    cell: Cell
    cls: str
    decision: str
    E2: float | None = None
    omega: float | None = None
    points: np.ndarray | None = None


@dataclass
class IntegrationReport:
    value: float
    n_interior: int
    n_boundary: int
    n_exterior: int
    cr: float
    residual_bound: float
    elapsed: float
    n_points: int = 0
    n_criterion: int = 0
    n_accepted: int = 0
    n_floor: int = 0
    n_subdivided: int = 0
    method: str = "adaptive"
    tau: float | None = None
    level: int | None = None
    warnings: list = field(default_factory=list)
    trace: list | None = None

    @property
    def elapsed_ms(self) -> float:
        return 1e3 * self.elapsed

    @property
    def n_cells(self) -> int:
        return self.n_interior + self.n_boundary + self.n_exterior

    def to_dict(self) -> dict:
        """JSON-ready fields (the trace is dropped)."""
        d = asdict(self)
        d.pop("trace")
        d["elapsed_ms"] = self.elapsed_ms
        return d

    @classmethod
    def from_dict(cls, d: dict) -> IntegrationReport:
        names = {f.name for f in fields(cls)} - {"trace"}
        return cls(**{k: v for k, v in d.items() if k in names})


def initial_cells(bbox: Cell, splits) -> list[Cell]:
    """Tile ``bbox`` by the axis-aligned split lines."""
    xs = [bbox.x0, bbox.x1]
    ys = [bbox.y0, bbox.y1]
    for axis, c in (parse_split(s) for s in splits):
        lo, hi = (bbox.x0, bbox.x1) if axis == "x" else (bbox.y0, bbox.y1)
        if not lo < c < hi:
            raise ValueError(f"split {axis}={c} not strictly inside the bounding box")
        (xs if axis == "x" else ys).append(c)
    xs = sorted(set(xs))
    ys = sorted(set(ys))
    return [
        Cell(xs[i], xs[i + 1], ys[j], ys[j + 1], 0)
        for j in range(len(ys) - 1)
        for i in range(len(xs) - 1)
    ]


def _child_corner_values(f: ImplicitFunction, cell: Cell, cv):
    xm, ym = cell.center
    mb = f.eval(xm, cell.y0)
    mr = f.eval(cell.x1, ym)
    mt = f.eval(xm, cell.y1)
    ml = f.eval(cell.x0, ym)
    c = f.eval(xm, ym)
    c0, c1, c2, c3 = cv
    # SW, SE, NW, NE, corners counterclockwise from south-west
    return (
        (c0, mb, c, ml),
        (mb, c1, mr, c),
        (ml, c, mt, c3),
        (c, mr, c2, mt),
    )


def _rect_points(cell: Cell, n: int) -> np.ndarray:
    U, V, _ = _unit_square_rule(n)
    return np.column_stack((cell.x0 + cell.width * U, cell.y0 + cell.height * V))


class _Run:
    """Mutable accumulator for one integration run."""

    def __init__(self, f, F, bbox, cfg: IntegrationConfig):
        self.f = f
        self.F = F
        self.bbox = bbox
        self.cfg = cfg
        self.eps = cfg.min_cell if cfg.min_cell is not None else 1e-6 * bbox.width
        self.parts: list[float] = []
        self.residual: list[float] = []
        self.n_interior = 0
        self.n_boundary = 0
        self.n_exterior = 0
        self.n_points = 0
        self.n_criterion = 0
        self.n_accepted = 0
        self.n_floor = 0
        self.n_subdivided = 0
        self.n_suspect = 0
        self.trace = [] if cfg.trace else None
        self.F_const = F.is_constant
        self._M_const = abs(F.eval(0.0, 0.0)) if self.F_const else None

    # -- helpers -------------------------------------------------------------

    def M(self, cell: Cell) -> float:
        if self._M_const is not None:
            return self._M_const
        return bound_abs_integrand(self.F, cell)

    def classify(self, cell: Cell, cv) -> CellClass:
        by_corners = classify_corner_values(cv)
        if by_corners is CellClass.BOUNDARY:
            return by_corners
        try:
            sign = self.f.enclose(cell.x_range, cell.y_range, self.cfg.enclosure).sign()
        except (IntervalError, ArithmeticError, ValueError):
            sign = None
        if self.cfg.classifier == "corners":
            if sign is not None and sign.value == "straddles":
                self.n_suspect += 1
            return by_corners
        if sign is None or sign.value == "straddles":
            return CellClass.BOUNDARY
        return by_corners

    def record(self, cell, cls, decision, E2=None, omega=None, points=None):
        if self.trace is not None:
            self.trace.append(CellRecord(cell, cls, decision, E2, omega, points))

    def add_interior(self, cell: Cell):
        n = self.cfg.gauss_n
        self.parts.append(integrate_rectangle(self.F, cell, n))
        self.n_interior += 1
        self.n_points += n * n
        if self.trace is not None:
            self.record(cell, "interior", "integrated", points=_rect_points(cell, n))

    def add_floor(self, cell: Cell, reason: str):
        xm, ym = cell.center
        M = self.M(cell)
        self.residual.append(M * cell.area)
        self.n_boundary += 1
        self.n_floor += 1
        if self.f.eval(xm, ym) > 0:
            n = self.cfg.gauss_n
            self.parts.append(integrate_rectangle(self.F, cell, n))
            self.n_points += n * n
            pts = _rect_points(cell, n) if self.trace is not None else None
            self.record(cell, "boundary", f"{reason}-included", points=pts)
        else:
            self.record(cell, "boundary", f"{reason}-skipped")

    def add_curved(self, cell: Cell, region, E2=None, omega=None):
        n = self.cfg.curved_gauss_n
        self.parts.append(integrate_boundary_cell(self.F, region, n))
        self.n_boundary += 1
        self.n_points += n * n * (2 if region.complement_of is not None else 1)
        if E2 is not None:
            self.residual.append(E2)
        if self.trace is not None:
            x, y, _ = region.rule(n)
            pts = np.column_stack((x, y))
            if region.complement_of is not None:
                pts = np.vstack((_rect_points(cell, n), pts))
            self.record(cell, "boundary", "integrated", E2, omega, pts)

    # -- driver --------------------------------------------------------------

    def run(self, cells):
        f = self.f
        stack = [(c, tuple(f.eval(x, y) for x, y in c.corners())) for c in reversed(cells)]
        while stack:
            cell, cv = stack.pop()
            cls = self.classify(cell, cv)
            if cls is CellClass.INTERIOR:
                self.add_interior(cell)
                continue
            if cls is CellClass.EXTERIOR:
                self.n_exterior += 1
                self.record(cell, "exterior", "skipped")
                continue
            if cell.size < self.eps:
                self.add_floor(cell, "floor")
                continue
            if self.cfg.max_depth is not None and cell.depth >= self.cfg.max_depth:
                self.add_floor(cell, "depth-limit")
                continue
            if self.settle_boundary(cell, cv):
                continue
            self.n_subdivided += 1
            self.record(cell, "boundary", "subdivided")
            kids = cell.children()
            kid_cv = _child_corner_values(f, cell, cv)
            for child, ccv in zip(reversed(kids), reversed(kid_cv)):
                stack.append((child, ccv))

    def settle_boundary(self, cell: Cell, cv) -> bool:
        method = self.cfg.method
        if method != "adaptive":
            target = 1.2 * self.bbox.width / 2**self.cfg.uniform_level
            if cell.size > target * (1 + 1e-12):
                return False
        mode = "linear" if method == "uniform_L" else "quadratic"
        try:
            geom = analyze_boundary_cell(self.f, cell, cv, mode=mode)
            region = build_curved_region(geom)
        except (GeometryError, InvalidJacobian, IntervalError):
            return False
        if method != "adaptive":
            self.add_curved(cell, region)
            return True
        est = estimate_local_error(
            self.f, self.F, geom.bezier, cell, self.bbox, self.cfg.tau,
            self.cfg.n_samples, M=self.M(cell),
        )
        self.n_criterion += 1
        if not est.accepted:
            return False
        self.n_accepted += 1
        self.add_curved(cell, region, est.E2, est.omega)
        return True

    def report(self, elapsed: float) -> IntegrationReport:
        cfg = self.cfg
        warnings = []
        if self.n_suspect:
            warnings.append(
                f"topology: {self.n_suspect} cell(s) classified by corner signs have an "
                "interval enclosure containing zero; the boundary may be missed"
            )
        if self.n_floor:
            warnings.append(f"{self.n_floor} boundary cell(s) settled at the minimum cell size")
        cr = self.n_accepted / self.n_criterion if self.n_criterion else 0.0
        return IntegrationReport(
            value=math.fsum(self.parts),
            n_interior=self.n_interior,
            n_boundary=self.n_boundary,
            n_exterior=self.n_exterior,
            cr=cr,
            residual_bound=math.fsum(self.residual),
            elapsed=elapsed,
            n_points=self.n_points,
            n_criterion=self.n_criterion,
            n_accepted=self.n_accepted,
            n_floor=self.n_floor,
            n_subdivided=self.n_subdivided,
            method=cfg.method,
            tau=cfg.tau if cfg.method == "adaptive" else None,
            level=cfg.uniform_level if cfg.method != "adaptive" else None,
            warnings=warnings,
            trace=self.trace,
        )


def _as_cell(bbox) -> Cell:
    if isinstance(bbox, Cell):
        return bbox
    x0, x1, y0, y1 = bbox
    return Cell(float(x0), float(x1), float(y0), float(y1))


def integrate(f, F, bbox, cfg: IntegrationConfig | None = None, **overrides) -> IntegrationReport:
    """Integrate ``F`` over ``{f >= 0} ∩ bbox`` with the method named in ``cfg``.

    ``bbox`` is a Cell or ``(x0, x1, y0, y1)``; keyword overrides are applied
    to ``cfg`` (or to a default config).
    """
    cfg = cfg or IntegrationConfig()
    if overrides:
        cfg = replace(cfg, **overrides)
    f = as_function(f)
    F = as_function(F)
    bbox = _as_cell(bbox)
    if f.domain_box is not None:
        x0, x1, y0, y1 = f.domain_box
        if bbox.x0 < x0 or bbox.x1 > x1 or bbox.y0 < y0 or bbox.y1 > y1:
            raise ValueError("bounding box extends outside the spline parameter range")
    cells = initial_cells(bbox, cfg.singular_splits)
    start = time.perf_counter()
    run = _Run(f, F, bbox, cfg)
    run.run(cells)
    return run.report(time.perf_counter() - start)


def adaptive_integrate(f, F, bbox, cfg: IntegrationConfig | None = None, **overrides):
    """Error-guided adaptive integration (forces ``method='adaptive'``)."""
    return integrate(f, F, bbox, cfg, method="adaptive", **overrides)


def uniform_integrate(f, F, bbox, cfg: IntegrationConfig | None = None, **overrides):
    """Uniform-depth baseline; ``cfg.method`` must be ``uniform_L`` or ``uniform_Q``."""
    cfg = cfg or IntegrationConfig(method="uniform_Q")
    if overrides:
        cfg = replace(cfg, **overrides)
    if cfg.method == "adaptive":
        raise ValueError("uniform_integrate needs method uniform_L or uniform_Q")
    return integrate(f, F, bbox, cfg)


@dataclass
class ComparisonRow:
    method: str
    setting: float
    value: float
    error: float
    time_ms: float
    n_in: int
    n_bd: int
    n_points: int
    cr: float
    residual_bound: float


def compare_methods(
    f,
    F,
    bbox,
    tolerances=(),
    levels=(),
    reference=None,
    methods=METHODS,
    base: IntegrationConfig | None = None,
) -> list[ComparisonRow]:
    """One row per (method, setting): tolerances drive ``adaptive``, levels the
    uniform baselines.  Without ``reference`` an adaptive run at
    ``min(tolerances) / 100`` serves as the reference value."""
    base = base or IntegrationConfig()
    if reference is None:
        tol_ref = (min(tolerances) if tolerances else base.tau) / 100.0
        reference = integrate(f, F, bbox, replace(base, method="adaptive", tau=tol_ref)).value
    rows = []
    for method in methods:
        settings = tolerances if method == "adaptive" else levels
        for s in settings:
            if method == "adaptive":
                cfg = replace(base, method=method, tau=float(s))
            else:
                cfg = replace(base, method=method, uniform_level=int(s))
            rep = integrate(f, F, bbox, cfg)
            rows.append(
                ComparisonRow(
                    method, s, rep.value, abs(rep.value - reference), rep.elapsed_ms,
                    rep.n_interior, rep.n_boundary, rep.n_points, rep.cr, rep.residual_bound,
                )
            )
    return rows


def match_uniform_level(
    f, F, bbox, target: float, reference: float, cfg: IntegrationConfig, max_level: int = 12
) -> IntegrationReport:
    """Coarsest uniform run (``cfg.method`` L or Q) whose error is below
    ``target``; the finest tried level if none gets there."""
    if cfg.method == "adaptive":
        raise ValueError("match_uniform_level needs method uniform_L or uniform_Q")
    f = as_function(f)
    F = as_function(F)
    rep = None
    for k in range(cfg.uniform_level, max_level + 1):
        rep = integrate(f, F, bbox, replace(cfg, uniform_level=k))
        if abs(rep.value - reference) < target:
            break
    return rep
