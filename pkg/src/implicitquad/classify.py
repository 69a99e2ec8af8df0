"""Quadtree cells and their interior / exterior / boundary classification."""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .implicit import ImplicitFunction
from .interval import Interval, Sign

__all__ = [
    "Cell",
    "CellClass",
    "classify_by_corners",
    "classify_by_interval",
    "classify_corner_values",
]


class CellClass(enum.Enum):
    INTERIOR = "interior"
    EXTERIOR = "exterior"
    BOUNDARY = "boundary"


@dataclass(frozen=True)
class Cell:
    """Axis-aligned box ``[x0, x1] x [y0, y1]`` at quadtree ``depth``."""

    x0: float
    x1: float
    y0: float
    y1: float
    depth: int = 0

    def __post_init__(self):
        if not (self.x0 < self.x1 and self.y0 < self.y1):
            raise ValueError(f"cell must have positive area: {self}")
        if self.depth < 0:
            raise ValueError("depth must be >= 0")

    @classmethod
    def from_ranges(cls, x_range, y_range, depth: int = 0) -> Cell:
        xr = Interval.coerce(x_range) if isinstance(x_range, Interval) else Interval(*x_range)
        yr = Interval.coerce(y_range) if isinstance(y_range, Interval) else Interval(*y_range)
        return cls(xr.lo, xr.hi, yr.lo, yr.hi, depth)

    @property
    def x_range(self) -> Interval:
        return Interval(self.x0, self.x1)

    @property
    def y_range(self) -> Interval:
        return Interval(self.y0, self.y1)

    @property
    def width(self) -> float:
        return self.x1 - self.x0

    @property
    def height(self) -> float:
        return self.y1 - self.y0

    @property
    def size(self) -> float:
        return max(self.x1 - self.x0, self.y1 - self.y0)

    @property
    def area(self) -> float:
        return (self.x1 - self.x0) * (self.y1 - self.y0)

    @property
    def diameter(self) -> float:
        return ((self.x1 - self.x0) ** 2 + (self.y1 - self.y0) ** 2) ** 0.5

    @property
    def center(self) -> tuple[float, float]:
        return 0.5 * (self.x0 + self.x1), 0.5 * (self.y0 + self.y1)

    def corners(self) -> tuple:
        """Corners counterclockwise from the south-west one."""
        return (
            (self.x0, self.y0),
            (self.x1, self.y0),
            (self.x1, self.y1),
            (self.x0, self.y1),
        )

    def children(self) -> tuple[Cell, Cell, Cell, Cell]:
        """Quadrisection in SW, SE, NW, NE order."""
        xm, ym = self.center
        d = self.depth + 1
        return (
            Cell(self.x0, xm, self.y0, ym, d),
            Cell(xm, self.x1, self.y0, ym, d),
            Cell(self.x0, xm, ym, self.y1, d),
            Cell(xm, self.x1, ym, self.y1, d),
        )

    def contains_cell(self, other: Cell) -> bool:
        return (
            self.x0 <= other.x0
            and other.x1 <= self.x1
            and self.y0 <= other.y0
            and other.y1 <= self.y1
        )


def classify_corner_values(values) -> CellClass:
    """Sign vote over the corner values; exact zeros abstain.

    Interior if no value is negative and one is positive, exterior if no
    value is positive and one is negative, boundary otherwise (mixed signs
    or all zero).  This is the baseline test, blind to curves that touch a
    corner or pass between corners.
    """
    pos = any(v > 0 for v in values)
    neg = any(v < 0 for v in values)
    if pos and not neg:
        return CellClass.INTERIOR
    if neg and not pos:
        return CellClass.EXTERIOR
    return CellClass.BOUNDARY


def classify_by_corners(f: ImplicitFunction, cell: Cell) -> CellClass:
    return classify_corner_values([f.eval(x, y) for x, y in cell.corners()])


_FROM_SIGN = {
    Sign.POSITIVE: CellClass.INTERIOR,
    Sign.NEGATIVE: CellClass.EXTERIOR,
    Sign.STRADDLES: CellClass.BOUNDARY,
}


def classify_by_interval(f: ImplicitFunction, cell: Cell, enclosure: str = "natural") -> CellClass:
    """Classify from an enclosure of ``f`` over the cell (see
    ``ImplicitFunction.enclose`` for the forms).

    A cell met by the zero set of ``f`` is always reported as boundary.
    """
    return _FROM_SIGN[f.enclose(cell.x_range, cell.y_range, enclosure).sign()]
