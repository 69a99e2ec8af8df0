"""Local error bound for a boundary cell.

The region between the true boundary and its Bezier replacement is
covered by a band as long as the Bezier and as wide as the largest sampled
Sampson distance; multiplied by a bound on ``|F|`` this bounds the
integral lost in the cell.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .classify import Cell
from .geometry import GRAD_TOL, QuadraticBezier, VanishingGradient, bezier_arc_length, sampson_distance
from .implicit import ImplicitFunction

__all__ = [
    "DEFAULT_SAMPLES",
    "LocalErrorEstimate",
    "bound_abs_integrand",
    "narrow_band_area",
    "subdivision_criterion",
    "estimate_local_error",
]

DEFAULT_SAMPLES = 5


@dataclass(frozen=True)
class LocalErrorEstimate:
    M: float
    band_width: float
    band_length: float
    S_D2: float
    E2: float
    omega: float
    tau: float
    accepted: bool


def bound_abs_integrand(F: ImplicitFunction, cell: Cell) -> float:
    """Upper bound of ``|F|`` over the cell from its interval enclosure."""
    Z = F.interval_eval(cell.x_range, cell.y_range)
    return max(abs(Z.lo), abs(Z.hi))


def narrow_band_area(
    f: ImplicitFunction,
    b: QuadraticBezier,
    n_samples: int = DEFAULT_SAMPLES,
    cell: Cell | None = None,
    grad_tol: float = GRAD_TOL,
) -> tuple[float, float, float]:
    """``(band_width, band_length, S_D2)`` for the Bezier ``b``.

    Samples sit at ``t_i = i / (n_samples + 1)``.  Where the gradient
    vanishes at a sample the width falls back to half the cell diameter
    (or half the chord when no cell is given).
    """
    if n_samples < 2:
        raise ValueError("n_samples must be >= 2")
    ts = np.arange(1, n_samples + 1) / (n_samples + 1)
    pts = b.point(ts)
    width = 0.0
    for x, y in pts:
        try:
            d = sampson_distance(f, (x, y), grad_tol)
        except VanishingGradient:
            d = 0.5 * (cell.diameter if cell is not None else b.chord_length)
        if d > width:
            width = d
    length = bezier_arc_length(b)
    return width, length, width * length


def subdivision_criterion(E2: float, cell: Cell, bbox: Cell, tau: float) -> tuple[float, bool]:
    """``(omega, E2 < omega * tau)`` with ``omega`` the cell's share of the bbox area."""
    if not tau > 0:
        raise ValueError("tau must be positive")
    omega = cell.area / bbox.area
    return omega, E2 < omega * tau


def estimate_local_error(
    f: ImplicitFunction,
    F: ImplicitFunction,
    b: QuadraticBezier,
    cell: Cell,
    bbox: Cell,
    tau: float,
    n_samples: int = DEFAULT_SAMPLES,
    M: float | None = None,
) -> LocalErrorEstimate:
    if M is None:
        M = bound_abs_integrand(F, cell)
    width, length, area = narrow_band_area(f, b, n_samples, cell)
    E2 = M * area
    omega, accepted = subdivision_criterion(E2, cell, bbox, tau)
    return LocalErrorEstimate(M, width, length, area, E2, omega, tau, accepted)
