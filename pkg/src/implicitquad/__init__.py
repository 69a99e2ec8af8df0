"""Adaptive integration over implicitly defined planar domains.

    >>> from implicitquad import integrate
    >>> rep = integrate("1 - x^2 - y^2", "1", (-1, 1, -1, 1), tau=1e-6)
    >>> abs(rep.value - 3.141592653589793) < 1e-6
    True
"""

from .bspline import BSplineSurface, OutOfKnotRange, dump_spline, load_spline
from .classify import Cell, CellClass, classify_by_corners, classify_by_interval
from .expression import ExpressionSyntaxError, NonIntegerExponent, differentiate, parse_expression
from .geometry import QuadraticBezier, analyze_boundary_cell, sampson_distance
from .implicit import ImplicitFunction, SqrtAtZero, as_function
from .integrator import (
    METHODS,
    ComparisonRow,
    IntegrationConfig,
    IntegrationReport,
    adaptive_integrate,
    compare_methods,
    integrate,
    uniform_integrate,
)
from .interval import Interval, IntervalError
from .quadrature import gauss_legendre, integrate_rectangle

__version__ = "0.1.0"

__all__ = [
    "BSplineSurface",
    "Cell",
    "CellClass",
    "ComparisonRow",
    "ExpressionSyntaxError",
    "ImplicitFunction",
    "IntegrationConfig",
    "IntegrationReport",
    "Interval",
    "IntervalError",
    "METHODS",
    "NonIntegerExponent",
    "OutOfKnotRange",
    "QuadraticBezier",
    "SqrtAtZero",
    "adaptive_integrate",
    "analyze_boundary_cell",
    "as_function",
    "classify_by_corners",
    "classify_by_interval",
    "compare_methods",
    "differentiate",
    "dump_spline",
    "gauss_legendre",
    "integrate",
    "integrate_rectangle",
    "load_spline",
    "parse_expression",
    "sampson_distance",
    "uniform_integrate",
]
