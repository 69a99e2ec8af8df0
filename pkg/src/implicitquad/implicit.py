"""Uniform wrapper over the two kinds of scalar fields used as level-set
functions and integrands: parsed expressions and B-spline surfaces."""

from __future__ import annotations

from functools import cached_property

import numpy as np

from .bspline import BSplineSurface, OutOfKnotRange, load_spline
from .expression import Expr, differentiate, parse_expression
from .interval import Interval

__all__ = ["ImplicitFunction", "SqrtAtZero", "OutOfKnotRange", "as_function"]


class SqrtAtZero(ArithmeticError):
    """Gradient requested where a sqrt argument is exactly zero."""


def _contains_sqrt(e: Expr) -> bool:
    return "sqrt(" in str(e)


class ImplicitFunction:
    """Scalar field ``f(x, y)`` with point, gradient, array and interval
    evaluation.  Instances are immutable once built."""

    def __init__(self, body, text: str | None = None):
        if isinstance(body, str):
            text = body if text is None else text
            body = parse_expression(body)
        if not isinstance(body, (Expr, BSplineSurface)):
            raise TypeError(f"unsupported body {type(body).__name__}")
        self.body = body
        self.text = text if text is not None else (str(body) if isinstance(body, Expr) else None)
        if isinstance(body, Expr):
            self._dx = differentiate(body, "x")
            self._dy = differentiate(body, "y")
            self._f = body.scalar_fn
            self._fx = self._dx.scalar_fn
            self._fy = self._dy.scalar_fn
            self._has_sqrt = _contains_sqrt(body)
            self.domain_box = None
        else:
            self._dx = body.derivative("x")
            self._dy = body.derivative("y")
            self._f = body.evaluate
            self._fx = self._dx.evaluate
            self._fy = self._dy.evaluate
            self._has_sqrt = False
            self.domain_box = (*body.x_range, *body.y_range)

    @classmethod
    def from_expression(cls, text: str) -> ImplicitFunction:
        return cls(parse_expression(text), text=text)

    @classmethod
    def from_spline(cls, surface_or_path) -> ImplicitFunction:
        if isinstance(surface_or_path, BSplineSurface):
            return cls(surface_or_path)
        return cls(load_spline(surface_or_path), text=str(surface_or_path))

    @property
    def is_spline(self) -> bool:
        return isinstance(self.body, BSplineSurface)

    @property
    def is_constant(self) -> bool:
        return isinstance(self.body, Expr) and self.body.is_constant

    @property
    def partials(self) -> tuple:
        """Derivative bodies ``(df/dx, df/dy)``."""
        return self._dx, self._dy

    def __repr__(self):
        kind = "spline" if self.is_spline else "expression"
        return f"ImplicitFunction({kind}: {self.text!r})"

    # -- evaluation -----------------------------------------------------------

    def eval(self, x: float, y: float) -> float:
        return self._f(x, y)

    __call__ = eval

    def grad(self, x: float, y: float) -> tuple[float, float]:
        try:
            return self._fx(x, y), self._fy(x, y)
        except ZeroDivisionError:
            if self._has_sqrt:
                raise SqrtAtZero(f"gradient undefined at ({x!r}, {y!r})") from None
            raise

    def eval_array(self, x, y) -> np.ndarray:
        return self.body.evaluate_array(x, y)

    def grad_array(self, x, y) -> tuple[np.ndarray, np.ndarray]:
        with np.errstate(divide="ignore", invalid="ignore"):
            return self._dx.evaluate_array(x, y), self._dy.evaluate_array(x, y)

    def interval_eval(self, X: Interval, Y: Interval) -> Interval:
        return self.body.evaluate_interval(X, Y)

    def interval_grad(self, X: Interval, Y: Interval) -> tuple[Interval, Interval]:
        return self._dx.evaluate_interval(X, Y), self._dy.evaluate_interval(X, Y)

    @cached_property
    def _hessian(self):
        if isinstance(self.body, Expr):
            dxx = differentiate(self._dx, "x")
            dxy = differentiate(self._dx, "y")
            dyy = differentiate(self._dy, "y")
        else:
            dxx = self._dx.derivative("x")
            dxy = self._dx.derivative("y")
            dyy = self._dy.derivative("y")
        return dxx, dxy, dyy

    def taylor_enclosure(self, X: Interval, Y: Interval) -> Interval:
        """Second-order Taylor form about the box center with an interval
        Hessian remainder; encloses the range of ``f`` over ``X x Y``."""
        cx, cy = X.mid, Y.mid
        C, D = Interval(cx), Interval(cy)
        dX = X - cx
        dY = Y - cy
        fc = self.body.evaluate_interval(C, D)
        gx = self._dx.evaluate_interval(C, D)
        gy = self._dy.evaluate_interval(C, D)
        hxx, hxy, hyy = (h.evaluate_interval(X, Y) for h in self._hessian)
        quad = 0.5 * (hxx * dX.sqr() + hyy * dY.sqr()) + hxy * (dX * dY)
        return fc + gx * dX + gy * dY + quad

    def enclose(self, X: Interval, Y: Interval, form: str = "natural") -> Interval:
        """Range enclosure: ``"natural"`` extension, or ``"taylor"`` (the
        natural extension intersected with the second-order Taylor form).
        The Taylor form is skipped once the natural extension excludes zero."""
        Z = self.body.evaluate_interval(X, Y)
        if form == "natural":
            return Z
        if form != "taylor":
            raise ValueError(f"unknown enclosure form {form!r}")
        if Z.lo > 0 or Z.hi < 0:
            return Z
        try:
            T = self.taylor_enclosure(X, Y)
        except ArithmeticError:
            return Z
        both = Z.intersect(T)
        return both if both is not None else Z


def as_function(obj) -> ImplicitFunction:
    """Coerce an expression string, tree or spline into an ImplicitFunction."""
    if isinstance(obj, ImplicitFunction):
        return obj
    if isinstance(obj, (int, float)):
        return ImplicitFunction(repr(float(obj)))
    return ImplicitFunction(obj)
