"""Closed real intervals with outward-rounded arithmetic.

Every operation computes its endpoints in ordinary floating point and then
moves each endpoint one ulp outward, so the result always encloses the exact
range even though the FPU rounds to nearest.
"""

from __future__ import annotations

import enum
import math

__all__ = [
    "Interval",
    "Sign",
    "IntervalError",
    "DivisionByZeroInterval",
    "NegativeSqrtDomain",
    "IntervalOverflow",
    "interval_binary",
    "interval_unary",
    "interval_contains_zero",
    "interval_sign",
]

_down = -math.inf
_up = math.inf


class IntervalError(ArithmeticError):
    pass


class DivisionByZeroInterval(IntervalError, ZeroDivisionError):
    pass


class NegativeSqrtDomain(IntervalError, ValueError):
    pass


class IntervalOverflow(IntervalError, OverflowError):
    pass


class Sign(enum.Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    STRADDLES = "straddles"


def _lo(v: float) -> float:
    return math.nextafter(v, _down)


def _hi(v: float) -> float:
    return math.nextafter(v, _up)


def _sqr_slack(lo: float, hi: float) -> float:
    # tolerance for a slightly negative lower bound caused by rounding slack
    return 4.0 * math.ulp(max(abs(lo), abs(hi), 1.0))


class Interval:
    """Closed interval ``[lo, hi]`` with ``lo <= hi``.

    Mixed arithmetic with plain numbers is supported; a number ``c`` is
    treated as the degenerate interval ``[c, c]``.
    """

    __slots__ = ("lo", "hi")

    def __init__(self, lo: float, hi: float | None = None):
        if hi is None:
            hi = lo
        lo = float(lo)
        hi = float(hi)
        if not lo <= hi:
            raise ValueError(f"invalid interval [{lo}, {hi}]")
        self.lo = lo
        self.hi = hi

    @classmethod
    def _raw(cls, lo: float, hi: float) -> Interval:
        if lo == _down or hi == _up:
            raise IntervalOverflow("interval endpoint overflowed")
        obj = object.__new__(cls)
        obj.lo = lo
        obj.hi = hi
        return obj

    @staticmethod
    def coerce(value) -> Interval:
        if isinstance(value, Interval):
            return value
        return Interval(value, value)

    # -- inspection -------------------------------------------------------

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def contains(self, value) -> bool:
        if isinstance(value, Interval):
            return self.lo <= value.lo and value.hi <= self.hi
        return self.lo <= value <= self.hi

    __contains__ = contains

    def hull(self, other: Interval) -> Interval:
        return Interval._raw(min(self.lo, other.lo), max(self.hi, other.hi))

    def intersect(self, other: Interval) -> Interval | None:
        lo = max(self.lo, other.lo)
        hi = min(self.hi, other.hi)
        if lo > hi:
            return None
        return Interval._raw(lo, hi)

    def __iter__(self):
        yield self.lo
        yield self.hi

    def __eq__(self, other):
        if not isinstance(other, Interval):
            return NotImplemented
        return self.lo == other.lo and self.hi == other.hi

    def __hash__(self):
        return hash((self.lo, self.hi))

    def __repr__(self):
        return f"Interval({self.lo!r}, {self.hi!r})"

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, Interval):
            other = Interval.coerce(other)
        return Interval._raw(_lo(self.lo + other.lo), _hi(self.hi + other.hi))

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, Interval):
            other = Interval.coerce(other)
        return Interval._raw(_lo(self.lo - other.hi), _hi(self.hi - other.lo))

    def __rsub__(self, other):
        return Interval.coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Interval):
            other = Interval.coerce(other)
        a, b, c, d = self.lo, self.hi, other.lo, other.hi
        p = (a * c, a * d, b * c, b * d)
        return Interval._raw(_lo(min(p)), _hi(max(p)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Interval):
            other = Interval.coerce(other)
        c, d = other.lo, other.hi
        if c <= 0.0 <= d:
            raise DivisionByZeroInterval(f"divisor {other!r} contains zero")
        a, b = self.lo, self.hi
        q = (a / c, a / d, b / c, b / d)
        return Interval._raw(_lo(min(q)), _hi(max(q)))

    def __rtruediv__(self, other):
        return Interval.coerce(other) / self

    def __neg__(self):
        return Interval._raw(-self.hi, -self.lo)

    def __pos__(self):
        return self

    def __abs__(self):
        a, b = self.lo, self.hi
        if a >= 0.0:
            return self
        if b <= 0.0:
            return Interval._raw(-b, -a)
        return Interval._raw(0.0, max(-a, b))

    def sqr(self) -> Interval:
        """Tight square; zero-straddling inputs map to ``[0, max(a^2, b^2)]``."""
        a, b = self.lo, self.hi
        if a >= 0.0:
            return Interval._raw(max(0.0, _lo(a * a)), _hi(b * b))
        if b <= 0.0:
            return Interval._raw(max(0.0, _lo(b * b)), _hi(a * a))
        return Interval._raw(0.0, _hi(max(a * a, b * b)))

    def __pow__(self, n):
        if not isinstance(n, int) or isinstance(n, bool):
            raise TypeError("interval powers take a nonnegative int exponent")
        return self.pow(n)

    def pow(self, n: int) -> Interval:
        if n < 0:
            raise ValueError("negative exponent")
        if n == 0:
            return Interval._raw(1.0, 1.0)
        if n == 1:
            return self
        if n % 2 == 0:
            # repeated squaring avoids the dependency problem of x*x
            return self.pow(n // 2).sqr()
        # odd powers are monotone
        a, b = self.lo, self.hi
        return Interval._raw(_lo(a**n), _hi(b**n))

    def sqrt(self) -> Interval:
        a, b = self.lo, self.hi
        if a < 0.0:
            if a >= -_sqr_slack(a, b) and b >= 0.0:
                a = 0.0
            else:
                raise NegativeSqrtDomain(f"sqrt of {self!r}")
        return Interval._raw(max(0.0, _lo(math.sqrt(a))), _hi(math.sqrt(b)))

    # -- sign -------------------------------------------------------------

    def sign(self) -> Sign:
        if self.lo > 0.0:
            return Sign.POSITIVE
        if self.hi < 0.0:
            return Sign.NEGATIVE
        return Sign.STRADDLES

    def contains_zero(self) -> bool:
        return self.lo <= 0.0 <= self.hi


_BINARY = {
    "add": Interval.__add__,
    "sub": Interval.__sub__,
    "mul": Interval.__mul__,
    "div": Interval.__truediv__,
}


def interval_binary(op: str, a: Interval, b: Interval) -> Interval:
    try:
        fn = _BINARY[op]
    except KeyError:
        raise ValueError(f"unknown binary op {op!r}") from None
    return fn(Interval.coerce(a), Interval.coerce(b))


def interval_unary(op: str, a: Interval, n: int | None = None) -> Interval:
    a = Interval.coerce(a)
    if op == "neg":
        return -a
    if op == "sqr":
        return a.sqr()
    if op == "pow_n":
        if n is None:
            raise ValueError("pow_n needs an exponent")
        return a.pow(n)
    if op == "sqrt":
        return a.sqrt()
    if op == "abs":
        return abs(a)
    raise ValueError(f"unknown unary op {op!r}")


def interval_contains_zero(a: Interval) -> bool:
    return a.contains_zero()


def interval_sign(a: Interval) -> Sign:
    return a.sign()
