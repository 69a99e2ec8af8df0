"""Arithmetic expressions in ``x`` and ``y``.

Grammar (lowest to highest precedence)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := ('-' | '+') unary | power
    power  := atom ('^' unary)?
    atom   := NUMBER | 'x' | 'y' | FUNC '(' expr ')' | '(' expr ')'

``^`` binds tighter than unary minus (``-x^2 == -(x^2)``) and is right
associative.  Exponents must fold to a nonnegative integer constant.

Trees are immutable.  They are compiled to Python closures once: a scalar
evaluator (``math``), a vectorised evaluator (``numpy``) and an interval
evaluator.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .interval import Interval

__all__ = [
    "Expr",
    "Const",
    "Var",
    "Binary",
    "Unary",
    "Power",
    "ExpressionSyntaxError",
    "NonIntegerExponent",
    "parse_expression",
    "differentiate",
]


class ExpressionSyntaxError(ValueError):
    """Malformed expression text; ``offset`` is the byte offset of the error."""

    def __init__(self, message: str, text: str, offset: int):
        super().__init__(f"{message} at offset {offset}: {text!r}")
        self.text = text
        self.offset = offset


class NonIntegerExponent(ExpressionSyntaxError):
    pass


# ---------------------------------------------------------------------------
# tree


class Expr:
    """Base class of expression nodes."""

    __slots__ = ()

    def __add__(self, other):
        return add(self, _wrap(other))

    def __radd__(self, other):
        return add(_wrap(other), self)

    def __sub__(self, other):
        return sub(self, _wrap(other))

    def __rsub__(self, other):
        return sub(_wrap(other), self)

    def __mul__(self, other):
        return mul(self, _wrap(other))

    def __rmul__(self, other):
        return mul(_wrap(other), self)

    def __truediv__(self, other):
        return div(self, _wrap(other))

    def __neg__(self):
        return neg(self)

    def __pow__(self, n: int):
        return power(self, n)

    # compiled evaluators are cached on the node
    @cached_property
    def scalar_fn(self):
        return _compile(self, "math")

    @cached_property
    def array_fn(self):
        return _compile(self, "numpy")

    @cached_property
    def interval_fn(self):
        return _interval_closure(self)

    def __call__(self, x, y):
        return self.scalar_fn(x, y)

    def evaluate(self, x: float, y: float) -> float:
        return self.scalar_fn(x, y)

    def evaluate_array(self, x, y) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        out = self.array_fn(x, y)
        return np.broadcast_to(np.asarray(out, dtype=float), np.broadcast(x, y).shape)

    def evaluate_interval(self, X: Interval, Y: Interval) -> Interval:
        return self.interval_fn(X, Y)

    def to_source(self) -> str:
        return _source(self, "math")

    @property
    def is_constant(self) -> bool:
        return not (self.variables())

    def variables(self) -> set:
        out: set = set()
        _collect_vars(self, out)
        return out


@dataclass(frozen=True, eq=True)
class Const(Expr):
    value: float

    def __str__(self):
        return repr(self.value)


@dataclass(frozen=True, eq=True)
class Var(Expr):
    name: str

    def __post_init__(self):
        if self.name not in ("x", "y"):
            raise ValueError(f"unknown variable {self.name!r}")

    def __str__(self):
        return self.name


@dataclass(frozen=True, eq=True)
class Binary(Expr):
    op: str  # one of + - * /
    left: Expr
    right: Expr

    def __str__(self):
        return f"({self.left} {self.op} {self.right})"


@dataclass(frozen=True, eq=True)
class Unary(Expr):
    op: str  # neg, sqrt, abs
    child: Expr

    def __str__(self):
        if self.op == "neg":
            return f"(-{self.child})"
        return f"{self.op}({self.child})"


@dataclass(frozen=True, eq=True)
class Power(Expr):
    child: Expr
    exponent: int

    def __post_init__(self):
        if self.exponent < 0:
            raise ValueError("negative exponent")

    def __str__(self):
        return f"({self.child})^{self.exponent}"


X = Var("x")
Y = Var("y")
ZERO = Const(0.0)
ONE = Const(1.0)


def _wrap(v) -> Expr:
    if isinstance(v, Expr):
        return v
    return Const(float(v))


def _collect_vars(e: Expr, out: set) -> None:
    if isinstance(e, Var):
        out.add(e.name)
    elif isinstance(e, Binary):
        _collect_vars(e.left, out)
        _collect_vars(e.right, out)
    elif isinstance(e, (Unary, Power)):
        _collect_vars(e.child, out)


# -- smart constructors (light constant folding) ----------------------------


def _is(e: Expr, v: float) -> bool:
    return isinstance(e, Const) and e.value == v


def add(a: Expr, b: Expr) -> Expr:
    if _is(a, 0.0):
        return b
    if _is(b, 0.0):
        return a
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value + b.value)
    return Binary("+", a, b)


def sub(a: Expr, b: Expr) -> Expr:
    if _is(b, 0.0):
        return a
    if _is(a, 0.0):
        return neg(b)
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value - b.value)
    return Binary("-", a, b)


def mul(a: Expr, b: Expr) -> Expr:
    if _is(a, 0.0) or _is(b, 0.0):
        return ZERO
    if _is(a, 1.0):
        return b
    if _is(b, 1.0):
        return a
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value * b.value)
    return Binary("*", a, b)


def div(a: Expr, b: Expr) -> Expr:
    if _is(b, 1.0):
        return a
    if _is(a, 0.0) and not _is(b, 0.0):
        return ZERO
    return Binary("/", a, b)


def neg(a: Expr) -> Expr:
    if isinstance(a, Const):
        return Const(-a.value)
    if isinstance(a, Unary) and a.op == "neg":
        return a.child
    return Unary("neg", a)


def power(a: Expr, n: int) -> Expr:
    if n == 0:
        return ONE
    if n == 1:
        return a
    if isinstance(a, Const):
        return Const(a.value**n)
    return Power(a, n)


def sqrt(a: Expr) -> Expr:
    return Unary("sqrt", a)


# ---------------------------------------------------------------------------
# differentiation


def differentiate(e: Expr, var: str) -> Expr:
    """Exact symbolic partial derivative of ``e`` with respect to ``var``."""
    if isinstance(e, Const):
        return ZERO
    if isinstance(e, Var):
        return ONE if e.name == var else ZERO
    if isinstance(e, Binary):
        da = differentiate(e.left, var)
        db = differentiate(e.right, var)
        if e.op == "+":
            return add(da, db)
        if e.op == "-":
            return sub(da, db)
        if e.op == "*":
            return add(mul(da, e.right), mul(e.left, db))
        if e.op == "/":
            # (a'b - ab') / b^2
            return div(sub(mul(da, e.right), mul(e.left, db)), power(e.right, 2))
        raise ValueError(e.op)
    if isinstance(e, Unary):
        dc = differentiate(e.child, var)
        if e.op == "neg":
            return neg(dc)
        if e.op == "sqrt":
            return div(dc, mul(Const(2.0), e))
        if e.op == "abs":
            return mul(Unary("sign", e.child), dc)
        if e.op == "sign":
            return ZERO
        raise ValueError(e.op)
    if isinstance(e, Power):
        if e.exponent == 0:
            return ZERO
        dc = differentiate(e.child, var)
        return mul(mul(Const(float(e.exponent)), power(e.child, e.exponent - 1)), dc)
    raise TypeError(type(e))


# ---------------------------------------------------------------------------
# compilation


def _source(e: Expr, lib: str) -> str:
    if isinstance(e, Const):
        return f"({e.value!r})"
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Binary):
        return f"({_source(e.left, lib)} {e.op} {_source(e.right, lib)})"
    if isinstance(e, Unary):
        inner = _source(e.child, lib)
        if e.op == "neg":
            return f"(-{inner})"
        if e.op == "sqrt":
            return f"_sqrt({inner})"
        if e.op == "abs":
            return f"_abs({inner})"
        if e.op == "sign":
            return f"_sign({inner})"
        raise ValueError(e.op)
    if isinstance(e, Power):
        inner = _source(e.child, lib)
        if e.exponent == 2:
            return f"_sq({inner})"
        return f"({inner} ** {e.exponent})"
    raise TypeError(type(e))


def _sq_scalar(v):
    return v * v


def _sign_scalar(v):
    return float(v > 0) - float(v < 0)


_NAMESPACES = {
    "math": {
        "_sqrt": math.sqrt,
        "_abs": abs,
        "_sign": _sign_scalar,
        "_sq": _sq_scalar,
    },
    "numpy": {
        "_sqrt": np.sqrt,
        "_abs": np.abs,
        "_sign": np.sign,
        "_sq": np.square,
    },
}


def _compile(e: Expr, lib: str):
    src = f"lambda x, y: {_source(e, lib)}"
    return eval(compile(src, "<expression>", "eval"), dict(_NAMESPACES[lib]))


def _interval_closure(e: Expr):
    if isinstance(e, Const):
        c = Interval(e.value)
        return lambda X, Y: c
    if isinstance(e, Var):
        if e.name == "x":
            return lambda X, Y: X
        return lambda X, Y: Y
    if isinstance(e, Binary):
        fa = _interval_closure(e.left)
        fb = _interval_closure(e.right)
        if e.op == "+":
            return lambda X, Y: fa(X, Y) + fb(X, Y)
        if e.op == "-":
            return lambda X, Y: fa(X, Y) - fb(X, Y)
        if e.op == "*":
            if e.left == e.right:
                return lambda X, Y: fa(X, Y).sqr()
            return lambda X, Y: fa(X, Y) * fb(X, Y)
        return lambda X, Y: fa(X, Y) / fb(X, Y)
    if isinstance(e, Unary):
        fc = _interval_closure(e.child)
        if e.op == "neg":
            return lambda X, Y: -fc(X, Y)
        if e.op == "sqrt":
            return lambda X, Y: fc(X, Y).sqrt()
        if e.op == "abs":
            return lambda X, Y: abs(fc(X, Y))
        if e.op == "sign":
            def _sign(X, Y):
                s = fc(X, Y)
                return Interval(-1.0 if s.lo < 0 else (0.0 if s.lo == 0 else 1.0),
                                1.0 if s.hi > 0 else (0.0 if s.hi == 0 else -1.0))
            return _sign
        raise ValueError(e.op)
    if isinstance(e, Power):
        fc = _interval_closure(e.child)
        n = e.exponent
        return lambda X, Y: fc(X, Y).pow(n)
    raise TypeError(type(e))


# ---------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()]))"
)
_FUNCS = {"sqrt", "abs"}


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = self._tokenize(text)
        self.i = 0

    def _tokenize(self, text):
        toks = []
        pos = 0
        n = len(text)
        while pos < n:
            if text[pos].isspace():
                pos += 1
                continue
            m = _TOKEN.match(text, pos)
            if m is None or m.end() == pos:
                raise ExpressionSyntaxError(
                    f"unexpected character {text[pos]!r}", text, _byte_offset(text, pos)
                )
            kind = m.lastgroup
            start = m.start(kind)
            toks.append((kind, m.group(kind), start))
            pos = m.end()
        toks.append(("end", "", n))
        return toks

    def error(self, message, tok=None, cls=ExpressionSyntaxError):
        tok = tok or self.tokens[self.i]
        return cls(message, self.text, _byte_offset(self.text, tok[2]))

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        tok = self.next()
        if tok[1] != value or tok[0] == "end":
            raise self.error(f"expected {value!r}", tok)
        return tok

    def parse(self) -> Expr:
        if self.peek()[0] == "end":
            raise self.error("empty expression")
        e = self.expr()
        if self.peek()[0] != "end":
            raise self.error(f"unexpected token {self.peek()[1]!r}")
        return e

    def expr(self):
        e = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.next()[1]
            rhs = self.term()
            e = Binary(op, e, rhs)
        return e

    def term(self):
        e = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.next()[1]
            rhs = self.unary()
            e = Binary(op, e, rhs)
        return e

    def unary(self):
        tok = self.peek()
        if tok[0] == "op" and tok[1] in ("-", "+"):
            self.next()
            child = self.unary()
            if tok[1] == "+":
                return child
            if isinstance(child, Const):
                return Const(-child.value)
            return Unary("neg", child)
        return self.pow()

    def pow(self):
        base = self.atom()
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "^":
            self.next()
            exp_tok = self.peek()
            exponent = self.unary()
            if not exponent.is_constant:
                raise self.error("exponent must be a constant", exp_tok, NonIntegerExponent)
            value = exponent.scalar_fn(0.0, 0.0)
            if value != int(value) or value < 0:
                raise self.error(
                    f"exponent {value!r} is not a nonnegative integer", exp_tok, NonIntegerExponent
                )
            return Power(base, int(value))
        return base

    def atom(self):
        tok = self.next()
        kind, value, _ = tok
        if kind == "num":
            return Const(float(value))
        if kind == "name":
            if value in ("x", "y"):
                return Var(value)
            if value in _FUNCS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Unary(value, arg)
            raise self.error(f"unknown name {value!r}", tok)
        if kind == "op" and value == "(":
            e = self.expr()
            self.expect(")")
            return e
        if kind == "end":
            raise self.error("unexpected end of input", tok)
        raise self.error(f"unexpected token {value!r}", tok)


def _byte_offset(text: str, char_offset: int) -> int:
    return len(text[:char_offset].encode("utf-8"))


def parse_expression(text: str) -> Expr:
    """Parse ``text`` into an expression tree.

    >>> parse_expression("x^3*y - x*y + 2.5").evaluate(1.0, 1.0)
    2.5
    """
    return _Parser(text).parse()
