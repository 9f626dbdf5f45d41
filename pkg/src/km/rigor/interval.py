"""Directed-rounding interval arithmetic over expression trees.

Intervals wrap mpmath's outward-rounded interval type at an explicit mantissa
precision.  Evaluation of an expression over a box of intervals satisfies the
fundamental containment property: the true value at every point of the box
lies inside the returned interval.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
from mpmath.ctx_iv import MPIntervalContext

from .expr import Add, Div, Expr, Mul, Neg, Pow, Rat, Sqrt, Sub, Var
from . import expr as _expr
from .field import NotInField, Sqrt2Value, exact_eval

DEFAULT_PRECISION = 256


def default_precision() -> int:
    value = os.environ.get("KM_PRECISION_BITS")
    if value:
        try:
            bits = int(value)
            if bits >= 16:
                return bits
        except ValueError:
            pass
    return DEFAULT_PRECISION


class IntervalError(ArithmeticError):
    pass


class NegativeRadicand(IntervalError):
    pass


class DivisionByZeroInterval(IntervalError):
    pass


_CONTEXTS: dict[int, MPIntervalContext] = {}


def context(precision: int) -> MPIntervalContext:
    ctx = _CONTEXTS.get(precision)
    if ctx is None:
        ctx = MPIntervalContext()
        ctx.prec = precision
        _CONTEXTS[precision] = ctx
    return ctx


@dataclass(frozen=True)
class Interval:
    """Closed interval [lo, hi] with endpoints at a stated binary precision."""

    ivalue: object  # mpmath ivmpf
    precision: int

    @classmethod
    def from_fraction(cls, v: Fraction | int, precision: int) -> "Interval":
        ctx = context(precision)
        v = Fraction(v)
        return cls(ctx.mpf(v.numerator) / ctx.mpf(v.denominator), precision)

    @classmethod
    def from_endpoints(cls, lo, hi, precision: int) -> "Interval":
        ctx = context(precision)
        if isinstance(lo, Fraction) or isinstance(hi, Fraction):
            lo_iv = cls.from_fraction(Fraction(lo), precision).ivalue
            hi_iv = cls.from_fraction(Fraction(hi), precision).ivalue
            return cls(ctx.mpf([lo_iv.a, hi_iv.b]), precision)
        return cls(ctx.mpf([lo, hi]), precision)

    @property
    def lo(self) -> mpmath.mpf:
        return mpmath.mpf(self.ivalue._mpi_[0])

    @property
    def hi(self) -> mpmath.mpf:
        return mpmath.mpf(self.ivalue._mpi_[1])

    @property
    def width(self) -> mpmath.mpf:
        return self.hi - self.lo

    @property
    def mid(self) -> mpmath.mpf:
        return (self.lo + self.hi) / 2

    def contains(self, v) -> bool:
        return bool(self.lo <= v <= self.hi)

    def contains_interval(self, other: "Interval") -> bool:
        return bool(self.lo <= other.lo and other.hi <= self.hi)

    def contains_zero(self) -> bool:
        return bool(self.lo <= 0 <= self.hi)

    def strictly_positive(self) -> bool:
        return bool(self.lo > 0)

    def nonnegative(self) -> bool:
        return bool(self.lo >= 0)

    def strictly_negative(self) -> bool:
        return bool(self.hi < 0)

    def strictly_above(self, other: "Interval") -> bool:
        return bool(self.lo > other.hi)

    def strictly_below(self, other: "Interval") -> bool:
        return bool(self.hi < other.lo)

    def disjoint_from(self, other: "Interval") -> bool:
        return self.strictly_above(other) or self.strictly_below(other)

    def intersect(self, other: "Interval") -> "Interval":
        ctx = context(self.precision)
        lo = max(self.lo, other.lo)
        hi = min(self.hi, other.hi)
        if lo > hi:
            raise IntervalError("empty intersection")
        return Interval(ctx.mpf([lo, hi]), self.precision)

    def hull(self, other: "Interval") -> "Interval":
        ctx = context(self.precision)
        return Interval(ctx.mpf([min(self.lo, other.lo), max(self.hi, other.hi)]), self.precision)

    def split(self) -> tuple["Interval", "Interval"]:
        ctx = context(self.precision)
        m = self.mid
        return (
            Interval(ctx.mpf([self.lo, m]), self.precision),
            Interval(ctx.mpf([m, self.hi]), self.precision),
        )

    def __str__(self) -> str:
        return f"[{mpmath.nstr(self.lo, 17)}, {mpmath.nstr(self.hi, 17)}]"


@dataclass(frozen=True)
class Face:
    """One side of a box: its interval endpoint plus openness and the exact
    algebraic endpoint (when known), used by the structural sign rules."""

    open: bool = False
    exact: Sqrt2Value | None = None


@dataclass(frozen=True)
class BoxEntry:
    interval: Interval
    lo_face: Face = field(default_factory=Face)
    hi_face: Face = field(default_factory=Face)


class Box:
    """Assignment of variable names to intervals with face metadata."""

    def __init__(self, entries: dict[str, BoxEntry]):
        self.entries = dict(entries)

    @classmethod
    def build(cls, spec: dict[str, tuple], precision: int) -> "Box":
        """spec: name -> (lo, hi) or (lo, hi, lo_face, hi_face);
        endpoints may be Fractions, floats, or Expr constants."""
        entries = {}
        for name, parts in spec.items():
            lo, hi = parts[0], parts[1]
            lo_face = parts[2] if len(parts) > 2 else Face()
            hi_face = parts[3] if len(parts) > 3 else Face()
            lo_iv = _endpoint_interval(lo, precision)
            hi_iv = _endpoint_interval(hi, precision)
            ctx = context(precision)
            iv = Interval(ctx.mpf([lo_iv.lo, hi_iv.hi]), precision)
            if lo_face.exact is None:
                lo_face = Face(lo_face.open, _endpoint_exact(lo))
            if hi_face.exact is None:
                hi_face = Face(hi_face.open, _endpoint_exact(hi))
            entries[name] = BoxEntry(iv, lo_face, hi_face)
        return cls(entries)

    def __getitem__(self, name: str) -> BoxEntry:
        return self.entries[name]

    def names(self) -> list[str]:
        return list(self.entries)

    def intervals(self) -> dict[str, Interval]:
        return {k: v.interval for k, v in self.entries.items()}

    def widest(self) -> str:
        return max(self.entries, key=lambda k: self.entries[k].interval.width)

    def split(self, name: str | None = None) -> tuple["Box", "Box"]:
        """Bisect along `name` (default: the widest variable).  The new interior
        faces are closed and carry no exact endpoint."""
        if name is None:
            name = self.widest()
        entry = self.entries[name]
        left_iv, right_iv = entry.interval.split()
        left = dict(self.entries)
        right = dict(self.entries)
        left[name] = BoxEntry(left_iv, entry.lo_face, Face())
        right[name] = BoxEntry(right_iv, Face(), entry.hi_face)
        return Box(left), Box(right)

    def __str__(self) -> str:
        parts = [f"{k}={v.interval}" for k, v in self.entries.items()]
        return "{" + ", ".join(parts) + "}"


def _endpoint_interval(v, precision: int) -> Interval:
    if isinstance(v, Interval):
        return v
    if isinstance(v, Expr):
        return iv_eval(v, None, precision)
    if isinstance(v, (int, Fraction)):
        return Interval.from_fraction(Fraction(v), precision)
    ctx = context(precision)
    return Interval(ctx.mpf(v), precision)


def _endpoint_exact(v) -> Sqrt2Value | None:
    if isinstance(v, (int, Fraction)):
        return Sqrt2Value(Fraction(v), Fraction(0))
    if isinstance(v, Expr):
        try:
            return exact_eval(v)
        except (NotInField, ZeroDivisionError):
            return None
    return None


def iv_eval(e: Expr, box: Box | dict[str, Interval] | None, precision: int) -> Interval:
    """Outward-rounded interval evaluation; contains the true range over the box."""
    ctx = context(precision)
    if box is None:
        env: dict[str, Interval] = {}
    elif isinstance(box, Box):
        env = box.intervals()
    else:
        env = box

    def go(node: Expr):
        match node:
            case Rat(v):
                return ctx.mpf(v.numerator) / ctx.mpf(v.denominator)
            case Var(name):
                try:
                    return env[name].ivalue
                except KeyError:
                    raise IntervalError(f"unbound variable {name}")
            case Neg(arg):
                return -go(arg)
            case Add(l, r):
                return go(l) + go(r)
            case Sub(l, r):
                return go(l) - go(r)
            case Mul(l, r):
                return go(l) * go(r)
            case Div(l, r):
                den = go(r)
                if den.a <= 0 <= den.b:
                    raise DivisionByZeroInterval(
                        f"denominator {_expr.print_expr(r)} contains zero"
                    )
                return go(l) / den
            case Pow(base, n):
                b = go(base)
                if n < 0:
                    if b.a <= 0 <= b.b:
                        raise DivisionByZeroInterval(
                            f"negative power of zero-containing {_expr.print_expr(base)}"
                        )
                    return (ctx.one / b) ** (-n)
                return b ** n
            case Sqrt(arg):
                v = go(arg)
                if v.a < 0:
                    raise NegativeRadicand(
                        f"radicand {_expr.print_expr(arg)} reaches below zero"
                    )
                return ctx.sqrt(v)
        raise IntervalError(f"unknown node {node!r}")

    return Interval(go(e), precision)


def point_interval(value, precision: int) -> Interval:
    """Degenerate interval at a float or mpf value."""
    ctx = context(precision)
    return Interval(ctx.mpf(value), precision)
