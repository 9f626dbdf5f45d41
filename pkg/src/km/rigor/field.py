"""Exact arithmetic in the quadratic field Q(sqrt(2)).

Values a + b*sqrt(2) with rational a, b support the ring operations exactly,
which is enough to decide equality of the algebraic endpoint constants
(5 + 3 sqrt(2) and friends) that interval arithmetic can only bracket.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .expr import Add, Div, Expr, Mul, Neg, Pow, Rat, Sqrt, Sub, Var


class NotInField(ValueError):
    """The expression leaves Q(sqrt(2)) (free variable or foreign radical)."""


@dataclass(frozen=True)
class Sqrt2Value:
    a: Fraction  # rational part
    b: Fraction  # coefficient of sqrt(2)

    def __add__(self, other: "Sqrt2Value") -> "Sqrt2Value":
        return Sqrt2Value(self.a + other.a, self.b + other.b)

    def __sub__(self, other: "Sqrt2Value") -> "Sqrt2Value":
        return Sqrt2Value(self.a - other.a, self.b - other.b)

    def __neg__(self) -> "Sqrt2Value":
        return Sqrt2Value(-self.a, -self.b)

    def __mul__(self, other: "Sqrt2Value") -> "Sqrt2Value":
        return Sqrt2Value(
            self.a * other.a + 2 * self.b * other.b,
            self.a * other.b + self.b * other.a,
        )

    def __truediv__(self, other: "Sqrt2Value") -> "Sqrt2Value":
        n = other.a * other.a - 2 * other.b * other.b  # field norm
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(sqrt(2))")
        inv = Sqrt2Value(other.a / n, -other.b / n)
        return self * inv

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def sign(self) -> int:
        """Exact sign of a + b*sqrt(2)."""
        if self.b == 0:
            return (self.a > 0) - (self.a < 0)
        if self.a == 0:
            return (self.b > 0) - (self.b < 0)
        # compare a with -b*sqrt(2): both sides squared, signs tracked
        if self.a > 0 and self.b > 0:
            return 1
        if self.a < 0 and self.b < 0:
            return -1
        lhs = self.a * self.a
        rhs = 2 * self.b * self.b
        if self.a > 0:  # b < 0: positive iff a^2 > 2 b^2
            return 1 if lhs > rhs else (-1 if lhs < rhs else 0)
        return -1 if lhs > rhs else (1 if lhs < rhs else 0)


ZERO = Sqrt2Value(Fraction(0), Fraction(0))
ONE = Sqrt2Value(Fraction(1), Fraction(0))
SQRT2 = Sqrt2Value(Fraction(0), Fraction(1))


def exact_eval(e: Expr, env: dict[str, "Sqrt2Value"] | None = None) -> Sqrt2Value:
    """Evaluate an expression exactly in Q(sqrt(2)), if it lives there.

    The only admissible radical is sqrt of a value that is a perfect square in
    the field (in particular sqrt(2) itself and squares); anything else raises
    NotInField.
    """
    env = env or {}
    match e:
        case Rat(v):
            return Sqrt2Value(v, Fraction(0))
        case Var(name):
            if name in env:
                return env[name]
            raise NotInField(f"unbound variable {name}")
        case Neg(arg):
            return -exact_eval(arg, env)
        case Add(l, r):
            return exact_eval(l, env) + exact_eval(r, env)
        case Sub(l, r):
            return exact_eval(l, env) - exact_eval(r, env)
        case Mul(l, r):
            return exact_eval(l, env) * exact_eval(r, env)
        case Div(l, r):
            return exact_eval(l, env) / exact_eval(r, env)
        case Pow(base, n):
            v = exact_eval(base, env)
            if n < 0:
                v = ONE / v
                n = -n
            out = ONE
            for _ in range(n):
                out = out * v
            return out
        case Sqrt(arg):
            v = exact_eval(arg, env)
            root = _field_sqrt(v)
            if root is None:
                raise NotInField(f"sqrt of {v} is not in Q(sqrt(2))")
            return root
    raise NotInField(f"unknown node {e!r}")


def _field_sqrt(v: Sqrt2Value) -> Sqrt2Value | None:
    """Square root inside Q(sqrt(2)) when one exists (e.g. sqrt(2), squares)."""
    if v.is_zero():
        return ZERO
    if v.sign() < 0:
        return None
    if v == Sqrt2Value(Fraction(2), Fraction(0)):
        return SQRT2
    # try (p + q sqrt2)^2 = v: p^2 + 2q^2 = a, 2pq = b
    # solve via rational candidates from the norm
    a, b = v.a, v.b
    #  p^2 is a root of t^2 - a t + b^2/2 = 0
    disc = a * a - 2 * b * b
    root = _rational_sqrt(disc)
    if root is None:
        return None
    for p2 in ((a + root) / 2, (a - root) / 2):
        p = _rational_sqrt(p2)
        if p is None or p == 0:
            continue
        q = b / (2 * p)
        cand = Sqrt2Value(p, q)
        if cand * cand == v and cand.sign() > 0:
            return cand
        cand = -cand
        if cand * cand == v and cand.sign() > 0:
            return cand
    if b == 0:
        p = _rational_sqrt(a)
        if p is not None:
            return Sqrt2Value(p, Fraction(0))
    return None


def _rational_sqrt(v: Fraction) -> Fraction | None:
    if v < 0:
        return None
    num = _int_sqrt(v.numerator)
    den = _int_sqrt(v.denominator)
    if num is None or den is None:
        return None
    return Fraction(num, den)


def _int_sqrt(n: int) -> int | None:
    if n < 0:
        return None
    r = int(n**0.5)
    for cand in (r - 1, r, r + 1):
        if cand >= 0 and cand * cand == n:
            return cand
    return None
