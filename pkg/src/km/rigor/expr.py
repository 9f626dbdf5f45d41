"""Algebraic expression trees and their ASCII grammar.

Grammar (whitespace free-form):
    expr     := term (("+" | "-") term)*
    term     := factor (("*" | "/") factor)*
    factor   := atom ("^" integer)?
    atom     := rational | decimal | identifier | "(" expr ")" | "sqrt" "(" expr ")"
    rational := integer "/" positive-integer

Decimals parse to exact rationals; a leading "-" on a term is accepted as
negation sugar and printed back the same way.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


class ExprError(ValueError):
    pass


class ParseError(ExprError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


@dataclass(frozen=True)
class Expr:
    def __add__(self, other):
        return Add(self, as_expr(other))

    def __radd__(self, other):
        return Add(as_expr(other), self)

    def __sub__(self, other):
        return Sub(self, as_expr(other))

    def __rsub__(self, other):
        return Sub(as_expr(other), self)

    def __mul__(self, other):
        return Mul(self, as_expr(other))

    def __rmul__(self, other):
        return Mul(as_expr(other), self)

    def __truediv__(self, other):
        return Div(self, as_expr(other))

    def __rtruediv__(self, other):
        return Div(as_expr(other), self)

    def __pow__(self, n: int):
        return Pow(self, int(n))

    def __neg__(self):
        return Neg(self)


@dataclass(frozen=True)
class Rat(Expr):
    value: Fraction

    def __post_init__(self):
        object.__setattr__(self, "value", Fraction(self.value))


@dataclass(frozen=True)
class Var(Expr):
    name: str


@dataclass(frozen=True)
class Neg(Expr):
    arg: Expr


@dataclass(frozen=True)
class Add(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Sub(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Mul(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Div(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    exponent: int

    def __post_init__(self):
        if not isinstance(self.exponent, int):
            raise ExprError("power exponents must be integers")


@dataclass(frozen=True)
class Sqrt(Expr):
    arg: Expr


def as_expr(v) -> Expr:
    if isinstance(v, Expr):
        return v
    if isinstance(v, (int, Fraction)):
        return Rat(Fraction(v))
    raise ExprError(f"cannot convert {v!r} to an expression")


def free_vars(e: Expr) -> frozenset[str]:
    match e:
        case Rat():
            return frozenset()
        case Var(name):
            return frozenset({name})
        case Neg(arg) | Sqrt(arg):
            return free_vars(arg)
        case Pow(base, _):
            return free_vars(base)
        case Add(l, r) | Sub(l, r) | Mul(l, r) | Div(l, r):
            return free_vars(l) | free_vars(r)
    raise ExprError(f"unknown node {e!r}")


# ---------------------------------------------------------------------------
# parsing


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, message: str) -> ParseError:
        return ParseError(message, self.pos)

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self, ch: str):
        if self.peek() != ch:
            raise self.error(f"expected {ch!r}")
        self.pos += 1

    def parse(self) -> Expr:
        e = self.expr()
        self.skip_ws()
        if self.pos != len(self.text):
            raise self.error("trailing input")
        return e

    def expr(self) -> Expr:
        negate = False
        if self.peek() == "-":
            self.pos += 1
            negate = True
        e = self.term()
        if negate:
            e = Neg(e)
        while True:
            ch = self.peek()
            if ch == "+":
                self.pos += 1
                e = Add(e, self.term())
            elif ch == "-":
                self.pos += 1
                e = Sub(e, self.term())
            else:
                return e

    def term(self) -> Expr:
        e = self.factor()
        while True:
            ch = self.peek()
            if ch == "*":
                self.pos += 1
                e = Mul(e, self.factor())
            elif ch == "/":
                self.pos += 1
                e = Div(e, self.factor())
            else:
                return e

    def factor(self) -> Expr:
        e = self.atom()
        if self.peek() == "^":
            self.pos += 1
            sign = 1
            if self.peek() == "-":
                self.pos += 1
                sign = -1
            digits = self.digits()
            return Pow(e, sign * int(digits))
        return e

    def atom(self) -> Expr:
        ch = self.peek()
        if ch == "(":
            self.take("(")
            e = self.expr()
            self.take(")")
            return e
        if ch.isdigit():
            return self.number()
        if ch.isalpha() or ch == "_":
            name = self.identifier()
            if name == "sqrt":
                self.take("(")
                e = self.expr()
                self.take(")")
                return Sqrt(e)
            return Var(name)
        raise self.error(f"unexpected character {ch!r}")

    def digits(self) -> str:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos == start:
            raise self.error("expected digits")
        return self.text[start:self.pos]

    def number(self) -> Expr:
        whole = self.digits()
        if self.pos < len(self.text) and self.text[self.pos] == ".":
            self.pos += 1
            frac = self.digits()
            value = Fraction(int(whole + frac), 10 ** len(frac))
            return Rat(value)
        return Rat(Fraction(int(whole)))

    def identifier(self) -> str:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and (self.text[self.pos].isalnum() or self.text[self.pos] == "_"):
            self.pos += 1
        return self.text[start:self.pos]


def parse_expr(text: str) -> Expr:
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# printing


def _fmt_rat(v: Fraction) -> str:
    if v.denominator == 1:
        return str(v.numerator)
    return f"{v.numerator}/{v.denominator}"


_PREC = {"add": 1, "mul": 2, "unary": 3, "pow": 4, "atom": 5}


def _print(e: Expr) -> tuple[str, int]:
    match e:
        case Rat(v):
            if v < 0:
                return f"-{_fmt_rat(-v)}", _PREC["unary"]
            return _fmt_rat(v), _PREC["atom"]
        case Var(name):
            return name, _PREC["atom"]
        case Neg(arg):
            s, p = _print(arg)
            if p < _PREC["unary"]:
                s = f"({s})"
            return f"-{s}", _PREC["unary"]
        case Add(l, r):
            ls, lp = _print(l)
            rs, rp = _print(r)
            if lp < _PREC["add"]:
                ls = f"({ls})"
            if rp <= _PREC["add"]:
                rs = f"({rs})"
            return f"{ls} + {rs}", _PREC["add"]
        case Sub(l, r):
            ls, lp = _print(l)
            rs, rp = _print(r)
            if lp < _PREC["add"]:
                ls = f"({ls})"
            if rp <= _PREC["add"]:
                rs = f"({rs})"
            return f"{ls} - {rs}", _PREC["add"]
        case Mul(l, r):
            ls, lp = _print(l)
            rs, rp = _print(r)
            if lp < _PREC["mul"]:
                ls = f"({ls})"
            if rp <= _PREC["mul"]:
                rs = f"({rs})"
            return f"{ls}*{rs}", _PREC["mul"]
        case Div(l, r):
            ls, lp = _print(l)
            rs, rp = _print(r)
            if lp < _PREC["mul"]:
                ls = f"({ls})"
            if rp <= _PREC["mul"]:
                rs = f"({rs})"
            return f"{ls}/{rs}", _PREC["mul"]
        case Pow(base, n):
            bs, bp = _print(base)
            if bp < _PREC["atom"]:
                bs = f"({bs})"
            if n < 0:
                return f"{bs}^-{-n}", _PREC["pow"]
            return f"{bs}^{n}", _PREC["pow"]
        case Sqrt(arg):
            s, _ = _print(arg)
            return f"sqrt({s})", _PREC["atom"]
    raise ExprError(f"unknown node {e!r}")


def print_expr(e: Expr) -> str:
    return _print(e)[0]


def substitute(e: Expr, bindings: dict[str, Expr]) -> Expr:
    match e:
        case Rat():
            return e
        case Var(name):
            return bindings.get(name, e)
        case Neg(arg):
            return Neg(substitute(arg, bindings))
        case Sqrt(arg):
            return Sqrt(substitute(arg, bindings))
        case Pow(base, n):
            return Pow(substitute(base, bindings), n)
        case Add(l, r):
            return Add(substitute(l, bindings), substitute(r, bindings))
        case Sub(l, r):
            return Sub(substitute(l, bindings), substitute(r, bindings))
        case Mul(l, r):
            return Mul(substitute(l, bindings), substitute(r, bindings))
        case Div(l, r):
            return Div(substitute(l, bindings), substitute(r, bindings))
    raise ExprError(f"unknown node {e!r}")


def eval_float(e: Expr, env: dict[str, float]) -> float:
    """Plain floating evaluation, for tests and quick numerics."""
    import math

    match e:
        case Rat(v):
            return float(v)
        case Var(name):
            return env[name]
        case Neg(arg):
            return -eval_float(arg, env)
        case Sqrt(arg):
            return math.sqrt(eval_float(arg, env))
        case Pow(base, n):
            return eval_float(base, env) ** n
        case Add(l, r):
            return eval_float(l, env) + eval_float(r, env)
        case Sub(l, r):
            return eval_float(l, env) - eval_float(r, env)
        case Mul(l, r):
            return eval_float(l, env) * eval_float(r, env)
        case Div(l, r):
            return eval_float(l, env) / eval_float(r, env)
    raise ExprError(f"unknown node {e!r}")
