"""Adaptive-bisection certificates for inequalities over boxes.

Three sound mechanisms cooperate:

* outward-rounded interval evaluation on a leaf box;
* structural sign rules (products and quotients of certified-positive factors,
  sums of certified-nonnegative addends, even powers, square-root transfer
  A > B  <=  A^2 - B^2 ... realized as  u - B^2 > 0  for A = sqrt(u), and the
  face rule: an affine factor (C - v) is positive on a box whose v-face sits
  exactly at C and is excluded from the domain);
* bisection, splitting the widest variable when a leaf stays inconclusive.

Evaluation failures (zero-containing denominators, negative radicands) mark a
box undecided and trigger a split; they never prove anything.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .expr import Add, Div, Expr, Mul, Neg, Pow, Rat, Sqrt, Sub, Var, print_expr
from .field import NotInField, Sqrt2Value, exact_eval
from .interval import (
    Box,
    BoxEntry,
    Face,
    Interval,
    IntervalError,
    default_precision,
    iv_eval,
)

PROVEN = "proven"
UNDECIDED = "undecided"

DEFAULT_MAX_DEPTH = 30


@dataclass
class Certificate:
    statement_id: str
    status: str
    boxes_examined: int = 0
    max_depth_reached: int = 0
    precision_bits: int = 0
    witness: Box | None = None
    detail: str = ""

    @property
    def proven(self) -> bool:
        return self.status == PROVEN

    def to_json(self) -> dict:
        data = {
            "statement_id": self.statement_id,
            "status": self.status,
            "boxes_examined": self.boxes_examined,
            "max_depth_reached": self.max_depth_reached,
            "precision_bits": self.precision_bits,
        }
        if self.detail:
            data["detail"] = self.detail
        if self.witness is not None:
            data["witness"] = str(self.witness)
        return data


@dataclass
class _Stats:
    boxes: int = 0
    depth: int = 0


def _safe_iv(e: Expr, box: Box, precision: int) -> Interval | None:
    try:
        return iv_eval(e, box, precision)
    except IntervalError:
        return None


def _match_constant(e: Expr) -> Sqrt2Value | None:
    try:
        return exact_eval(e)
    except (NotInField, ZeroDivisionError):
        return None


def _face_sign(e: Expr, box: Box) -> tuple[bool, bool] | None:
    """Face rule: (nonnegative, strict) for expressions pinned by a box face.

    Handles Var(v), C - v, and v - C where C matches the exact endpoint of the
    corresponding face.  Strict when the face is open (excluded from the
    domain); nonnegative when it is closed.
    """
    name = None
    against_hi = None
    exact_c: Sqrt2Value | None = None
    match e:
        case Var(n):
            name, against_hi = n, False
            exact_c = Sqrt2Value(Fraction(0), Fraction(0))
        case Sub(c_expr, Var(n)) if _match_constant(c_expr) is not None:
            name, against_hi = n, True
            exact_c = _match_constant(c_expr)
        case Sub(Var(n), c_expr) if _match_constant(c_expr) is not None:
            name, against_hi = n, False
            exact_c = _match_constant(c_expr)
        case _:
            return None
    if name not in box.entries:
        return None
    entry = box.entries[name]
    face = entry.hi_face if against_hi else entry.lo_face
    if face.exact is None or exact_c is None:
        return None
    if face.exact != exact_c:
        return None
    return True, face.open


def _addends(e: Expr) -> list[Expr]:
    match e:
        case Add(l, r):
            return _addends(l) + _addends(r)
        case _:
            return [e]


def _prove_sign(e: Expr, box: Box, strict: bool, depth: int, precision: int,
                stats: _Stats, current_depth: int = 0) -> bool:
    """Soundly prove e > 0 (strict) or e >= 0 over box intersected with the
    open faces recorded in the box."""
    stats.boxes += 1
    stats.depth = max(stats.depth, current_depth)

    iv = _safe_iv(e, box, precision)
    if iv is not None:
        if strict and iv.strictly_positive():
            return True
        if not strict and iv.nonnegative():
            return True

    if _structural(e, box, strict, depth, precision, stats, current_depth):
        return True

    if current_depth < depth:
        name = box.widest()
        if box.entries[name].interval.width > 0:
            left, right = box.split(name)
            return (
                _prove_sign(e, left, strict, depth, precision, stats, current_depth + 1)
                and _prove_sign(e, right, strict, depth, precision, stats, current_depth + 1)
            )
    return False


def _structural(e: Expr, box: Box, strict: bool, depth: int, precision: int,
                stats: _Stats, current_depth: int) -> bool:
    face = _face_sign(e, box)
    if face is not None:
        nonneg, face_strict = face
        if nonneg and (not strict or face_strict):
            return True

    def sub(expr: Expr, want_strict: bool) -> bool:
        return _prove_sign(expr, box, want_strict, depth, precision, stats, current_depth)

    match e:
        case Mul(l, r):
            return sub(l, strict) and sub(r, strict)
        case Div(l, r):
            return sub(l, strict) and sub(r, True)
        case Add():
            parts = _addends(e)
            if not all(sub(p, False) for p in parts):
                return False
            if not strict:
                return True
            return any(sub(p, True) for p in parts)
        case Pow(base, n) if n > 0 and n % 2 == 0:
            if not strict:
                return True
            return sub(base, True) or _is_strictly_negative(base, box, precision)
        case Pow(base, n) if n > 0:
            return sub(base, strict)
        case Sqrt(arg):
            return sub(arg, strict)
        case Sub(Sqrt(u), b):
            # sqrt(u) > b  <=  u >= 0 and (u - b^2 > 0, giving sqrt(u) > |b|,
            # or b certifiably negative); both branches prove the strict claim
            if not sub(u, False):
                return False
            if _prove_sign(Sub(u, Pow(b, 2)), box, True, depth, precision, stats,
                           current_depth):
                return True
            bv = _safe_iv(b, box, precision)
            return bv is not None and bv.strictly_negative()
        case Sub(b, Sqrt(u)):
            # b > sqrt(u)  <=  b > 0 and b^2 - u > 0 and u defined
            return (
                sub(u, False)
                and sub(b, True)
                and _prove_sign(Sub(Pow(b, 2), u), box, True, depth, precision, stats,
                                current_depth)
            )
    return False


def _is_strictly_negative(e: Expr, box: Box, precision: int) -> bool:
    iv = _safe_iv(e, box, precision)
    return iv is not None and iv.strictly_negative()


def prove_positive(e: Expr, box: Box, strict: bool = True,
                   max_depth: int = DEFAULT_MAX_DEPTH,
                   precision: int | None = None,
                   statement_id: str = "") -> Certificate:
    precision = precision or default_precision()
    stats = _Stats()
    ok = _prove_sign(e, box, strict, max_depth, precision, stats)
    return Certificate(
        statement_id=statement_id or f"positive[{print_expr(e)[:40]}]",
        status=PROVEN if ok else UNDECIDED,
        boxes_examined=stats.boxes,
        max_depth_reached=stats.depth,
        precision_bits=precision,
        witness=None if ok else box,
    )


def certify_bound(e: Expr, box: Box, relation: str, bound: Expr,
                  max_depth: int = DEFAULT_MAX_DEPTH,
                  precision: int | None = None,
                  statement_id: str = "") -> Certificate:
    """Certify e < bound or e > bound strictly over the box."""
    if relation == "<":
        claim = Sub(bound, e)
    elif relation == ">":
        claim = Sub(e, bound)
    else:
        raise ValueError(f"relation must be '<' or '>', got {relation!r}")
    cert = prove_positive(claim, box, strict=True, max_depth=max_depth,
                          precision=precision, statement_id=statement_id)
    if not cert.statement_id:
        cert.statement_id = f"bound[{print_expr(e)[:30]} {relation} {print_expr(bound)[:30]}]"
    return cert


def certify_excludes(e: Expr, var: str, domain: Interval | tuple, value,
                     max_depth: int = DEFAULT_MAX_DEPTH,
                     precision: int | None = None,
                     statement_id: str = "") -> Certificate:
    """Certify that a univariate expression never takes `value` on the domain.

    Adaptive bisection: a leaf is settled once its evaluated interval is
    disjoint from the value's interval; evaluation errors leave the leaf
    undecided and split it further.
    """
    precision = precision or default_precision()
    if not isinstance(domain, Interval):
        domain = Interval.from_endpoints(domain[0], domain[1], precision)
    if isinstance(value, Expr):
        target = iv_eval(value, None, precision)
    elif isinstance(value, Interval):
        target = value
    else:
        target = Interval.from_fraction(Fraction(value), precision)

    boxes = 0
    max_reached = 0
    undecided: list[Interval] = []
    queue: list[tuple[Interval, int]] = [(domain, 0)]
    while queue:
        leaf, d = queue.pop()
        boxes += 1
        max_reached = max(max_reached, d)
        iv = None
        try:
            iv = iv_eval(e, {var: leaf}, precision)
        except IntervalError:
            pass
        if iv is not None and iv.disjoint_from(target):
            continue
        if d >= max_depth or not leaf.width > 0:
            undecided.append(leaf)
            continue
        left, right = leaf.split()
        queue.append((left, d + 1))
        queue.append((right, d + 1))

    witness = None
    if undecided:
        tightest = min(undecided, key=lambda s: s.width)
        witness = Box({var: BoxEntry(tightest, Face(), Face())})
    return Certificate(
        statement_id=statement_id or f"excludes[{print_expr(e)[:40]}]",
        status=UNDECIDED if undecided else PROVEN,
        boxes_examined=boxes,
        max_depth_reached=max_reached,
        precision_bits=precision,
        witness=witness,
        detail="" if not undecided else f"{len(undecided)} unresolved subintervals",
    )
