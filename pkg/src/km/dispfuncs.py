"""Displacement functions on open simplices.

Each function is the product of two cone factors sigma(t) = (1-t)/t evaluated
at subset sums of the simplex coordinates; subsets are stored structurally so
that symbolic equality, symmetry checks, and certification hand-offs are exact.
Coordinate indices are 1-based throughout, matching the printed formulas.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .words import Decomposition, RelationIdentity, format_word

SIGMA = "sigma"
INV_SIGMA = "inv"

SIMPLEX_SUM_TOL = 1e-12
DEGENERACY_EPS = 1e-12


class DomainError(ValueError):
    pass


class DimensionMismatch(DomainError):
    pass


def check_simplex_point(x, n_coords: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (n_coords,):
        raise DimensionMismatch(f"expected {n_coords} coordinates, got shape {x.shape}")
    if abs(x.sum() - 1.0) > SIMPLEX_SUM_TOL:
        raise DomainError(f"coordinates sum to {x.sum()!r}, not 1")
    if np.any(x <= DEGENERACY_EPS) or np.any(x >= 1.0 - DEGENERACY_EPS):
        raise DomainError("point is on or beyond the simplex boundary")
    return x


def sigma(t: float) -> float:
    return (1.0 - t) / t


@dataclass(frozen=True)
class ConeFactor:
    """sigma of a subset sum, or its reciprocal."""

    indices: frozenset[int]
    orientation: str = SIGMA

    def __post_init__(self):
        if not self.indices:
            raise DomainError("cone factor needs a nonempty index set")
        if self.orientation not in (SIGMA, INV_SIGMA):
            raise DomainError(f"unknown orientation {self.orientation!r}")
        object.__setattr__(self, "indices", frozenset(int(i) for i in self.indices))

    def subset_sum(self, x: np.ndarray) -> float:
        return float(sum(x[i - 1] for i in self.indices))

    def value(self, x: np.ndarray) -> float:
        t = self.subset_sum(x)
        if t <= DEGENERACY_EPS or t >= 1.0 - DEGENERACY_EPS:
            raise DomainError(f"subset sum {t!r} is degenerate")
        return sigma(t) if self.orientation == SIGMA else 1.0 / sigma(t)

    def to_json(self) -> dict:
        return {"indices": sorted(self.indices), "orientation": self.orientation}


@dataclass(frozen=True)
class DisplacementFunction:
    label: str
    factors: tuple[ConeFactor, ConeFactor]
    n_coords: int

    def __post_init__(self):
        for f in self.factors:
            if max(f.indices) > self.n_coords or min(f.indices) < 1:
                raise DomainError(f"factor indices {sorted(f.indices)} out of range")

    def factor_set(self) -> frozenset[tuple[frozenset[int], str]]:
        """Structural fingerprint: unordered pair of (indices, orientation)."""
        return frozenset((f.indices, f.orientation) for f in self.factors)

    def __call__(self, x) -> float:
        return evaluate(self, x)

    def to_json(self) -> dict:
        return {"label": self.label, "factors": [f.to_json() for f in self.factors]}


def function_from_json(data: dict, n_coords: int) -> DisplacementFunction:
    factors = tuple(
        ConeFactor(frozenset(f["indices"]), f["orientation"]) for f in data["factors"]
    )
    return DisplacementFunction(data["label"], factors, n_coords)


def evaluate(f: DisplacementFunction, x) -> float:
    x = check_simplex_point(x, f.n_coords)
    return f.factors[0].value(x) * f.factors[1].value(x)


def grad(f: DisplacementFunction, x, drop: int) -> np.ndarray:
    """Gradient of f composed with the chart eliminating coordinate `drop`.

    The chart substitutes x_drop = 1 - sum(others); the returned vector is
    indexed by the free coordinates in increasing order.
    """
    x = check_simplex_point(x, f.n_coords)
    if not 1 <= drop <= f.n_coords:
        raise DomainError(f"drop coordinate {drop} out of range")
    free = [i for i in range(1, f.n_coords + 1) if i != drop]

    vals = []
    derivs = []  # derivative of the factor value w.r.t. its subset sum
    sums = []
    for fac in f.factors:
        t = fac.subset_sum(x)
        vals.append(fac.value(x))
        if fac.orientation == SIGMA:
            derivs.append(-1.0 / t**2)
        else:
            derivs.append(1.0 / (1.0 - t) ** 2)
        sums.append(t)

    out = np.zeros(len(free))
    for k, fac in enumerate(f.factors):
        other = vals[1 - k]
        if drop in fac.indices:
            # t = 1 - sum of free coordinates outside the subset
            for m, i in enumerate(free):
                if i not in fac.indices:
                    out[m] += derivs[k] * (-1.0) * other
        else:
            for m, i in enumerate(free):
                if i in fac.indices:
                    out[m] += derivs[k] * other
    return out


@dataclass(frozen=True)
class SymmetryMap:
    """Coordinate permutation; (T x)_i = x_{perm[i]} with 1-based entries."""

    name: str
    perm: tuple[int, ...]

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (len(self.perm),):
            raise DimensionMismatch(f"expected {len(self.perm)} coordinates")
        return x[[p - 1 for p in self.perm]]

    def is_involution(self) -> bool:
        return all(self.perm[self.perm[i - 1] - 1] == i for i in range(1, len(self.perm) + 1))


T1_LOG3 = SymmetryMap("T1_log3", (4, 3, 2, 1))
T2_LOG3 = SymmetryMap("T2_log3", (2, 1, 4, 3))
T1_DAGGER = SymmetryMap("T1_dagger", (4, 5, 6, 1, 2, 3, 8, 7))
T2_DAGGER = SymmetryMap("T2_dagger", (1, 3, 2, 4, 5, 6, 7, 8))

# Coordinate pairs intertwined by T1_dagger: f_i o T1 = f_j for (i, j) below.
# (The claimed pairing (3,5),(2,6) found alongside the map's definition does not
# hold identically; the pairing here is forced by the printed formulas and the
# involution property, and is verified by the symmetry tests.)
T1_DAGGER_PAIRS = ((1, 4), (4, 1), (2, 5), (5, 2), (3, 6), (6, 3), (7, 8), (8, 7))


def apply_symmetry(T: SymmetryMap, x) -> np.ndarray:
    return T(x)


# Frozen index bijections: decomposition word (ASCII form) -> coordinate index.
# The dagger table is reconstructed by constraint matching against the printed
# formulas (see reconstruct_index_bijection and its test); up to the global
# letter symmetry it is one of exactly two solutions.
SIGMA_LOG3 = {"A": 1, "b": 2, "B": 3, "a": 4}
SIGMA_DAGGER = {"ab": 1, "aa": 2, "aB": 3, "BA": 4, "BB": 5, "Ba": 6, "b": 7, "A": 8}


def from_relation(rel: RelationIdentity, sig: dict[str, int], n_coords: int,
                  dec: Decomposition, label: str | None = None) -> DisplacementFunction:
    """Displacement function ((1-S)(1-x_s)) / (S * x_s) built from a relation.

    `S` is the sum of coordinates indexed by the excluded prefixes; residue
    members of the excluded set are dropped (their orbit measures vanish).
    """
    if len(set(sig.values())) != len(sig):
        raise DomainError("index bijection is not injective")
    excl = rel.excluded_prefixes(dec)
    if not excl:
        raise DomainError("relation excludes no prefixes; no function to build")
    subset = frozenset(sig[w] for w in excl)
    source_idx = sig[rel.source]
    factors = (ConeFactor(subset, SIGMA), ConeFactor(frozenset({source_idx}), SIGMA))
    return DisplacementFunction(label or f"rel[{format_word(rel.gamma)}]", factors, n_coords)


def _df(label, a, b, n):
    return DisplacementFunction(label, (ConeFactor(frozenset(a)), ConeFactor(frozenset(b))), n)


def log3_functions() -> list[DisplacementFunction]:
    return [
        _df("f1", {4}, {1}, 4),
        _df("f2", {3}, {2}, 4),
        _df("f3", {2}, {3}, 4),
        _df("f4", {1}, {4}, 4),
    ]


I1 = frozenset({1, 2, 3})
I2 = frozenset({4, 5, 6})
I3 = frozenset({7, 8})


def dagger_f_functions() -> list[DisplacementFunction]:
    return [
        _df("f1", I2, {1}, 8),
        _df("f2", I2 | I3, {2}, 8),
        _df("f3", I1 | I3, {3}, 8),
        _df("f4", I1, {4}, 8),
        _df("f5", I1 | I3, {5}, 8),
        _df("f6", I2 | I3, {6}, 8),
        _df("f7", I2, {7}, 8),
        _df("f8", I1, {8}, 8),
    ]


def dagger_g_functions() -> list[DisplacementFunction]:
    # g_i pairs sigma(x_i) with sigma over every other coordinate; on the
    # simplex the first factor equals the reciprocal of sigma(x_k) for the
    # single missing index k, which normalizes g_i to 1 at the equalized point.
    missing = {1: 7, 2: 6, 3: 5, 4: 8, 5: 3, 6: 2}
    out = []
    for i, k in missing.items():
        subset = frozenset(range(1, 9)) - {k}
        out.append(_df(f"g{i}", subset, {i}, 8))
    return out


@dataclass(frozen=True)
class Reduced2DFunction:
    """One of the three two-variable restrictions used by the planar reduction.

    The domain is {(x1, x2): 0 < x1 < 1/2, 0 < x2 < (1/2 - x1)/2}, the image of
    the symmetric subspace x1=x4, x2=x3=x5=x6, x7=x8 of the 7-simplex.
    """

    label: str

    def __call__(self, p) -> float:
        x1, x2 = float(p[0]), float(p[1])
        t = x1 + 2.0 * x2
        if not (0 < x1 and 0 < x2 and t < 0.5):
            raise DomainError(f"({x1}, {x2}) outside the reduced domain")
        if self.label == "f1":
            return sigma(t) * sigma(x1)
        if self.label == "f2":
            return sigma(x2) / sigma(t)
        if self.label == "f7":
            return sigma(t) * sigma(0.5 - t)
        raise DomainError(f"unknown reduced function {self.label!r}")


def reduced2d_functions() -> list[Reduced2DFunction]:
    return [Reduced2DFunction("f1"), Reduced2DFunction("f2"), Reduced2DFunction("f7")]


def reduced2d_embedding(p) -> np.ndarray:
    """Embed (x1, x2) into the 7-simplex as (x1,x2,x2,x1,x2,x2,t,t)."""
    x1, x2 = float(p[0]), float(p[1])
    t = 0.5 - x1 - 2.0 * x2
    return np.array([x1, x2, x2, x1, x2, x2, t, t])


def preset_functions(preset: str):
    table = {
        "log3": log3_functions,
        "dagger-f": dagger_f_functions,
        "dagger-g": dagger_g_functions,
        "reduced2d": reduced2d_functions,
    }
    try:
        return table[preset]()
    except KeyError:
        raise DomainError(f"unknown preset {preset!r}; expected one of {sorted(table)}")


def reconstruct_index_bijection(relations, dec: Decomposition,
                                targets) -> list[dict[str, int]]:
    """All bijections word->index making the relation-derived functions match.

    `targets` is a collection of DisplacementFunctions (the printed formulas);
    only relations whose excluded prefix count matches some target subset size
    participate.  Exhaustive search over assignments; returns every solution.
    """
    target_set = sorted(
        (tuple(sorted(_large_factor(t).indices)), _single_index(t)) for t in targets
    )
    usable = [r for r in relations
              if len(r.excluded_prefixes(dec)) in {len(s) for s, _ in target_set}]
    n = len(dec.prefixes)
    solutions = []
    for perm in itertools.permutations(range(1, n + 1)):
        sig = dict(zip(dec.prefixes, perm))
        derived = sorted(
            (tuple(sorted(sig[w] for w in r.excluded_prefixes(dec))), sig[r.source])
            for r in usable
        )
        if derived == target_set:
            solutions.append(sig)
    return solutions


def _large_factor(f: DisplacementFunction) -> ConeFactor:
    return max(f.factors, key=lambda fac: len(fac.indices))


def _single_index(f: DisplacementFunction) -> int:
    fac = min(f.factors, key=lambda fac: len(fac.indices))
    return next(iter(fac.indices))


class FamilyEvaluator:
    """Vectorized evaluation of a family of displacement functions."""

    def __init__(self, functions: list[DisplacementFunction]):
        if not functions:
            raise DomainError("empty family")
        n = functions[0].n_coords
        if any(f.n_coords != n for f in functions):
            raise DimensionMismatch("family members disagree on dimension")
        self.functions = list(functions)
        self.n_coords = n
        rows = []
        invs = []
        for f in functions:
            for fac in f.factors:
                row = np.zeros(n)
                row[[i - 1 for i in fac.indices]] = 1.0
                rows.append(row)
                invs.append(fac.orientation == INV_SIGMA)
        self._M = np.array(rows)
        self._inv = np.array(invs)

    def values(self, x: np.ndarray) -> np.ndarray:
        t = self._M @ x
        v = (1.0 - t) / t
        v[self._inv] = 1.0 / v[self._inv]
        return v[0::2] * v[1::2]

    def max_value(self, x: np.ndarray) -> float:
        return float(self.values(x).max())
