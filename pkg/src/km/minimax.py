"""Inf-of-max solvers for displacement-function families over open simplices.

Two routes are provided and cross-checked: multi-start Nelder-Mead descent on a
chart of the simplex, and closed-form equalization (all family members take a
common value at the optimizer, which pins it down via symmetry and a quadratic).
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .dispfuncs import (
    DisplacementFunction,
    FamilyEvaluator,
    Reduced2DFunction,
    preset_functions,
    reduced2d_embedding,
)

CLAMP_EPS = 1e-12
SQRT2 = math.sqrt(2.0)

LOG3_VALUE = 9.0
DAGGER_VALUE = 5.0 + 3.0 * SQRT2


class MinimaxError(ValueError):
    pass


@dataclass(frozen=True)
class MinimaxProblem:
    functions: tuple[DisplacementFunction, ...]
    n_coords: int

    def __post_init__(self):
        if not self.functions:
            raise MinimaxError("empty function family")
        if any(f.n_coords != self.n_coords for f in self.functions):
            raise MinimaxError("family members disagree on dimension")

    @classmethod
    def preset(cls, name: str) -> "MinimaxProblem":
        if name == "log3":
            fns = preset_functions("log3")
        elif name == "dagger":
            fns = preset_functions("dagger-f")
        else:
            raise MinimaxError(f"no minimax preset named {name!r}")
        return cls(tuple(fns), fns[0].n_coords)


@dataclass(frozen=True)
class MinimaxCertificate:
    value: float
    point: tuple[float, ...]
    equalization_residual: float
    probe_margin: float
    method: str
    iterations: int
    boundary_escape: bool = False
    exact_value: str | None = None
    exact_point: tuple[str, ...] | None = None

    @property
    def accepted(self) -> bool:
        return self.probe_margin >= 0.0 and not self.boundary_escape

    def to_json(self) -> dict:
        data = {
            "value": self.value,
            "point": list(self.point),
            "equalization_residual": self.equalization_residual,
            "probe_margin": self.probe_margin,
            "method": self.method,
            "iterations": self.iterations,
            "boundary_escape": self.boundary_escape,
        }
        if self.exact_value is not None:
            data["exact_value"] = self.exact_value
        if self.exact_point is not None:
            data["exact_point"] = list(self.exact_point)
        return data


def clamp_to_simplex(x: np.ndarray) -> np.ndarray:
    y = np.clip(x, CLAMP_EPS, 1.0 - CLAMP_EPS)
    return y / y.sum()


def _chart_objective(ev: FamilyEvaluator, y: np.ndarray) -> float:
    full = np.empty(ev.n_coords)
    full[:-1] = y
    full[-1] = 1.0 - y.sum()
    return ev.max_value(clamp_to_simplex(full))


def _nm_sweep(objective, y: np.ndarray, edge: float, maxiter: int,
              xatol: float, adaptive: bool) -> tuple[float, np.ndarray, int]:
    simplex = np.repeat(y[None, :], len(y) + 1, axis=0)
    for k in range(len(y)):
        simplex[k + 1, k] += edge
    res = minimize(
        objective,
        y,
        method="Nelder-Mead",
        options={
            "xatol": xatol,
            "fatol": 1e-15,
            "maxiter": maxiter,
            "initial_simplex": simplex,
            "adaptive": adaptive,
        },
    )
    return float(res.fun), res.x, int(res.nit)


def _full_point(y: np.ndarray) -> np.ndarray:
    z = np.empty(len(y) + 1)
    z[:-1] = y
    z[-1] = 1.0 - y.sum()
    return clamp_to_simplex(z)


def _run_restart(args) -> tuple[float, np.ndarray, int]:
    """One coarse Nelder-Mead run from a random interior start."""
    functions, start, maxiter = args
    ev = FamilyEvaluator(list(functions))
    y = np.asarray(start[:-1])
    val, y, nit = _nm_sweep(lambda z: _chart_objective(ev, z), y,
                            edge=0.05, maxiter=maxiter, xatol=1e-7,
                            adaptive=ev.n_coords > 4)
    return val, _full_point(y), nit


def _polish(ev: FamilyEvaluator, point: np.ndarray, maxiter: int) -> tuple[float, np.ndarray, int]:
    """Ladder of Nelder-Mead sweeps on log-sum-exp smoothings of the max.

    At an equalized optimum the max has a sharp polyhedral minimum whose descent
    cone is too thin for plain simplex reflections; minimizing the smoothings
    max + log(sum exp(p (f - max)))/p for growing p tracks the optimizer with
    O(1/p) bias and leaves the final evaluation to the true max.
    """
    y = np.asarray(point[:-1])
    best = _chart_objective(ev, y)
    total = 0

    def smoothed(z: np.ndarray, p: float) -> float:
        v = ev.values(_full_point(z))
        m = v.max()
        return m + np.log(np.exp(p * (v - m)).sum()) / p

    for p in (1e2, 1e3, 1e4, 1e5, 1e6, 1e7, 1e8, 1e9, 1e10, 1e11):
        edge = max(2.0 / p, 1e-10)
        _, y2, nit = _nm_sweep(lambda z: smoothed(z, p), y, edge, maxiter,
                               xatol=max(0.01 / p, 1e-12),
                               adaptive=ev.n_coords > 4)
        total += nit
        val = _chart_objective(ev, y2)
        if val < best:
            best, y = val, y2
    return best, _full_point(y), total


def solve_direct(problem: MinimaxProblem, restarts: int = 64, seed: int = 42,
                 tol: float = 1e-10, maxiter: int | None = None,
                 jobs: int = 1, probe_directions: int = 1000) -> MinimaxCertificate:
    """Multi-start simplex-reflection descent on the chart dropping the last coordinate.

    Deterministic for a fixed seed: restart k draws its start from a child seed,
    and the best result is selected by (value, restart index).
    """
    if restarts < 1:
        raise MinimaxError("restarts must be at least 1")
    n = problem.n_coords
    if maxiter is None:
        maxiter = 2000 if n <= 4 else 3000
    rng = np.random.default_rng(seed)
    starts = [clamp_to_simplex(rng.dirichlet(np.ones(n))) for _ in range(restarts)]
    # include the barycenter as a deterministic anchor start
    starts[0] = np.full(n, 1.0 / n)

    tasks = [(problem.functions, s, maxiter) for s in starts]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_restart, tasks))
    else:
        results = [_run_restart(t) for t in tasks]

    best_idx = min(range(len(results)), key=lambda k: (results[k][0], k))
    value, point, iterations = results[best_idx]
    ev = FamilyEvaluator(list(problem.functions))
    value, point, polish_iter = _polish(ev, point, maxiter)
    return _certificate(problem, point, "direct", iterations + polish_iter, seed, tol,
                        probe_directions=probe_directions)


def _certificate(problem: MinimaxProblem, point: np.ndarray, method: str,
                 iterations: int, seed: int, tol: float,
                 probe_directions: int = 1000,
                 exact_value: str | None = None,
                 exact_point: tuple[str, ...] | None = None) -> MinimaxCertificate:
    ev = FamilyEvaluator(list(problem.functions))
    vals = ev.values(point)
    value = float(vals.max())
    residual = float(vals.max() - vals.min())
    boundary = bool(np.any(point <= 2 * CLAMP_EPS) or np.any(point >= 1 - 2 * CLAMP_EPS))
    margin = probe_margin(problem, point, directions=probe_directions, seed=seed + 1)
    return MinimaxCertificate(
        value=value,
        point=tuple(float(v) for v in point),
        equalization_residual=residual,
        probe_margin=margin,
        method=method,
        iterations=iterations,
        boundary_escape=boundary,
        exact_value=exact_value,
        exact_point=exact_point,
    )


def probe_margin(problem: MinimaxProblem, point, directions: int = 1000,
                 step: float = 1e-4, seed: int = 0) -> float:
    """Smallest increase of the family max over random tangent directions.

    Nonnegative margins back up local optimality; a negative margin means a
    descent direction was found (e.g. after a boundary escape).
    """
    ev = FamilyEvaluator(list(problem.functions))
    x = np.asarray(point, dtype=float)
    base = ev.max_value(x)
    rng = np.random.default_rng(seed)
    worst = np.inf
    for _ in range(directions):
        d = rng.normal(size=len(x))
        d -= d.mean()  # tangent to the sum-to-one constraint
        norm = np.linalg.norm(d)
        if norm < 1e-14:
            continue
        y = clamp_to_simplex(x + step * d / norm)
        worst = min(worst, ev.max_value(y) - base)
    return float(worst)


def verify_equal_locus(problem: MinimaxProblem, x, family: list[int] | None = None,
                       tol: float = 1e-9) -> tuple[bool, float]:
    """Whether the designated family members agree at x, up to tol * max value.

    `family` holds 1-based indices into the problem's function tuple.
    """
    ev = FamilyEvaluator(list(problem.functions))
    vals = ev.values(np.asarray(x, dtype=float))
    if family is not None:
        vals = vals[[i - 1 for i in family]]
    residual = float(vals.max() - vals.min())
    return residual <= tol * float(vals.max()), residual


def solve_equalize(preset: str) -> MinimaxCertificate:
    """Closed-form optimum via the symmetric reduction.

    log3: full symmetry forces the barycenter.  dagger: the symmetry maps force
    x1=x4=x7=x8 and x2=x3=x5=x6 with x1+x2=1/4, and equalizing the remaining
    two function values gives 4t^2 + 4t - 1 = 0, i.e. x1 = (sqrt(2)-1)/2.
    """
    if preset == "log3":
        problem = MinimaxProblem.preset("log3")
        point = np.full(4, 0.25)
        exact_pt = ("1/4",) * 4
        exact_val = "9"
    elif preset == "dagger":
        problem = MinimaxProblem.preset("dagger")
        # positive root of 1 - 4*x - 4*x^2 = 0
        x1 = (-1.0 + SQRT2) / 2.0
        x2 = 0.25 - x1
        point = np.array([x1, x2, x2, x1, x2, x2, x1, x1])
        exact_pt = ("(sqrt(2)-1)/2", "(3-2*sqrt(2))/4", "(3-2*sqrt(2))/4",
                    "(sqrt(2)-1)/2", "(3-2*sqrt(2))/4", "(3-2*sqrt(2))/4",
                    "(sqrt(2)-1)/2", "(sqrt(2)-1)/2")
        exact_val = "5+3*sqrt(2)"
    else:
        raise MinimaxError(f"no equalization preset named {preset!r}")
    return _certificate(problem, point, "equalize", 0, seed=0, tol=1e-12,
                        exact_value=exact_val, exact_point=exact_pt)


@dataclass(frozen=True)
class Reduced2DResult:
    t_star: float
    line_value: float
    full_min_point: tuple[float, float]
    full_min_value: float
    exact: dict = field(default_factory=dict)


def reduced2d_solve() -> Reduced2DResult:
    """Solve the planar reduction of the eight-function problem.

    On the critical line 4*x1 + 8*x2 = 1 of f7 the problem collapses to one
    variable; equalizing the two restricted functions gives 64t^2 + 36t - 1 = 0
    with positive root t* = (-9+sqrt(97))/32 and common value (17+2*sqrt(97))/3.
    The full two-variable optimum instead solves f1 = f7 (so x1 + x2 = 1/4) and
    f2 = f7, whose quadratic (1/4)x2^2 - (3/8)x2 + 1/64 = 0 has the admissible
    root x2 = (3-2*sqrt(2))/4; the common value there is 5+3*sqrt(2).
    """
    s97 = math.sqrt(97.0)
    t_star = (-9.0 + s97) / 32.0
    line_value = (17.0 + 2.0 * s97) / 3.0

    x2 = (3.0 - 2.0 * SQRT2) / 4.0
    x1 = 0.25 - x2
    f1, f2, f7 = preset_functions("reduced2d")
    vals = (f1((x1, x2)), f2((x1, x2)), f7((x1, x2)))
    value = max(vals)
    return Reduced2DResult(
        t_star=t_star,
        line_value=line_value,
        full_min_point=(x1, x2),
        full_min_value=value,
        exact={
            "t_star": "(-9+sqrt(97))/32",
            "line_value": "(17+2*sqrt(97))/3",
            "x1": "(sqrt(2)-1)/2",
            "x2": "(3-2*sqrt(2))/4",
            "value": "5+3*sqrt(2)",
        },
    )


@dataclass(frozen=True)
class DiscriminantReport:
    d1_at_log3_min: float
    d2_at_log3_min: float
    case_d_p2: float
    case_d_p3: float

    @property
    def log3_discriminants_vanish(self) -> bool:
        return abs(self.d1_at_log3_min) <= 1e-14 and abs(self.d2_at_log3_min) <= 1e-14

    @property
    def dagger_case_discriminants_positive(self) -> bool:
        return self.case_d_p2 > 0 and self.case_d_p3 > 0


def discriminant_report() -> DiscriminantReport:
    """Evaluate the equalization quadratics' discriminants at the known optima.

    The two quartic discriminants of the log3 problem vanish at the barycenter;
    the two pair-collapse quadratics of the eight-function problem have strictly
    positive discriminant D(t) = (1-a)^2 (1-t)^2 + 4 (1-a) t at the optimizer,
    where a is the optimal value and t sums the relevant four coordinates.
    """
    x = np.full(4, 0.25)

    def quartic(u, v):  # (1 - u - v)^4 - 4*u*v*(u + v)*(1 - u - v)
        s = u + v
        return (1 - s) ** 4 - 4 * u * v * s * (1 - s)

    d1 = quartic(x[1], x[2])  # variables x2, x3
    d2 = quartic(x[0], x[3])  # variables x1, x4

    a = DAGGER_VALUE
    xe = solve_equalize("dagger").point

    def D(t):
        return (1 - a) ** 2 * (1 - t) ** 2 + 4 * (1 - a) * t

    p2 = xe[3] + xe[4] + xe[5] + xe[6]  # x4+x5+x6+x7
    p3 = xe[0] + xe[1] + xe[2] + xe[7]  # x1+x2+x3+x8
    return DiscriminantReport(float(d1), float(d2), float(D(p2)), float(D(p3)))


def lower_bound_witness(x) -> float:
    """The two-cone sub-problem value at x under the coordinate grouping
    X = (x7, x8, x1+x2+x3, x4+x5+x6); its infimum over the image simplex is 9,
    which sandwiches the eight-function optimum from below."""
    x = np.asarray(x, dtype=float)
    X1, X2 = x[6], x[7]
    X3, X4 = x[0] + x[1] + x[2], x[3] + x[4] + x[5]
    f7 = (1 - X4) / X4 * (1 - X1) / X1
    f8 = (1 - X3) / X3 * (1 - X2) / X2
    return max(f7, f8)
