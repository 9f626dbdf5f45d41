"""Upper half-space model of hyperbolic 3-space.

Points are (x, y, t) with t > 0; orientation-preserving isometries act as
2x2 complex matrices of determinant 1 through the Poincare extension.  The
module covers distances, the boundary expansion factor (Poisson kernel), the
displacement bound in terms of measure masses, the spherical-cap integral of
the squared expansion factor, the hyperbolic law of cosines, and a sampling
probe for two-generator Schottky groups.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

HALF_LOG_ALPHA_DAGGER = 0.5 * math.log(5.0 + 3.0 * math.sqrt(2.0))  # ~1.1119439


class GeometryError(ValueError):
    pass


@dataclass(frozen=True)
class Point3:
    x: float
    y: float
    t: float

    def __post_init__(self):
        if not self.t > 0:
            raise GeometryError(f"height must be positive, got {self.t}")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.t])


ORIGIN = Point3(0.0, 0.0, 1.0)


def dist(z: Point3, w: Point3) -> float:
    """Hyperbolic distance: cosh d = 1 + (|dx|^2 + (t-t')^2) / (2 t t')."""
    dx = z.x - w.x
    dy = z.y - w.y
    dt = z.t - w.t
    c = 1.0 + (dx * dx + dy * dy + dt * dt) / (2.0 * z.t * w.t)
    return math.acosh(max(c, 1.0))


@dataclass(frozen=True)
class MoebiusMap:
    """Element of PSL(2, C); entries are normalized to determinant 1."""

    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        det = self.a * self.d - self.b * self.c
        if det == 0:
            raise GeometryError("degenerate matrix")
        s = cmath.sqrt(det)
        object.__setattr__(self, "a", self.a / s)
        object.__setattr__(self, "b", self.b / s)
        object.__setattr__(self, "c", self.c / s)
        object.__setattr__(self, "d", self.d / s)

    @classmethod
    def identity(cls) -> "MoebiusMap":
        return cls(1, 0, 0, 1)

    @classmethod
    def axis_translation(cls, length: float) -> "MoebiusMap":
        """Translation by `length` along the vertical axis through the origin."""
        e = math.exp(length / 2.0)
        return cls(e, 0, 0, 1.0 / e)

    def inverse(self) -> "MoebiusMap":
        return MoebiusMap(self.d, -self.b, -self.c, self.a)

    def compose(self, other: "MoebiusMap") -> "MoebiusMap":
        return MoebiusMap(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def boundary(self, z: complex) -> complex:
        return (self.a * z + self.b) / (self.c * z + self.d)

    def to_json(self) -> dict:
        return {k: [getattr(self, k).real, getattr(self, k).imag] for k in "abcd"}


def apply(g: MoebiusMap, z: Point3) -> Point3:
    """Poincare extension of g acting on the upper half space."""
    zc = complex(z.x, z.y)
    t = z.t
    den = abs(g.c * zc + g.d) ** 2 + abs(g.c) ** 2 * t * t
    w = ((g.a * zc + g.b) * (g.c * zc + g.d).conjugate() + g.a * g.c.conjugate() * t * t) / den
    return Point3(w.real, w.imag, t / den)


@dataclass(frozen=True)
class BoundaryDir:
    """Direction to the sphere at infinity, in a frame anchored at a base point.

    phi is the polar angle measured from the reference ray (the ray toward the
    second point of the Poisson kernel); theta the azimuth about it.  Keeping
    directions frame-relative feeds the kernel exactly the angle it consumes
    and avoids chart singularities at infinity.
    """

    phi: float
    theta: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.phi <= math.pi:
            raise GeometryError(f"polar angle {self.phi} outside [0, pi]")
        if not 0.0 <= self.theta < 2.0 * math.pi:
            raise GeometryError(f"azimuth {self.theta} outside [0, 2 pi)")


def poisson(z: Point3, zp: Point3, direction: BoundaryDir) -> float:
    """Poisson kernel 1 / (cosh d - sinh d cos phi), d = dist(z, zp).

    phi is the angle at z between the ray to zp and the ray to the boundary
    direction.
    """
    d = dist(z, zp)
    return 1.0 / (math.cosh(d) - math.sinh(d) * math.cos(direction.phi))


def expansion_factor(g: MoebiusMap, z0: Point3, direction: BoundaryDir) -> float:
    """Conformal expansion factor of g on the sphere at infinity, seen from z0."""
    return poisson(z0, apply(g.inverse(), z0), direction)


def lemma11_bound(a: float, b: float) -> float:
    """Displacement lower bound (1/2) log( b(1-a) / (a(1-b)) ).

    Requires a, b in [0, 1] with a > 0 and b < 1.  Equals
    (log sigma(a) - log sigma(b)) / 2 for sigma(t) = (1-t)/t.
    """
    if not (0.0 <= a <= 1.0 and 0.0 <= b <= 1.0):
        raise GeometryError("masses must lie in [0, 1]")
    if a == 0.0 or b == 1.0:
        raise GeometryError("bound undefined for a = 0 or b = 1")
    return 0.5 * math.log(b * (1.0 - a) / (a * (1.0 - b)))


def cap_integral(d: float, a: float, n: int = 2048) -> dict:
    """Squared expansion factor integrated over the boundary cap of mass a.

    With c = cosh d, s = sinh d and the frame pointing at the kernel's second
    point, the cap is phi <= phi0 = arccos(1 - 2a) and carries round measure a.
    Returns composite-quadrature and closed-form values a/((c-s)(c-s+2as));
    the azimuthal integral is exact by symmetry, Simpson handles the polar one.
    """
    if d <= 0:
        raise GeometryError("distance must be positive")
    if not 0.0 < a <= 1.0:
        raise GeometryError("cap mass must lie in (0, 1]")
    if n < 2:
        raise GeometryError("need at least 2 quadrature panels")
    c, s = math.cosh(d), math.sinh(d)
    phi0 = math.acos(1.0 - 2.0 * a)

    m = 2 * (n // 2)  # Simpson needs an even panel count
    phi = np.linspace(0.0, phi0, m + 1)
    integrand = np.sin(phi) / (c - s * np.cos(phi)) ** 2
    weights = np.ones(m + 1)
    weights[1:-1:2] = 4.0
    weights[2:-1:2] = 2.0
    polar = (phi0 / m) / 3.0 * float(weights @ integrand)
    numeric = polar / 2.0  # (1/4pi) * 2pi * polar

    closed = a / ((c - s) * (c - s + 2.0 * a * s))
    return {"numeric": numeric, "closed_form": closed, "panels": m}


def locos_side(d1: float, d2: float, theta: float) -> float:
    """Hyperbolic law of cosines: the side opposite the angle theta."""
    if d1 < 0 or d2 < 0:
        raise GeometryError("side lengths must be nonnegative")
    if not 0.0 <= theta <= math.pi:
        raise GeometryError("angle must lie in [0, pi]")
    c = math.cosh(d1) * math.cosh(d2) - math.sinh(d1) * math.sinh(d2) * math.cos(theta)
    return math.acosh(max(c, 1.0))


def locos_partials_sum(d1: float, d2: float, theta: float) -> float:
    """Sum of the two partial derivatives of cosh(opposite side) at (d1, d2)."""
    ct = math.cos(theta)
    p1 = math.sinh(d1) * math.cosh(d2) - math.cosh(d1) * math.sinh(d2) * ct
    p2 = math.cosh(d1) * math.sinh(d2) - math.sinh(d1) * math.cosh(d2) * ct
    return p1 + p2


# ---------------------------------------------------------------------------
# Schottky probe


def _circle_image(g: MoebiusMap, center: complex, radius: float) -> tuple[complex, float]:
    """Image of a boundary circle under g (assumes the pole stays outside)."""
    # reflect the center across the circle of inversion of g, standard formula
    p = -g.d / g.c if g.c != 0 else None
    if p is None:
        w = g.a / g.d
        return g.boundary(center), abs(w) * radius
    q = center - radius**2 / (center - p).conjugate()
    new_center = g.boundary(q)
    new_radius = abs(new_center - g.boundary(center + radius))
    return new_center, new_radius


@dataclass(frozen=True)
class SchottkyConfig:
    translation_length: float
    axis_separation: float

    def generators(self) -> tuple[MoebiusMap, MoebiusMap]:
        """Two loxodromic translations along disjoint axes.

        The first axis is the vertical line over 0; the second is the geodesic
        over the real segment [1, mu], placed so the hyperbolic distance between
        the axes is the requested separation: cosh(sep) = (mu+1)/(mu-1).
        """
        L = self.translation_length
        if L <= 0:
            raise GeometryError("translation length must be positive")
        if self.axis_separation <= 0:
            raise GeometryError("axis separation must be positive")
        xi = MoebiusMap.axis_translation(L)
        ch = math.cosh(self.axis_separation)
        mu = (ch + 1.0) / (ch - 1.0)
        # send {0, inf} to {1, mu}
        T = MoebiusMap(mu, 1.0, 1.0, 1.0)
        eta = T.compose(xi).compose(T.inverse())
        return xi, eta

    def pingpong_disks(self) -> list[tuple[complex, float]]:
        """Boundary disks of the half-space ping-pong configuration.

        The translation by L along the vertical axis pairs the hemispheres of
        radius exp(-L/2) and exp(L/2) around 0; conjugation carries the pair to
        the second generator.  Returned as (center, radius) for the four disks,
        the second entry being the complement disk |z| >= exp(L/2) encoded with
        its inversive mirror handled by the disjointness test.
        """
        L = self.translation_length
        r_in, r_out = math.exp(-L / 2.0), math.exp(L / 2.0)
        ch = math.cosh(self.axis_separation)
        mu = (ch + 1.0) / (ch - 1.0)
        T = MoebiusMap(mu, 1.0, 1.0, 1.0)
        d1 = _circle_image(T, 0.0, r_in)
        d2 = _circle_image(T, 0.0, r_out)
        return [(0.0, r_in), (0.0, r_out), d1, d2]

    def satisfies_pingpong(self) -> bool:
        """Conservative classical Schottky criterion: the four boundary disks
        D(0, e^{-L/2}),  exterior of D(0, e^{L/2}),  and their images under the
        conjugating map must be pairwise disjoint."""
        (c0, r0), (c1, r1), (c2, r2), (c3, r3) = self.pingpong_disks()
        inner = [(c0, r0), (c2, r2), (c3, r3)]
        # every bounded disk must avoid the exterior region |z| >= e^{L/2}
        for c, r in inner:
            if abs(c) + r >= r1:
                return False
        # and the bounded disks must be pairwise disjoint
        for i in range(len(inner)):
            for j in range(i + 1, len(inner)):
                ci, ri = inner[i]
                cj, rj = inner[j]
                if abs(ci - cj) <= ri + rj:
                    return False
        return True


@dataclass(frozen=True)
class ProbeReport:
    samples: int
    min_displacement: float
    min_margin: float
    floor: float
    violations: int
    config: SchottkyConfig

    def to_json(self) -> dict:
        return {
            "samples": self.samples,
            "min_displacement": self.min_displacement,
            "min_margin": self.min_margin,
            "floor": self.floor,
            "violations": self.violations,
            "translation_length": self.config.translation_length,
            "axis_separation": self.config.axis_separation,
        }


def schottky_probe(translation_length: float, axis_separation: float,
                   samples: int, seed: int) -> ProbeReport:
    """Sample base points and record max displacement under {xi, eta, xi eta}.

    The configuration must pass the ping-pong criterion (the group is then free
    and discrete), and the statistic min_z max_gamma dist(z, gamma z) is
    compared against the proven floor (1/2) log(5 + 3 sqrt(2)).
    """
    if samples < 1:
        raise GeometryError("need at least one sample")
    config = SchottkyConfig(translation_length, axis_separation)
    if not config.satisfies_pingpong():
        raise GeometryError(
            "parameters fail the ping-pong criterion; refusing to probe a "
            "possibly non-free configuration"
        )
    xi, eta = config.generators()
    isometries = [xi, eta, xi.compose(eta)]

    rng = np.random.default_rng(seed)
    min_disp = math.inf
    violations = 0
    for _ in range(samples):
        z = Point3(
            float(rng.normal(0.0, 2.0)),
            float(rng.normal(0.0, 2.0)),
            float(math.exp(rng.normal(0.0, 1.0))),
        )
        disp = max(dist(z, apply(g, z)) for g in isometries)
        min_disp = min(min_disp, disp)
        if disp < HALF_LOG_ALPHA_DAGGER:
            violations += 1
    return ProbeReport(
        samples=samples,
        min_displacement=min_disp,
        min_margin=min_disp - HALF_LOG_ALPHA_DAGGER,
        floor=HALF_LOG_ALPHA_DAGGER,
        violations=violations,
        config=config,
    )
