import math

import numpy as np
import pytest

from km import h3
from km.h3 import (
    BoundaryDir,
    MoebiusMap,
    Point3,
    SchottkyConfig,
    apply,
    cap_integral,
    dist,
    expansion_factor,
    lemma11_bound,
    locos_partials_sum,
    locos_side,
    poisson,
    schottky_probe,
)


def random_map(rng) -> MoebiusMap:
    while True:
        a, b, c, d = (complex(*rng.normal(size=2)) for _ in range(4))
        if abs(a * d - b * c) > 1e-6:
            return MoebiusMap(a, b, c, d)


def random_point(rng, scale=1.5) -> Point3:
    return Point3(float(rng.normal(0, scale)), float(rng.normal(0, scale)),
                  float(math.exp(rng.normal(0, 0.7))))


class TestDist:
    def test_vertical_geodesic(self):
        assert dist(Point3(0, 0, 1), Point3(0, 0, math.e)) == pytest.approx(1.0, abs=1e-14)

    def test_symmetry(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            z, w = random_point(rng), random_point(rng)
            assert dist(z, w) == pytest.approx(dist(w, z), rel=1e-14)

    def test_triangle_inequality(self):
        rng = np.random.default_rng(1)
        for _ in range(1000):
            z, w, v = (random_point(rng) for _ in range(3))
            assert dist(z, v) <= dist(z, w) + dist(w, v) + 1e-12

    def test_zero_iff_equal(self):
        z = Point3(0.3, -0.2, 0.8)
        assert dist(z, z) == 0.0
        assert dist(z, Point3(0.3, -0.2, 0.9)) > 0

    def test_invalid_height(self):
        with pytest.raises(h3.GeometryError):
            Point3(0, 0, 0.0)


class TestApply:
    def test_identity(self):
        z = Point3(0.5, -1.0, 2.0)
        w = apply(MoebiusMap.identity(), z)
        assert (w.x, w.y, w.t) == pytest.approx((z.x, z.y, z.t), abs=1e-15)

    def test_axis_translation(self):
        ell = 0.7
        g = MoebiusMap.axis_translation(ell)
        w = apply(g, Point3(0, 0, 1))
        assert (w.x, w.y) == pytest.approx((0, 0), abs=1e-15)
        assert w.t == pytest.approx(math.exp(ell), rel=1e-14)
        assert dist(Point3(0, 0, 1), w) == pytest.approx(ell, rel=1e-12)

    def test_isometry_property(self):
        rng = np.random.default_rng(2)
        for _ in range(200):
            g = random_map(rng)
            z, w = random_point(rng), random_point(rng)
            d0 = dist(z, w)
            d1 = dist(apply(g, z), apply(g, w))
            assert abs(d1 - d0) <= 1e-12 * max(1.0, d0)

    def test_compose_and_inverse(self):
        rng = np.random.default_rng(3)
        g, h = random_map(rng), random_map(rng)
        z = random_point(rng)
        lhs = apply(g.compose(h), z)
        rhs = apply(g, apply(h, z))
        assert (lhs.x, lhs.y, lhs.t) == pytest.approx((rhs.x, rhs.y, rhs.t), rel=1e-10, abs=1e-10)
        back = apply(g.inverse(), apply(g, z))
        assert (back.x, back.y, back.t) == pytest.approx((z.x, z.y, z.t), rel=1e-10, abs=1e-10)


class TestPoisson:
    def test_endpoints(self):
        z, zp = Point3(0, 0, 1), Point3(0.4, 0.1, 0.6)
        d = dist(z, zp)
        assert poisson(z, zp, BoundaryDir(0.0)) == pytest.approx(math.exp(d), rel=1e-13)
        assert poisson(z, zp, BoundaryDir(math.pi)) == pytest.approx(math.exp(-d), rel=1e-13)

    def test_coincident_points(self):
        z = Point3(0, 0, 1)
        for phi in (0.0, 1.0, 2.0, math.pi):
            assert poisson(z, z, BoundaryDir(phi)) == 1.0

    def test_expansion_factor_identity_map(self):
        z = Point3(0.2, 0.1, 1.3)
        assert expansion_factor(MoebiusMap.identity(), z, BoundaryDir(1.0)) == 1.0

    def test_expansion_factor_axis_endpoints(self):
        g = MoebiusMap.axis_translation(0.9)
        z = Point3(0, 0, 1)
        vals = {
            expansion_factor(g, z, BoundaryDir(0.0)),
            expansion_factor(g, z, BoundaryDir(math.pi)),
        }
        expected = {math.exp(0.9), math.exp(-0.9)}
        assert all(any(abs(v - e) < 1e-12 for e in expected) for v in vals)
        assert max(vals) == pytest.approx(math.exp(0.9), rel=1e-12)

    def test_sphere_average_of_squared_factor(self):
        # full-cap integral of the squared factor is 1 for any isometry
        rng = np.random.default_rng(4)
        z0 = Point3(0, 0, 1)
        for _ in range(100):
            g = random_map(rng)
            zp = apply(g.inverse(), z0)
            d = dist(z0, zp)
            if d < 1e-8:
                continue
            res = cap_integral(d, 1.0, n=2048)
            assert res["closed_form"] == pytest.approx(1.0, rel=1e-12)
            assert res["numeric"] == pytest.approx(1.0, abs=1e-6)


class TestLemma11Bound:
    def test_log3_case(self):
        assert lemma11_bound(0.25, 0.75) == pytest.approx(math.log(3.0), abs=1e-12)

    def test_symmetric_zero(self):
        assert lemma11_bound(0.5, 0.5) == 0.0

    def test_monotone(self):
        grid = np.linspace(0.05, 0.95, 10)
        for a in grid:
            vals = [lemma11_bound(a, b) for b in grid]
            assert all(v2 > v1 for v1, v2 in zip(vals, vals[1:]))
        for b in grid:
            vals = [lemma11_bound(a, b) for a in grid]
            assert all(v2 < v1 for v1, v2 in zip(vals, vals[1:]))

    def test_sigma_identity(self):
        sigma = lambda t: (1 - t) / t
        for a in (0.1, 0.3, 0.6):
            for b in (0.2, 0.5, 0.9):
                expected = 0.5 * (math.log(sigma(a)) - math.log(sigma(b)))
                assert lemma11_bound(a, b) == pytest.approx(expected, rel=1e-13)

    def test_domain_errors(self):
        with pytest.raises(h3.GeometryError):
            lemma11_bound(0.0, 0.5)
        with pytest.raises(h3.GeometryError):
            lemma11_bound(0.5, 1.0)
        with pytest.raises(h3.GeometryError):
            lemma11_bound(-0.1, 0.5)


class TestCapIntegral:
    def test_log3_equality_case(self):
        res = cap_integral(math.log(3.0), 0.25)
        assert res["closed_form"] == pytest.approx(0.75, abs=1e-14)
        assert abs(res["numeric"] - res["closed_form"]) < 1e-8

    def test_full_sphere(self):
        res = cap_integral(1.3, 1.0)
        assert res["closed_form"] == pytest.approx(1.0, rel=1e-13)

    def test_grid_agreement(self):
        worst = 0.0
        for d in (0.5, 1.0, 2.0):
            for a in (0.1, 0.25, 0.5, 0.9):
                res = cap_integral(d, a, n=2048)
                worst = max(worst, abs(res["numeric"] - res["closed_form"]))
        assert worst < 1e-8

    def test_invalid(self):
        with pytest.raises(h3.GeometryError):
            cap_integral(-1.0, 0.5)
        with pytest.raises(h3.GeometryError):
            cap_integral(1.0, 0.0)


class TestLawOfCosines:
    def test_collinear(self):
        assert locos_side(0.8, 1.1, math.pi) == pytest.approx(1.9, rel=1e-13)

    def test_degenerate(self):
        assert locos_side(1.0, 1.0, 0.0) == pytest.approx(0.0, abs=1e-7)

    def test_symmetric(self):
        assert locos_side(0.5, 1.2, 1.0) == pytest.approx(locos_side(1.2, 0.5, 1.0), rel=1e-14)

    def test_symmetric_shrink_property(self):
        # at equal sides the partials sum to sinh(2 d)(1 - cos theta) > 0
        got = locos_partials_sum(1.0, 1.0, math.pi / 2)
        assert got == pytest.approx(math.sinh(2.0), rel=1e-13)
        assert got > 0

    def test_partial_positive_when_longer(self):
        # moving the longer side shortens the opposite side: p1 >= sinh(d1-d2) > 0
        for theta in (0.1, 1.0, 2.5):
            p1 = math.sinh(2.0) * math.cosh(1.0) - math.cosh(2.0) * math.sinh(1.0) * math.cos(theta)
            assert p1 >= math.sinh(1.0) - 1e-12


class TestSchottkyProbe:
    def test_refuses_unsafe_parameters(self):
        with pytest.raises(h3.GeometryError):
            schottky_probe(0.1, 0.1, samples=10, seed=0)

    def test_sample_count_validation(self):
        with pytest.raises(h3.GeometryError):
            schottky_probe(10.0, 3.0, samples=0, seed=0)

    def test_large_translation_margin(self):
        report = schottky_probe(10.0, 3.0, samples=200, seed=7)
        assert report.violations == 0
        assert report.min_margin >= 0
        assert report.min_displacement > 2.0
        # the floor is (1/2) log(5 + 3 sqrt(2)) = 1.1119138167...
        assert report.floor == pytest.approx(1.1119138167365345, abs=1e-13)

    def test_floor_constant_precision(self):
        # logarithm oracle at >= 15 digits
        assert h3.HALF_LOG_ALPHA_DAGGER == pytest.approx(
            0.5 * math.log(5 + 3 * math.sqrt(2)), abs=1e-15
        )

    def test_moderate_configuration_no_violations(self):
        report = schottky_probe(3.0, 4.0, samples=2000, seed=11)
        assert report.violations == 0
        assert report.min_margin >= 0

    def test_deterministic(self):
        a = schottky_probe(5.0, 3.0, samples=100, seed=5)
        b = schottky_probe(5.0, 3.0, samples=100, seed=5)
        assert a == b

    def test_pingpong_criterion_monotone(self):
        assert SchottkyConfig(8.0, 3.0).satisfies_pingpong()
        assert not SchottkyConfig(0.05, 0.05).satisfies_pingpong()
