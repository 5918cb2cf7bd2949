import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gnbmo.geometry import (
    ConvexDomain,
    ball_intersection,
    ball_intersection_measure,
    ball_volume,
    contains,
    diameter,
    kappa,
    kappa_upper_bound,
    parse_domain,
    radius_grid,
)

DOMAINS = [
    "interval(0,1)",
    "interval(-2,3)",
    "square(0,1)",
    "box(0,2,0,0.5)",
    "disk(0,0,1)",
    "disk(0.3,-0.2,0.5)",
]


def grid_count_measure(domain, x, r, n=1200):
    """Independent oracle: count points of a fine grid over the ball's box."""
    d = domain.dimension
    x = np.atleast_1d(np.asarray(x, dtype=float))
    axes = [x[a] - r + (np.arange(n) + 0.5) * (2 * r / n) for a in range(d)]
    pts = np.stack([g.ravel() for g in np.meshgrid(*axes, indexing="ij")], axis=1)
    inside = (np.linalg.norm(pts - x, axis=1) < r) & contains(domain, pts)
    return inside.sum() * (2 * r / n) ** d


class TestContains:
    def test_interval_examples(self, unit_interval):
        assert contains(unit_interval, 0.5)
        assert not contains(unit_interval, 1.0)
        assert not contains(unit_interval, 0.0)

    def test_disk_example(self):
        disk = parse_domain("disk(0,0,1)")
        assert not contains(disk, [0.8, 0.8])
        # |(0.6, 0.6)| ≈ 0.849 lies inside the unit disk
        assert contains(disk, [0.6, 0.6])

    def test_dimension_mismatch(self, unit_square):
        with pytest.raises(ValueError):
            contains(unit_square, [0.5])

    def test_non_finite(self, unit_interval):
        with pytest.raises(ValueError):
            contains(unit_interval, math.nan)

    @pytest.mark.parametrize("spec", DOMAINS)
    def test_convexity_of_midpoints(self, spec):
        dom = parse_domain(spec)
        rng = np.random.default_rng(3)
        pts = dom.lower + (dom.upper - dom.lower) * rng.random((400, dom.dimension))
        pts = pts[contains(dom, pts)]
        a, b = pts[: len(pts) // 2], pts[len(pts) // 2: 2 * (len(pts) // 2)]
        assert np.all(contains(dom, 0.5 * (a + b)))


class TestDiameter:
    def test_examples(self, unit_interval, unit_square):
        assert diameter(unit_interval) == 1.0
        assert diameter(unit_square) == pytest.approx(math.sqrt(2), rel=1e-15)
        assert diameter(parse_domain("disk(0,0,0.7)")) == pytest.approx(1.4)

    def test_radius_grid_shape(self, unit_interval):
        r = radius_grid(unit_interval, 1e-3)
        assert len(r) == 32
        assert r[0] == pytest.approx(1e-3)
        assert r[-1] == pytest.approx(1.0)


class TestBallIntersection:
    def test_interval_examples(self, unit_interval):
        assert ball_intersection_measure(unit_interval, 0.5, 0.25) == pytest.approx(0.5)
        # x = 0 is the boundary limit of the one-sided case
        assert ball_intersection_measure(unit_interval, 1e-12, 0.5) == pytest.approx(0.5)

    def test_square_corner_quarter_disk(self, unit_square):
        x = [1e-12, 1e-12]
        got = ball_intersection_measure(unit_square, x, 0.1)
        assert got == pytest.approx(math.pi * 0.01 / 4, rel=1e-9)
        assert got == pytest.approx(grid_count_measure(unit_square, [0, 0], 0.1), rel=5e-3)

    def test_outside_point(self, unit_interval):
        with pytest.raises(ValueError):
            ball_intersection_measure(unit_interval, 1.5, 0.1)

    def test_nonpositive_radius(self, unit_interval):
        with pytest.raises(ValueError):
            ball_intersection_measure(unit_interval, 0.5, 0.0)

    @pytest.mark.parametrize("spec", DOMAINS)
    def test_matches_grid_counting(self, spec):
        dom = parse_domain(spec)
        rng = np.random.default_rng(11)
        for _ in range(5):
            x = dom.lower + (dom.upper - dom.lower) * rng.random(dom.dimension)
            if not contains(dom, x):
                continue
            r = 0.05 + diameter(dom) * rng.random()
            exact = ball_intersection_measure(dom, x, r)
            n = 4000 if dom.dimension == 1 else 700
            assert exact == pytest.approx(grid_count_measure(dom, x, r, n), rel=1e-2)

    def test_disk_in_disk_lens(self):
        dom = parse_domain("disk(0,0,1)")
        # a small ball deep inside is the full ball
        assert ball_intersection_measure(dom, [0.1, 0.0], 0.2) == pytest.approx(math.pi * 0.04)
        # a huge ball contains the whole disk
        assert ball_intersection_measure(dom, [0.1, 0.0], 5.0) == pytest.approx(math.pi)

    def test_windows(self):
        full = parse_domain("fullspace(-1,1,-1,1)")
        half = parse_domain("halfspace(-1,1,0,1)")
        assert ball_intersection_measure(full, [0.9, 0.9], 3.0) == pytest.approx(9 * math.pi)
        assert ball_intersection_measure(half, [0.0, 1e-12], 0.5) == pytest.approx(math.pi * 0.125)

    def test_record_invariants(self, unit_square):
        rec = ball_intersection(unit_square, [0.2, 0.3], 0.4)
        assert 0 < rec.measure <= min(ball_volume(0.4, 2), 1.0)

    @given(
        x=st.floats(0.001, 0.999),
        y=st.floats(0.001, 0.999),
        r0=st.floats(0.001, 1.4),
        r1=st.floats(0.001, 1.4),
    )
    def test_monotone_and_convexity_scaling(self, x, y, r0, r1):
        dom = ConvexDomain.box([0, 0], [1, 1])
        r0, r1 = sorted((r0, r1))
        m0 = ball_intersection_measure(dom, [x, y], r0)
        m1 = ball_intersection_measure(dom, [x, y], r1)
        assert m0 <= m1 * (1 + 1e-12)
        # r0/r1 (Ω ∩ B_r1(x)) ⊆ Ω ∩ B_r0(x) after centering at x
        assert m1 / r1 ** 2 <= m0 / r0 ** 2 * (1 + 1e-9)


class TestKappa:
    def test_windows_are_analytic(self):
        assert kappa(parse_domain("fullspace(-1,1)"), 0.1) == 1.0
        assert kappa(parse_domain("halfspace(-1,1,0,1)"), 0.1) == 2.0

    def test_interval(self, unit_interval):
        assert kappa(unit_interval, 1e-3) == pytest.approx(2.0, rel=1e-12)

    @pytest.mark.parametrize("spec", DOMAINS)
    def test_bracketed_by_upper_bound(self, spec):
        dom = parse_domain(spec)
        k = kappa(dom, diameter(dom) / 50)
        assert 1.0 <= k <= kappa_upper_bound(dom) * (1 + 1e-12)

    @pytest.mark.parametrize("spec", ["interval(0,1)", "square(0,1)", "disk(0,0,1)"])
    @pytest.mark.parametrize("lam", [0.5, 2.0])
    def test_dilation_invariance(self, spec, lam):
        dom = parse_domain(spec)
        h = diameter(dom) / 50
        assert kappa(dom.scaled(lam), lam * h) == pytest.approx(kappa(dom, h), rel=1e-6)

    def test_square_worst_case_is_whole_square(self, unit_square):
        # corner probe and r -> diam: Ω ∩ B_r = Ω, so the ratio reaches π diam^2 / |Ω| = 2π
        k = kappa(unit_square, 0.02)
        assert k == pytest.approx(2 * math.pi, rel=1e-3)
        assert k <= kappa_upper_bound(unit_square) * (1 + 1e-12)


class TestParse:
    @pytest.mark.parametrize("spec", DOMAINS + ["fullspace(-1,1)", "halfspace(-1,1,0,1)", "square", "interval"])
    def test_round_trip(self, spec):
        dom = parse_domain(spec)
        assert parse_domain(dom.label) == dom

    @pytest.mark.parametrize("bad", ["strip(0,1)", "parabola(1)", "triangle(0,1)", "interval(1)", "interval(a,b)"])
    def test_refusals(self, bad):
        with pytest.raises(ValueError):
            parse_domain(bad)

    def test_infinite_kappa_message(self):
        with pytest.raises(ValueError, match="infinite kappa"):
            parse_domain("strip(0,1)")
