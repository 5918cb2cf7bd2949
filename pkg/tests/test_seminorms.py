import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from gnbmo import _scan
from gnbmo import field as F
from gnbmo.geometry import parse_domain, radius_grid
from gnbmo.seminorms import (
    BallRegion,
    ExponentError,
    Exponents,
    SeminormValue,
    ball_average_deviation,
    bmo_seminorm,
    cell_self_constant,
    centered_cell_constant,
    gagliardo_inner,
    gagliardo_p_power,
    lp_gradient_norm_q,
    maximal_function,
    nodes_for,
    oscillation_pair_average,
    sharp_maximal,
)

# frozen from scipy dblquad over the unit cell, (s, p) = (0.75, 2)
K2_CELL = 4.027804640959195
K2_CENTERED = 4.700258791390276


def identity(domain):
    return F.affine([1.0], domain=domain, label="x")


def square_field(domain):
    return F.ScalarField("x^2", 1, lambda x: x[..., 0] ** 2, gradient_rule=lambda x: 2 * x, domain=domain)


class TestGagliardo:
    def test_identity_oracle(self, unit_interval):
        # ∬ |y-x|^{-1/2} over the unit square = 8/3
        v = gagliardo_p_power(identity(unit_interval), unit_interval, 0.75, 2, 1e-3)
        assert v.kind == "gagliardo-p-power"
        assert abs(v.value - 8 / 3) / (8 / 3) < 1e-2

    def test_half_order_oracle(self, unit_interval):
        # exponent q = (1-s)p = 1 gives 2 / (q (q+1)) = 1
        v = gagliardo_p_power(identity(unit_interval), unit_interval, 0.5, 2, 1e-3)
        assert v.value == pytest.approx(1.0, rel=1e-2)

    def test_constant_is_zero(self, unit_square):
        f = F.constant(3.0, 2, unit_square)
        assert gagliardo_p_power(f, unit_square, 0.75, 2, 0.05).value == 0.0

    def test_refinement_one_sided(self, unit_interval):
        vals = [gagliardo_p_power(identity(unit_interval), unit_interval, 0.75, 2, h).value for h in (2e-3, 1e-3, 5e-4)]
        assert vals[0] <= vals[1] <= vals[2] <= 8 / 3

    def test_refine_reports_error(self, unit_interval):
        v = gagliardo_p_power(identity(unit_interval), unit_interval, 0.75, 2, 2e-3, refine=True)
        fine = gagliardo_p_power(identity(unit_interval), unit_interval, 0.75, 2, 1e-3).value
        assert v.error_estimate == pytest.approx(abs(fine - v.value))

    def test_uncorrected_is_lower(self, unit_interval):
        f = identity(unit_interval)
        plain = gagliardo_p_power(f, unit_interval, 0.75, 2, 1e-3, correct=False).value
        assert plain < gagliardo_p_power(f, unit_interval, 0.75, 2, 1e-3).value

    @given(lam=st.floats(0.01, 100))
    @settings(max_examples=15)
    def test_homogeneity(self, lam):
        dom = parse_domain("interval(0,1)")
        f = F.corpus_field(dom, "sinusoid")
        base = gagliardo_p_power(f, dom, 0.75, 2, 1e-2).value
        assert gagliardo_p_power(f.scaled(lam), dom, 0.75, 2, 1e-2).value == pytest.approx(lam ** 2 * base, rel=1e-10)

    def test_translation(self, unit_interval):
        f = F.corpus_field(unit_interval, "bump")
        shifted_dom = unit_interval.translated([0.5])
        a = gagliardo_p_power(f, unit_interval, 0.75, 2, 1e-2).value
        b = gagliardo_p_power(f.translated([0.5]), shifted_dom, 0.75, 2, 1e-2).value
        assert b == pytest.approx(a, rel=1e-12)

    def test_dilation_scaling(self, unit_interval):
        # f(x/λ) on λΩ scales by λ^{d - sp}
        f = F.corpus_field(unit_interval, "bump")
        lam, s, p = 2.0, 0.75, 2
        a = gagliardo_p_power(f, unit_interval, s, p, 1e-3).value
        b = gagliardo_p_power(f.dilated(1 / lam), unit_interval.scaled(lam), s, p, lam * 1e-3).value
        assert b == pytest.approx(lam ** (1 - s * p) * a, rel=1e-9)

    def test_bad_exponents(self, unit_interval):
        with pytest.raises(ExponentError):
            gagliardo_p_power(identity(unit_interval), unit_interval, 1.0, 2, 1e-2)


class TestCellConstants:
    def test_one_dimensional_closed_form(self):
        s, p = 0.75, 2
        # ∬_{[0,1]^2} |y-x|^a = 2 ∫_0^1 (1-t) t^a dt
        ref, _ = integrate.quad(lambda t: 2 * (1 - t) * t ** (p - 1 - s * p), 0, 1)
        assert cell_self_constant(1, s, p) == pytest.approx(ref, rel=1e-6)
        q = (1 - s) * p
        c, _ = integrate.quad(lambda u: abs(u) ** (q - 1), -0.5, 0.5, points=[0])
        assert centered_cell_constant(1, s, p) == pytest.approx(c, rel=1e-8)

    @pytest.mark.parametrize("theta", [0.0, 0.3, math.pi / 4, 1.2])
    def test_two_dimensional_tables(self, theta):
        e = np.array([math.cos(theta), math.sin(theta)])
        # p = 2 averages cos^2 over the cell symmetries, so the constant is angle free
        assert cell_self_constant(2, 0.75, 2, e)[0] == pytest.approx(K2_CELL, rel=1e-4)
        assert centered_cell_constant(2, 0.75, 2, e) == pytest.approx(K2_CENTERED, rel=1e-4)


class TestInner:
    def test_identity_at_midpoint(self, unit_interval):
        # ∫_0^1 |y - x|^{-1/2} dy = 2 (√x + √(1-x))
        for x in (0.5, 0.5004):
            v = gagliardo_inner(identity(unit_interval), unit_interval, x, 0.75, 2, 1e-3)
            exact = 2 * (math.sqrt(x) + math.sqrt(1 - x))
            assert v == pytest.approx(exact, rel=1e-2)


class TestBMO:
    def test_identity(self, unit_interval):
        v = bmo_seminorm(identity(unit_interval), unit_interval, 1e-3)
        assert v.kind == "bmo"
        assert v.value == pytest.approx(1 / 3, rel=1e-2)
        assert "argmax" in v.notes

    def test_constant_is_zero(self, unit_square):
        assert bmo_seminorm(F.constant(1.0, 2, unit_square), unit_square, 0.05).value == 0.0

    def test_sharp_below_bmo(self, unit_interval):
        f = F.corpus_field(unit_interval, "sinusoid")
        b = bmo_seminorm(f, unit_interval, 5e-3).value
        for x in np.linspace(0.01, 0.99, 13):
            assert sharp_maximal(f, unit_interval, x, 5e-3) <= b

    def test_window_note(self):
        win = parse_domain("fullspace(-1,1)")
        f = F.corpus_field(win, "bump")
        assert "window" in bmo_seminorm(f, win, 1e-2).notes

    def test_numba_matches_numpy(self, unit_square):
        nodes = nodes_for(unit_square, 0.05)
        vals = np.sin(5 * nodes.points[:, 0]) * nodes.points[:, 1]
        radii = radius_grid(unit_square, nodes.h)
        centers = nodes.points[::7]
        fast = _scan.oscillation_scan(nodes.points, nodes.weights, vals, centers, radii, nodes.h, accelerated=True)
        slow = _scan.oscillation_scan(nodes.points, nodes.weights, vals, centers, radii, nodes.h, accelerated=False)
        assert np.allclose(fast, slow, rtol=1e-12, atol=1e-15)


class TestLpAndMaximal:
    def test_lp_identity(self, unit_interval):
        v = lp_gradient_norm_q(identity(unit_interval), unit_interval, 1.5, 1e-3)
        assert v.value == pytest.approx(1.0, rel=1e-12)

    def test_lp_square(self, unit_interval):
        v = lp_gradient_norm_q(square_field(unit_interval), unit_interval, 2.0, 1e-3)
        assert v.value == pytest.approx(4 / 3, rel=1e-5)

    def test_maximal_of_one(self, unit_interval):
        one = F.constant(1.0, 1, unit_interval)
        assert maximal_function(one, unit_interval, 0.5, 1e-3) == pytest.approx(1.0, rel=1e-9)
        # at the edge only half of every ball meets the domain
        assert maximal_function(one, unit_interval, 1e-6, 1e-3) <= 0.5 + 1e-2

    def test_maximal_dominates_value(self, unit_interval):
        f = F.corpus_field(unit_interval, "bump")
        for x in (0.3, 0.5, 0.6):
            assert maximal_function(f, unit_interval, x, 1e-3) >= abs(F.eval(f, x)) * (1 - 1e-2)

    def test_node_array_input(self, unit_interval):
        nodes = nodes_for(unit_interval, 1e-2)
        with pytest.raises(ValueError):
            maximal_function(np.ones(3), unit_interval, 0.5, 1e-2)
        assert maximal_function(np.ones(len(nodes)), unit_interval, 0.5, 1e-2) == pytest.approx(1.0)


class TestAverages:
    def test_pair_average(self, unit_interval):
        f = identity(unit_interval)
        whole = BallRegion(unit_interval, 0.5, 0.5)
        left, right = BallRegion(unit_interval, 0.25, 0.25), BallRegion(unit_interval, 0.75, 0.25)
        assert oscillation_pair_average(f, whole, whole, 1e-3) == pytest.approx(1 / 3, rel=1e-3)
        assert oscillation_pair_average(f, left, right, 1e-3) == pytest.approx(0.5, rel=1e-3)

    def test_ball_deviation(self, unit_interval):
        f = identity(unit_interval)
        assert ball_average_deviation(f, unit_interval, 0.5, 0.25, 1e-3) == pytest.approx(0.125, rel=1e-3)
        assert ball_average_deviation(f, unit_interval, 0.5, 0.5, 1e-3) == pytest.approx(0.25, rel=1e-3)

    def test_region_domains_must_match(self, unit_interval):
        other = parse_domain("interval(0,2)")
        with pytest.raises(ValueError):
            oscillation_pair_average(identity(unit_interval), BallRegion(unit_interval, 0.5, 0.1),
                                     BallRegion(other, 0.5, 0.1), 1e-2)


class TestExponents:
    def test_first_order(self):
        Exponents(0.75, 2).check_first_order()
        with pytest.raises(ExponentError, match="sp ≤ 1"):
            Exponents(0.5, 2).check_first_order()
        with pytest.raises(ExponentError, match="s ≥ 1"):
            Exponents(1.0, 2).check_first_order()

    def test_fractional(self):
        Exponents(0.6, 2, s1=0.8, p1=1.5).check_fractional()
        with pytest.raises(ExponentError, match="s < s1"):
            Exponents(0.8, 1.5, s1=0.6, p1=2).check_fractional()
        with pytest.raises(ExponentError, match="s1·p1"):
            Exponents(0.6, 2, s1=0.8, p1=2).check_fractional()

    def test_higher_order(self):
        ex = Exponents.higher_order(1, 0.5, 2)
        assert ex.p == 3.0
        ex.check_higher_order()
        with pytest.raises(ExponentError):
            Exponents(1.0, 3.0, p1=2, k1=1, sigma1=1.5).check_higher_order()

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            SeminormValue(1.0, 0.0, 1e-3, "bogus")
