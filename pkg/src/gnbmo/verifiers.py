"""Checkers for the BMO / Sobolev interpolation inequalities and the lemmas
behind them.

Statements with an explicit constant (the Gamma identity, the triangle
inequality for averages, the logarithmic growth of averages, the
Lusin-type bound, the mollifier identity) pass or fail. Statements with an
unspecified constant report ``ratio = lhs / rhs_product``, an empirical
lower bound for that constant.

Statement ids are short tags used by the CLI and in reports.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field as dc_field
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import numpy as np

from .field import CorpusEntry, ScalarField, piecewise_linear
from .geometry import ConvexDomain, contains, diameter, kappa as kappa_of
from .quadrature import adaptive_integral_1d
from .seminorms import (
    BallRegion,
    ExponentError,
    Exponents,
    ball_average_deviation,
    ball_average_deviation_many,
    bmo_seminorm,
    gagliardo_derivative_p_power,
    gagliardo_inner,
    gagliardo_p_power,
    gradient_node_magnitudes,
    lp_gradient_norm_q,
    maximal_function,
    nodes_for,
    oscillation_pair_average,
    sharp_maximal,
)

STATEMENTS = {
    "gamma": "log-power integral against the Gamma function",
    "triangle": "triangle inequality for double averages",
    "bmo-log": "logarithmic growth of averages across radii",
    "lusin": "ball deviation bounded by r times the maximal function of |Df|",
    "osc-holder": "ball deviation bounded by r^s times the inner Gagliardo integral",
    "thm21": "first-order interpolation: Gagliardo (s, p) by BMO and ∫|Df|^{sp}",
    "thm31": "fractional interpolation: Gagliardo (s, p) by BMO and Gagliardo (s1, p1)",
    "thm41": "higher-order interpolation: ∫|D^k f|^p by BMO and Gagliardo of D^k f",
    "mollifier": "derivative transfer onto the mollifier by integration by parts",
    "local-sharp": "pointwise first-order form with the sharp maximal function",
    "local-frac": "pointwise fractional form with the sharp maximal function",
    "local-higher": "pointwise higher-order form with the sharp maximal function",
}

# factor columns, in the order they multiply into rhs_product
FACTOR_KEYS = ("bmo", "grad_norm", "gagliardo_s1p1", "kappa", "blowup_factor")

SUP_BIAS = "sup-type factors are discrete lower bounds of the true sups"


@dataclass
class InequalityReport:
    statement_id: str
    domain: str
    field: str
    lhs: float | None
    rhs_factors: dict
    exponents: Exponents | None = None
    h: float | None = None
    passed: bool | None = None
    error_estimate: float | None = None
    runtime_ms: float = 0.0
    bias_notes: str = ""
    skipped: str | None = None
    extra: dict = dc_field(default_factory=dict)
    dimension: int | None = None

    def __post_init__(self):
        unknown = set(self.rhs_factors) - set(FACTOR_KEYS)
        if unknown:
            raise ValueError(f"unknown rhs factor names {sorted(unknown)}")
        for k, v in self.rhs_factors.items():
            if not v >= 0:
                raise ValueError(f"rhs factor {k} is negative or NaN: {v}")

    @property
    def rhs_product(self) -> float | None:
        if self.skipped:
            return None
        out = 1.0
        for key in FACTOR_KEYS:
            if key in self.rhs_factors:
                out *= self.rhs_factors[key]
        return out

    @property
    def degenerate(self) -> bool:
        return self.skipped is None and not self.rhs_product > 0

    @property
    def ratio(self) -> float | None:
        if self.skipped or self.degenerate:
            return None
        return self.lhs / self.rhs_product


@dataclass(frozen=True)
class ConstantEstimate:
    statement_id: str
    c_emp: float
    corpus_size: int
    refinement_drift: float | None
    per_parameter: dict
    reports: tuple = ()
    refined_reports: tuple = ()

    @property
    def spread(self) -> float:
        """max / min of the per-parameter maxima."""
        vals = [v for v in self.per_parameter.values() if v > 0]
        return max(vals) / min(vals) if vals else math.nan


class _Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.ms = 1e3 * (time.perf_counter() - self.t0)


# ---------------------------------------------------------------------------
# Cached building blocks
# ---------------------------------------------------------------------------


@lru_cache(maxsize=256)
def _bmo(field: ScalarField, domain: ConvexDomain, h: float):
    return bmo_seminorm(field, domain, h)


@lru_cache(maxsize=64)
def _kappa(domain: ConvexDomain, h: float) -> float:
    return kappa_of(domain, h)


def _window_note(domain: ConvexDomain) -> str:
    if domain.is_window:
        return f"integrals truncated to the window {domain.label}"
    return ""


def _join(*notes: str) -> str:
    return "; ".join(n for n in notes if n)


# ---------------------------------------------------------------------------
# Statements with explicit constants
# ---------------------------------------------------------------------------


def gamma_rhs(p: float, alpha: float) -> float:
    return math.exp(math.lgamma(p + 1.0) - (p + 1.0) * math.log(alpha))


def check_gamma_identity(p: float, alpha: float, tol: float = 1e-8) -> InequalityReport:
    """∫_1^∞ (ln r)^p r^{-1-alpha} dr against Γ(p+1) / alpha^{p+1}."""
    if not p > 0 or not alpha > 0:
        raise ValueError("requires p > 0 and alpha > 0")
    with _Timer() as t:

        def g(r):
            r = np.asarray(r, dtype=float)
            lr = np.log(np.maximum(r, 1.0))
            with np.errstate(over="ignore", under="ignore"):
                return lr ** p * r ** (-1.0 - alpha)

        res = adaptive_integral_1d(g, 1.0, math.inf, tol=tol * 1e-2, alpha=alpha)
        exact = gamma_rhs(p, alpha)
    diff = abs(res.value - exact)
    return InequalityReport(
        "gamma", "halfline(1,inf)", "log-power", res.value, {"blowup_factor": exact},
        None, None, diff < tol, diff, t.ms,
        f"adaptive quadrature error estimate {res.error_estimate:.3g}",
        extra={"integral": res.value, "closed_form": exact, "alpha": alpha},
        dimension=1,
    )


def check_triangle(field: ScalarField, A: BallRegion, B: BallRegion, C: BallRegion, h: float,
                   slack: float = 1e-9) -> InequalityReport:
    """avg(A, B) ≤ avg(A, C) + avg(C, B) for double averages of |f(y) - f(x)|."""
    with _Timer() as t:
        ab = oscillation_pair_average(field, A, B, h)
        ac = oscillation_pair_average(field, A, C, h)
        cb = oscillation_pair_average(field, C, B, h)
    rhs = ac + cb
    return InequalityReport(
        "triangle", A.domain.label, field.label, ab, {"blowup_factor": rhs}, None, h,
        ab <= rhs + slack, None, t.ms, "rhs is the sum avg(A,C) + avg(C,B)",
        extra={"avg_ac": ac, "avg_cb": cb},
        dimension=field.dimension,
    )


def check_bmo_log(field: ScalarField, domain: ConvexDomain, x, r0: float, r1: float, h: float,
                  slack: float = 1e-6) -> InequalityReport:
    """Cross average over the balls of radii r0 < r1 at x against
    e (1 + d ln(r1 / r0)) times the BMO seminorm."""
    if not 0 < r0 <= r1:
        raise ValueError("requires 0 < r0 ≤ r1")
    if r1 > diameter(domain) * (1 + 1e-12):
        raise ValueError("requires r1 ≤ diam")
    with _Timer() as t:
        lhs = oscillation_pair_average(field, BallRegion(domain, x, r0), BallRegion(domain, x, r1), h)
        bmo = _bmo(field, domain, h).value
    growth = math.e * (1.0 + domain.dimension * math.log(r1 / r0))
    rhs = growth * bmo
    return InequalityReport(
        "bmo-log", domain.label, field.label, lhs, {"bmo": bmo, "blowup_factor": growth}, None, h,
        lhs <= rhs * (1.0 + slack) + 1e-15, None, t.ms, _join(SUP_BIAS, _window_note(domain)),
        extra={"r0": r0, "r1": r1, "x": list(np.atleast_1d(x))},
        dimension=field.dimension,
    )


def lusin_slack(h: float, scale: float) -> float:
    """Absolute slack C h^2 for the gradient discretization, C = max(1, scale)."""
    return max(1.0, scale) * h * h


def check_lusin(field: ScalarField, domain: ConvexDomain, x, r: float, h: float,
                slack_constant: float | None = None) -> InequalityReport:
    """⨍_{Ω∩B_r(x)} |f - f(x)| ≤ κ(Ω) r M|Df|(x)."""
    with _Timer() as t:
        lhs = ball_average_deviation(field, domain, x, r, h)
        mag = gradient_node_magnitudes(field, domain, h)
        M = maximal_function(mag, domain, x, h)
        k = _kappa(domain, h)
    rhs = k * r * M
    slack = (slack_constant if slack_constant is not None else max(1.0, M)) * h * h
    return InequalityReport(
        "lusin", domain.label, field.label, lhs, {"grad_norm": r * M, "kappa": k}, None, h,
        lhs <= rhs + slack, None, t.ms,
        _join(f"grad_norm column is r*M|Df|(x); slack {slack:.3g}", SUP_BIAS),
        extra={"r": r, "maximal": M, "x": list(np.atleast_1d(x))},
        dimension=field.dimension,
    )


def check_osc_holder(field: ScalarField, domain: ConvexDomain, x, r: float, s1: float, p1: float,
                     h: float) -> InequalityReport:
    """Ratio of ⨍_{Ω∩B_r(x)} |f - f(x)| to κ r^{s1} (inner Gagliardo integral)^{1/p1}."""
    if not (0 < s1 < 1 and p1 > 1):
        raise ExponentError("requires s1 ∈ (0, 1) and p1 > 1")
    with _Timer() as t:
        lhs = ball_average_deviation(field, domain, x, r, h)
        inner = gagliardo_inner(field, domain, x, s1, p1, h)
        k = _kappa(domain, h)
    return InequalityReport(
        "osc-holder", domain.label, field.label, lhs,
        {"gagliardo_s1p1": inner ** (1.0 / p1), "kappa": k, "blowup_factor": r ** s1},
        Exponents(s=s1, p=p1), h, None, None, t.ms,
        "gagliardo_s1p1 is the inner integral at x to the power 1/p1; blowup_factor is r^s1",
        extra={"r": r, "inner": inner, "x": list(np.atleast_1d(x))},
        dimension=field.dimension,
    )


def mollifier(u):
    """Unnormalized exp(-1 / (1 - u^2)) on (-1, 1) and its derivative."""
    u = np.asarray(u, dtype=float)
    inside = np.abs(u) < 1.0
    den = np.where(inside, 1.0 - u * u, 1.0)
    val = np.where(inside, np.exp(-1.0 / den), 0.0)
    return val, np.where(inside, val * (-2.0 * u / (den * den)), 0.0)


@lru_cache(maxsize=1)
def mollifier_mass() -> float:
    return adaptive_integral_1d(lambda u: mollifier(u)[0], -1.0, 1.0, tol=1e-14).value


def check_mollifier_identity(field: ScalarField, x: float, rho: float, domain: ConvexDomain | None = None,
                             tol: float = 1e-6) -> InequalityReport:
    """(1/ρ) ∫ η((x-y)/ρ) f'(y) dy = (1/ρ²) ∫ η'((x-y)/ρ) f(y) dy for a 1-d field."""
    if field.dimension != 1 or field.gradient_rule is None:
        raise ValueError("the mollifier identity needs a 1-d field with an analytic derivative")
    if rho <= 0:
        raise ValueError("rho must be positive")
    x = float(np.atleast_1d(x)[0])
    if domain is not None:
        ends = np.array([[x - rho], [x + rho]])
        inside = np.all((ends[:, 0] >= domain.lower[0]) & (ends[:, 0] <= domain.upper[0]))
        if not inside:
            raise ValueError("support of the scaled mollifier exceeds the window")
    Z = mollifier_mass()
    fp = field.gradient_rule

    def left(y):
        y = np.asarray(y, dtype=float)
        eta, _ = mollifier((x - y) / rho)
        return eta / Z * np.asarray(fp(y[..., None]))[..., 0] / rho

    def right(y):
        y = np.asarray(y, dtype=float)
        _, deta = mollifier((x - y) / rho)
        return deta / Z * field.values(y[..., None]) / rho ** 2

    with _Timer() as t:
        lhs = adaptive_integral_1d(left, x - rho, x + rho, tol=1e-13).value
        rhs = adaptive_integral_1d(right, x - rho, x + rho, tol=1e-13).value
    resid = abs(lhs - rhs)
    # sign-indefinite identity: report it as lhs against |rhs|
    return InequalityReport(
        "mollifier", "" if domain is None else domain.label, field.label, lhs,
        {"blowup_factor": abs(rhs)}, Exponents.higher_order(1, 0.5, 2.0), None, resid < tol, resid, t.ms,
        "equality check; blowup_factor column holds |rhs|", extra={"rhs": rhs, "rho": rho, "x": x},
        dimension=field.dimension,
    )


# ---------------------------------------------------------------------------
# Global interpolation inequalities
# ---------------------------------------------------------------------------


def verify_first_order_interpolation(field: ScalarField, domain: ConvexDomain, s: float, p: float, h: float,
                                     refine: bool = False, include_blowup: bool = True) -> InequalityReport:
    """Gagliardo (s, p) against κ^{sp} / ((sp-1)(1-s)) · bmo^{(1-s)p} · ∫|Df|^{sp}."""
    ex = Exponents(s=s, p=p)
    ex.check_first_order()
    with _Timer() as t:
        lhs = gagliardo_p_power(field, domain, s, p, h, refine=refine)
        bmo = _bmo(field, domain, h)
        grad = lp_gradient_norm_q(field, domain, s * p, h)
        k = _kappa(domain, h)
    factors = {
        "bmo": bmo.value ** ((1 - s) * p),
        "grad_norm": grad.value,
        "kappa": k ** (s * p),
    }
    if include_blowup:
        factors["blowup_factor"] = 1.0 / ((s * p - 1.0) * (1.0 - s))
    return InequalityReport(
        "thm21", domain.label, field.label, lhs.value, factors, ex, lhs.resolution, None,
        lhs.error_estimate if refine else None, t.ms,
        _join(SUP_BIAS, lhs.notes, _window_note(domain)),
        extra={"bmo_raw": bmo.value, "kappa_raw": k},
        dimension=field.dimension,
    )


def verify_fractional_interpolation(field: ScalarField, domain: ConvexDomain, s: float, p: float, s1: float,
                                    p1: float, h: float, refine: bool = False) -> InequalityReport:
    """Gagliardo (s, p) against bmo^{p-p1} · κ^{p1} · Gagliardo (s1, p1)."""
    ex = Exponents(s=s, p=p, s1=s1, p1=p1)
    ex.check_fractional()
    with _Timer() as t:
        lhs = gagliardo_p_power(field, domain, s, p, h, refine=refine)
        upper = gagliardo_p_power(field, domain, s1, p1, h)
        bmo = _bmo(field, domain, h)
        k = _kappa(domain, h)
    factors = {"bmo": bmo.value ** (p - p1), "gagliardo_s1p1": upper.value, "kappa": k ** p1}
    return InequalityReport(
        "thm31", domain.label, field.label, lhs.value, factors, ex, lhs.resolution, None,
        lhs.error_estimate if refine else None, t.ms,
        _join(SUP_BIAS, lhs.notes, _window_note(domain)),
        extra={"bmo_raw": bmo.value, "kappa_raw": k},
        dimension=field.dimension,
    )


def verify_higher_order_interpolation(field: ScalarField, window: ConvexDomain, k1: int, sigma1: float, p1: float,
                                      h: float) -> InequalityReport:
    """∫|f'|^p against bmo^{p-p1} · Gagliardo (sigma1, p1) of f', in d = 1.

    The field should be supported well inside the window so that the
    window-truncated integrals match those over the whole line.
    """
    ex = Exponents.higher_order(k1, sigma1, p1)
    ex.check_higher_order()
    if k1 != 1 or window.dimension != 1:
        raise ExponentError("only k1 = 1 in dimension 1 is supported")
    p = ex.p
    with _Timer() as t:
        nodes = nodes_for(window, h)
        deriv = np.asarray(field.gradient_rule(nodes.points))[:, 0]
        lhs = math.fsum(nodes.weights * np.abs(deriv) ** p)
        upper = gagliardo_derivative_p_power(field, window, sigma1, p1, h)
        bmo = _bmo(field, window, h)
    factors = {"bmo": bmo.value ** (p - p1), "gagliardo_s1p1": upper.value}
    return InequalityReport(
        "thm41", window.label, field.label, lhs, factors, ex, nodes.h, None, None, t.ms,
        _join(SUP_BIAS, _window_note(window)), extra={"bmo_raw": bmo.value},
        dimension=field.dimension,
    )


# ---------------------------------------------------------------------------
# Pointwise (sharp maximal) forms
# ---------------------------------------------------------------------------


def radial_deviation_integral(field: ScalarField, domain: ConvexDomain, x, s: float, p: float, h: float,
                              tol: float = 1e-9) -> float:
    """∫_h^{diam} (⨍_{Ω∩B_r(x)} |f - f(x)|)^p dr / r^{1+sp}, integrated in log r."""
    lo, hi = math.log(h), math.log(diameter(domain))

    def g(t):
        r = np.exp(np.asarray(t, dtype=float))
        avg = ball_average_deviation_many(field, domain, x, r, h)
        return avg ** p * r ** (-s * p)

    scale = abs(g(np.array([0.5 * (lo + hi)]))[0]) + 1e-300
    return adaptive_integral_1d(g, lo, hi, tol=tol * max(scale, 1e-12)).value


def check_pointwise_local(field: ScalarField, domain: ConvexDomain, x, s: float, p: float, h: float
                          ) -> InequalityReport:
    """Radial deviation integral against (1-s)^{-1} f♯(x)^{(1-s)p} (κ M|Df|(x))^{sp}."""
    ex = Exponents(s=s, p=p)
    ex.check_first_order()
    with _Timer() as t:
        lhs = radial_deviation_integral(field, domain, x, s, p, h)
        sharp = sharp_maximal(field, domain, x, h)
        M = maximal_function(gradient_node_magnitudes(field, domain, h), domain, x, h)
        k = _kappa(domain, h)
    factors = {
        "bmo": sharp ** ((1 - s) * p),
        "grad_norm": M ** (s * p),
        "kappa": k ** (s * p),
        "blowup_factor": 1.0 / (1.0 - s),
    }
    return InequalityReport(
        "local-sharp", domain.label, field.label, lhs, factors, ex, h, None, None, t.ms,
        _join(f"radial integral starts at r = h = {h:g}", "bmo column holds the sharp maximal function", SUP_BIAS),
        extra={"sharp": sharp, "maximal": M, "x": list(np.atleast_1d(x))},
        dimension=field.dimension,
    )


def check_pointwise_fractional(field: ScalarField, domain: ConvexDomain, x, s: float, p: float, s1: float,
                               p1: float, h: float) -> InequalityReport:
    """Radial deviation integral against f♯(x)^{p-p1} κ^{p1} (inner Gagliardo (s1, p1) at x)."""
    ex = Exponents(s=s, p=p, s1=s1, p1=p1)
    ex.check_fractional()
    with _Timer() as t:
        lhs = radial_deviation_integral(field, domain, x, s, p, h)
        sharp = sharp_maximal(field, domain, x, h)
        inner = gagliardo_inner(field, domain, x, s1, p1, h)
        k = _kappa(domain, h)
    factors = {"bmo": sharp ** (p - p1), "gagliardo_s1p1": inner, "kappa": k ** p1}
    return InequalityReport(
        "local-frac", domain.label, field.label, lhs, factors, ex, h, None, None, t.ms,
        _join(f"radial integral starts at r = h = {h:g}", "bmo column holds the sharp maximal function", SUP_BIAS),
        extra={"sharp": sharp, "x": list(np.atleast_1d(x))},
        dimension=field.dimension,
    )


def check_pointwise_higher(field: ScalarField, x, k1: int, sigma1: float, p1: float, window: ConvexDomain,
                           h: float) -> InequalityReport:
    """|f'(x)| against f♯(x)^{1-k1/(k1+sigma1)} (inner Gagliardo of f' at x)^{k1/((k1+sigma1)p1)}."""
    ex = Exponents.higher_order(k1, sigma1, p1)
    ex.check_higher_order()
    if k1 != 1 or window.dimension != 1:
        raise ExponentError("only k1 = 1 in dimension 1 is supported")
    if field.gradient_rule is None or field.second_derivative_rule is None:
        raise ValueError("derivative rules missing: f' and f'' are required")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if not contains(window, x):
        raise ValueError("probe point lies outside the window")
    with _Timer() as t:
        lhs = abs(float(np.asarray(field.gradient_rule(x[None, :]))[0, 0]))
        sharp = sharp_maximal(field, window, x, h)
        inner = gagliardo_inner(field, window, x, sigma1, p1, h, derivative=True)
    theta = k1 / (k1 + sigma1)
    factors = {"bmo": sharp ** (1.0 - theta), "gagliardo_s1p1": inner ** (theta / p1)}
    return InequalityReport(
        "local-higher", window.label, field.label, lhs, factors, ex, h, None, None, t.ms,
        _join("bmo column holds the sharp maximal function", SUP_BIAS, _window_note(window)),
        extra={"sharp": sharp, "inner": inner, "x": list(x)},
        dimension=field.dimension,
    )


# ---------------------------------------------------------------------------
# Constants, sweeps and probes
# ---------------------------------------------------------------------------


def _run_global(statement_id: str, field: ScalarField, domain: ConvexDomain, ex: Exponents, h: float,
                **kw) -> InequalityReport:
    if statement_id == "thm21":
        return verify_first_order_interpolation(field, domain, ex.s, ex.p, h, **kw)
    if statement_id == "thm31":
        return verify_fractional_interpolation(field, domain, ex.s, ex.p, ex.s1, ex.p1, h, **kw)
    if statement_id == "thm41":
        return verify_higher_order_interpolation(field, domain, ex.k1, ex.sigma1, ex.p1, h)
    raise ValueError(f"no global checker for statement {statement_id!r}")


DEFAULT_GRIDS = {
    "thm21": (Exponents(0.6, 2.0), Exponents(0.75, 2.0), Exponents(0.9, 2.0)),
    "thm31": (Exponents(0.6, 2.0, 0.8, 1.5),),
    "thm41": (Exponents.higher_order(1, 0.5, 2.0),),
}


def _param_key(ex: Exponents) -> str:
    parts = [f"s={ex.s:g}", f"p={ex.p:g}"]
    for name in ("s1", "p1", "k1", "sigma1"):
        v = getattr(ex, name)
        if v is not None:
            parts.append(f"{name}={v:g}")
    return ",".join(parts)


def _entries(corpus: Iterable) -> list[ScalarField]:
    return [e.field if isinstance(e, CorpusEntry) else e for e in corpus]


def _max_ratio(reports: Sequence[InequalityReport]) -> tuple[float, dict]:
    per = {}
    for r in reports:
        if r.ratio is None:
            continue
        key = _param_key(r.exponents)
        per[key] = max(per.get(key, 0.0), r.ratio)
    if not per:
        raise ValueError("every corpus member is degenerate; no constant can be estimated")
    return max(per.values()), per


def estimate_constant(statement_id: str, domain: ConvexDomain, corpus: Iterable, grid: Sequence[Exponents] | None,
                      h: float, refine: bool = True,
                      corpus_at: Callable[[float], Iterable] | None = None) -> ConstantEstimate:
    """c_emp = max ratio over corpus × exponent grid at ``h``.

    With ``refine`` the estimate is repeated at ``h / 2`` and the relative
    change reported as the drift. ``corpus_at(h)`` rebuilds the corpus for
    a resolution when members depend on it (e.g. the capped logarithm).
    """
    grid = tuple(grid or DEFAULT_GRIDS[statement_id])
    fields = _entries(corpus)
    reports = [_run_global(statement_id, f, domain, ex, h) for f in fields for ex in grid]
    c, per = _max_ratio(reports)
    drift = None
    fine = []
    if refine:
        fine_fields = _entries(corpus_at(h / 2)) if corpus_at else fields
        fine = [_run_global(statement_id, f, domain, ex, h / 2) for f in fine_fields for ex in grid]
        c_fine, _ = _max_ratio(fine)
        drift = abs(c_fine - c) / c
    return ConstantEstimate(statement_id, c, len(fields), drift, per, tuple(reports), tuple(fine))


SWEEP_AXES = ("s", "p", "s1", "p1", "sigma1")


def skipped_report(statement_id: str, domain: ConvexDomain, field: ScalarField, ex: Exponents, h: float,
                   reason: str) -> InequalityReport:
    return InequalityReport(statement_id, domain.label, field.label, None, {}, ex, h,
                            bias_notes=f"skipped: {reason}", skipped=reason, dimension=domain.dimension)


def sweep(statement_id: str, domain: ConvexDomain, field: ScalarField, axis: str, values: Sequence[float],
          h: float, base: Exponents | None = None, include_blowup: bool = True) -> list[InequalityReport]:
    """One report per value of ``axis``, in input order; invalid exponents
    give a skipped report carrying the reason."""
    if axis not in SWEEP_AXES:
        raise ValueError(f"axis must be one of {SWEEP_AXES}")
    base = base or DEFAULT_GRIDS[statement_id][0]
    out = []
    for v in values:
        kw = {k: getattr(base, k) for k in ("s", "p", "s1", "p1", "k1", "sigma1")}
        kw[axis] = float(v)
        if statement_id == "thm41":
            ex = Exponents.higher_order(kw["k1"], kw["sigma1"], kw["p1"])
        else:
            ex = Exponents(**kw)
        try:
            extra = {"include_blowup": include_blowup} if statement_id == "thm21" else {}
            out.append(_run_global(statement_id, field, domain, ex, h, **extra))
        except ExponentError as exc:
            out.append(skipped_report(statement_id, domain, field, ex, h, str(exc)))
    return out


def probe_points(domain: ConvexDomain, n: int, seed: int, margin: float = 0.0) -> np.ndarray:
    """``n`` seeded uniform points of the domain at distance ≥ margin from its boundary."""
    rng = np.random.default_rng(seed)
    d = domain.dimension
    if domain.kind == "disk":
        cx, cy, R = domain.bounds
        if margin >= R:
            raise ValueError("margin leaves no admissible probe")
        rad = (R - margin) * np.sqrt(rng.random(n))
        ang = 2 * math.pi * rng.random(n)
        return np.stack([cx + rad * np.cos(ang), cy + rad * np.sin(ang)], axis=1)
    lo, hi = domain.lower + margin, domain.upper - margin
    if np.any(hi <= lo):
        raise ValueError("margin leaves no admissible probe")
    pts = lo + (hi - lo) * rng.random((n, d))
    # keep probes strictly inside the open set
    return np.clip(pts, np.nextafter(domain.lower, np.inf), np.nextafter(domain.upper, -np.inf))


def random_triangle_cases(domain: ConvexDomain, n: int, seed: int, h: float, knots: int = 8):
    """``n`` seeded (field, A, B, C) cases: continuous piecewise-linear fields
    on a 1-d domain and three random ball regions."""
    if domain.dimension != 1:
        raise ValueError("random triangle cases are generated on 1-d domains")
    rng = np.random.default_rng(seed)
    a, b = float(domain.lower[0]), float(domain.upper[0])
    diam = b - a
    cases = []
    for i in range(n):
        k = np.sort(np.concatenate([[a, b], a + diam * rng.random(knots - 2)]))
        v = rng.normal(size=knots)
        f = piecewise_linear(k, v, domain, label=f"pwlinear{i}")
        regions = []
        for _ in range(3):
            c = a + diam * (0.001 + 0.998 * rng.random())
            r = 2 * h + (0.5 * diam - 2 * h) * rng.random()
            regions.append(BallRegion(domain, [c], r))
        cases.append((f, *regions))
    return cases
