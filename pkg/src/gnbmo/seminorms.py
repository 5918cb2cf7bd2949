"""Seminorms, maximal functions and oscillation averages on node sets.

Local averages over ``domain ∩ B_r(x)`` weight each node by the fraction
of its cell inside the ball, so averages of smooth fields are accurate for
radii down to the lattice step. All radius sups share the grid returned by
``geometry.radius_grid``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _scan
from .field import ScalarField, node_gradients
from .geometry import ConvexDomain, ball_volume, contains, diameter, radius_grid
from .quadrature import NodeSet, QuadratureError, domain_nodes, pair_sum

KINDS = ("gagliardo-p-power", "bmo", "lp-gradient", "maximal", "sharp-maximal", "oscillation")


class ExponentError(ValueError):
    """Exponents outside the hypothesis region of the requested inequality."""


@dataclass(frozen=True)
class Exponents:
    s: float
    p: float
    s1: float | None = None
    p1: float | None = None
    k1: int | None = None
    sigma1: float | None = None

    def check_first_order(self) -> None:
        """Hypotheses of the BMO / first-order Sobolev interpolation."""
        if not 1 < self.p < math.inf:
            raise ExponentError("requires p ∈ (1, ∞)")
        if self.s * self.p <= 1:
            raise ExponentError("requires s ∈ (1/p, 1) (sp ≤ 1)")
        if self.s >= 1:
            raise ExponentError("requires s ∈ (1/p, 1) (s ≥ 1)")

    def check_fractional(self) -> None:
        """Hypotheses of the BMO / fractional Sobolev interpolation."""
        if self.s1 is None or self.p1 is None:
            raise ExponentError("requires s1 and p1")
        if not (0 < self.s < 1 and 0 < self.s1 < 1):
            raise ExponentError("requires s, s1 ∈ (0, 1)")
        if not (1 < self.p < math.inf and 1 < self.p1 < math.inf):
            raise ExponentError("requires p, p1 ∈ (1, ∞)")
        if not self.s < self.s1:
            raise ExponentError("requires s < s1")
        if not math.isclose(self.s1 * self.p1, self.s * self.p, rel_tol=1e-12):
            raise ExponentError("requires s1·p1 = s·p")

    def check_higher_order(self) -> None:
        """Hypotheses of the higher-order estimate, with p = k1 + sigma1 times p1 / k1."""
        if self.k1 is None or self.sigma1 is None or self.p1 is None:
            raise ExponentError("requires k1, sigma1 and p1")
        if self.k1 < 1 or int(self.k1) != self.k1:
            raise ExponentError("requires k1 a positive integer")
        if not 0 < self.sigma1 < 1:
            raise ExponentError("requires sigma1 ∈ (0, 1)")
        if not (1 < self.p1 < math.inf and 1 < self.p < math.inf):
            raise ExponentError("requires p, p1 ∈ (1, ∞)")
        if not math.isclose(self.k1 * self.p, (self.k1 + self.sigma1) * self.p1, rel_tol=1e-12):
            raise ExponentError("requires k1·p = (k1 + sigma1)·p1")

    @classmethod
    def higher_order(cls, k1: int, sigma1: float, p1: float) -> Exponents:
        return cls(s=float(k1), p=(k1 + sigma1) * p1 / k1, p1=p1, k1=k1, sigma1=sigma1)


@dataclass(frozen=True)
class SeminormValue:
    value: float
    error_estimate: float
    resolution: float
    kind: str
    notes: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown seminorm kind {self.kind!r}")


@dataclass(frozen=True)
class BallRegion:
    """``domain ∩ B_radius(center)`` as an integration region."""

    domain: ConvexDomain
    center: tuple
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in np.atleast_1d(self.center)))
        if self.radius <= 0:
            raise ValueError("region radius must be positive")


# ---------------------------------------------------------------------------
# Node-level helpers
# ---------------------------------------------------------------------------


@lru_cache(maxsize=32)
def _cached_nodes(domain: ConvexDomain, h: float) -> NodeSet:
    nodes = domain_nodes(domain, h)
    for arr in (nodes.points, nodes.weights, nodes.index):
        arr.setflags(write=False)
    return nodes


def nodes_for(domain: ConvexDomain, h: float) -> NodeSet:
    return _cached_nodes(domain, float(h))


def ball_weights(nodes: NodeSet, x, r) -> np.ndarray:
    """Cell measure inside B_r(x) for every node; r may be an array (R,)
    giving an (R, N) result."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    dist = np.linalg.norm(nodes.points - x, axis=1)
    r = np.asarray(r, dtype=float)
    if r.ndim == 0:
        return nodes.weights * _scan.coverage(r, dist, nodes.h)
    return nodes.weights[None, :] * _scan.coverage(r[:, None], dist[None, :], nodes.h)


def region_weights(region: BallRegion, h: float) -> np.ndarray:
    nodes = nodes_for(region.domain, h)
    w = ball_weights(nodes, region.center, region.radius)
    if not np.any(w > 0):
        raise ValueError("region contains no quadrature node at this resolution")
    return w


def cross_oscillation(values: np.ndarray, wa: np.ndarray, wb: np.ndarray) -> float:
    """sum_ij wa_i wb_j |f_i - f_j| / (sum wa * sum wb) in O(n log n)."""
    ta, tb = math.fsum(wa), math.fsum(wb)
    if ta <= 0 or tb <= 0:
        raise ValueError("empty region")
    order = np.argsort(values, kind="stable")
    v, a, b = values[order], wa[order], wb[order]
    cb = np.cumsum(b)
    cbv = np.cumsum(b * v)
    tb_, tbv = cb[-1], cbv[-1]
    # sum_j b_j |v_i - v_j| = v_i (2 B_le - B) - (2 S_le - S)
    per_i = v * (2.0 * cb - tb_) - (2.0 * cbv - tbv)
    return max(math.fsum(a * per_i), 0.0) / (ta * tb)


def snap_to_node(nodes: NodeSet, x) -> int:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    return int(np.argmin(np.linalg.norm(nodes.points - x, axis=1)))


def _require_inside(domain: ConvexDomain, x) -> np.ndarray:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.shape != (domain.dimension,):
        raise ValueError(f"expected a point of dimension {domain.dimension}")
    if not contains(domain, x):
        raise ValueError("point lies outside the domain")
    return x


# ---------------------------------------------------------------------------
# Gagliardo seminorm
# ---------------------------------------------------------------------------


@lru_cache(maxsize=64)
def _cell_table_2d(q: float, p: float, n_theta: int = 257, n_phi: int = 8192) -> np.ndarray:
    phi = (np.arange(n_phi) + 0.5) * (2 * math.pi / n_phi)
    a, b = np.abs(np.cos(phi)), np.abs(np.sin(phi))
    R = 1.0 / np.maximum(a, b)
    radial = R ** q / q - (a + b) * R ** (q + 1) / (q + 1) + a * b * R ** (q + 2) / (q + 2)
    theta = np.linspace(0.0, math.pi / 4, n_theta)
    ang = np.abs(np.cos(phi[None, :] - theta[:, None])) ** p
    return (ang * radial[None, :]).sum(axis=1) * (2 * math.pi / n_phi)


def cell_self_constant(d: int, s: float, p: float, direction=None) -> np.ndarray | float:
    """K with  ∬_{Q×Q} |e·(y-x)|^p / |y-x|^{d+sp} = K h^{d+(1-s)p}  for a cube
    Q of side h and a unit vector e (one direction per row in 2-d)."""
    q = (1.0 - s) * p
    if q <= 0:
        raise ValueError("self-cell constant needs (1 - s) p > 0")
    if d == 1:
        return 2.0 / (q * (q + 1.0))
    table = _cell_table_2d(q, p)
    e = np.atleast_2d(direction)
    theta = np.mod(np.arctan2(e[:, 1], e[:, 0]), math.pi / 2)
    theta = np.where(theta > math.pi / 4, math.pi / 2 - theta, theta)
    grid = np.linspace(0.0, math.pi / 4, len(table))
    return np.interp(theta, grid, table)


def self_cell_correction(grad: np.ndarray, nodes: NodeSet, s: float, p: float) -> tuple[float, int]:
    """Analytic same-cell mass for a locally linear field.

    Returns the correction and the number of nodes without a gradient,
    which contribute nothing.
    """
    d = nodes.points.shape[1]
    mag = np.linalg.norm(grad, axis=1)
    missing = int(np.sum(~np.isfinite(mag)))
    mag = np.where(np.isfinite(mag), mag, 0.0)
    h_cell = float(np.prod(nodes.steps)) ** (1.0 / d)
    q = (1.0 - s) * p
    if d == 1:
        K = cell_self_constant(1, s, p)
    else:
        safe = np.where(mag[:, None] > 0, grad, np.array([1.0, 0.0]))
        safe = np.where(np.isfinite(safe), safe, 1.0)
        K = cell_self_constant(2, s, p, safe)
    terms = nodes.weights * mag ** p * K * h_cell ** q
    return math.fsum(terms), missing


def _gagliardo_sum(values_fn, grad_fn, nodes: NodeSet, s: float, p: float, correct: bool) -> tuple[float, str]:
    d = nodes.points.shape[1]
    expo = d + s * p

    def kernel(x, y):
        diff = np.abs(values_fn(y) - values_fn(x))
        dist2 = np.sum((y - x) ** 2, axis=-1)
        with np.errstate(divide="ignore", invalid="ignore"):
            return diff ** p / dist2 ** (0.5 * expo)

    total = pair_sum(kernel, nodes, symmetric=True)
    note = ""
    if correct:
        corr, missing = self_cell_correction(grad_fn(nodes.points), nodes, s, p)
        total += corr
        if missing:
            note = f"self-cell correction skipped at {missing} boundary nodes"
    return total, note


def gagliardo_p_power(
    field: ScalarField,
    domain: ConvexDomain,
    s: float,
    p: float,
    h: float,
    refine: bool = False,
    correct: bool = True,
) -> SeminormValue:
    """∬_{Ω×Ω} |f(y) - f(x)|^p / |y - x|^{d+sp} (the p-th power, no root).

    Same-node pairs are excluded from the midpoint pair sum; unless
    ``correct`` is False their mass is restored analytically from the node
    gradient, which removes the O(h^{(1-s)p}) diagonal bias.
    """
    if not (0 < s < 1) or p < 1:
        raise ExponentError("Gagliardo seminorm needs s ∈ (0, 1) and p ≥ 1")

    def run(step):
        nodes = nodes_for(domain, step)
        return _gagliardo_sum(
            field.values,
            lambda pts: node_gradients(field, pts, nodes.h, allow_missing=True),
            nodes, s, p, correct,
        )

    value, note = run(h)
    err = 0.0
    if refine:
        fine, _ = run(h / 2)
        err = abs(fine - value)
    return SeminormValue(value, err, nodes_for(domain, h).h, "gagliardo-p-power", note)


def gagliardo_derivative_p_power(field: ScalarField, domain: ConvexDomain, sigma: float, p: float, h: float,
                                 correct: bool = True) -> SeminormValue:
    """Gagliardo seminorm of f' for a 1-d field with analytic f' and f''."""
    if field.dimension != 1 or field.gradient_rule is None or field.second_derivative_rule is None:
        raise ValueError("derivative Gagliardo seminorm needs a 1-d field with f' and f'' rules")
    nodes = nodes_for(domain, h)
    g1, g2 = field.gradient_rule, field.second_derivative_rule
    value, note = _gagliardo_sum(
        lambda x: np.asarray(g1(x))[..., 0],
        lambda pts: np.asarray(g2(pts)).reshape(-1, 1),
        nodes, sigma, p, correct,
    )
    return SeminormValue(value, 0.0, nodes.h, "gagliardo-p-power", note)


def gagliardo_inner(field: ScalarField, domain: ConvexDomain, x, s: float, p: float, h: float,
                    derivative: bool = False) -> float:
    """∫_Ω |f(y) - f(x)|^p / |y - x|^{d+sp} dy at one point.

    The cube of one lattice step centered at x is integrated analytically
    from the linearization at x; node cells overlapping it keep only their
    uncovered share. With ``derivative`` the integrand
    uses f' and the linearization uses f'' (1-d only).
    """
    x = _require_inside(domain, x)
    nodes = nodes_for(domain, h)
    d = domain.dimension
    if derivative:
        vals = np.asarray(field.gradient_rule(nodes.points))[:, 0]
        fx = float(np.asarray(field.gradient_rule(x[None, :]))[0, 0])
        gx = np.asarray(field.second_derivative_rule(x[None, :])).reshape(1, 1)
    else:
        vals = field.values(nodes.points)
        fx = float(field.values(x[None, :])[0])
        gx = node_gradients(field, x[None, :], nodes.h, allow_missing=True)
    h_cell = float(np.prod(nodes.steps)) ** (1.0 / d)
    dist = np.linalg.norm(nodes.points - x, axis=1)
    # share of each node cell covered by the cube of side h_cell centered at x
    overlap = np.prod(np.clip(1.0 - np.abs(nodes.points - x) / h_cell, 0.0, 1.0), axis=1)
    keep = 1.0 - overlap
    with np.errstate(divide="ignore", invalid="ignore"):
        kern = np.abs(vals - fx) ** p / dist ** (d + s * p)
    terms = np.where(keep > 0, kern * keep, 0.0)
    total = math.fsum(terms * nodes.weights)
    mag = float(np.linalg.norm(gx))
    if np.isfinite(mag) and mag > 0:
        # the cube of side h centered at x, with f replaced by its linearization
        total += mag ** p * centered_cell_constant(d, s, p, gx) * h_cell ** ((1.0 - s) * p)
    if not np.isfinite(total):
        raise QuadratureError("inner Gagliardo integral is not finite at this point")
    return total


@lru_cache(maxsize=64)
def _centered_table_2d(q: float, p: float, n_theta: int = 257, n_phi: int = 8192) -> np.ndarray:
    phi = (np.arange(n_phi) + 0.5) * (2 * math.pi / n_phi)
    R = 0.5 / np.maximum(np.abs(np.cos(phi)), np.abs(np.sin(phi)))
    theta = np.linspace(0.0, math.pi / 4, n_theta)
    ang = np.abs(np.cos(phi[None, :] - theta[:, None])) ** p
    return (ang * (R ** q / q)[None, :]).sum(axis=1) * (2 * math.pi / n_phi)


def centered_cell_constant(d: int, s: float, p: float, direction=None) -> float:
    """K with  ∫_{[-h/2,h/2]^d} |e·u|^p / |u|^{d+sp} du = K h^{(1-s)p}  for a unit vector e."""
    q = (1.0 - s) * p
    if d == 1:
        return 2.0 * 0.5 ** q / q
    e = np.asarray(direction, dtype=float).reshape(-1)
    theta = math.atan2(e[1], e[0]) % (math.pi / 2)
    theta = min(theta, math.pi / 2 - theta)
    table = _centered_table_2d(q, p)
    return float(np.interp(theta, np.linspace(0.0, math.pi / 4, len(table)), table))


# ---------------------------------------------------------------------------
# BMO and maximal functions
# ---------------------------------------------------------------------------


def _scan_all(field: ScalarField, domain: ConvexDomain, h: float, centers_idx=None) -> tuple[np.ndarray, NodeSet]:
    nodes = nodes_for(domain, h)
    vals = field.values(nodes.points)
    radii = radius_grid(domain, h)
    centers = nodes.points if centers_idx is None else nodes.points[np.atleast_1d(centers_idx)]
    return _scan.oscillation_scan(nodes.points, nodes.weights, vals, centers, radii, nodes.h), nodes


def oscillation_table(field: ScalarField, domain: ConvexDomain, h: float) -> np.ndarray:
    """Double oscillation averages for every (node center, radius)."""
    return _scan_all(field, domain, h)[0]


def bmo_seminorm(field: ScalarField, domain: ConvexDomain, h: float) -> SeminormValue:
    """Discrete sup over node centers and the shared radius grid of the
    double average of |f(y) - f(z)| on domain ∩ B_r(x).

    The discrete sup is a lower bound of the true seminorm. On windows the
    radii stop at the window diameter.
    """
    table, nodes = _scan_all(field, domain, h)
    flat = int(np.argmax(table))  # first maximum: smallest center, then radius
    c, k = divmod(flat, table.shape[1])
    radii = radius_grid(domain, h)
    best = float(table[c, k])
    notes = f"argmax center={np.array2string(nodes.points[c], precision=6)} r={radii[k]:.6g}"
    if domain.is_window:
        notes += f"; radii capped at window diameter {diameter(domain):.6g}"
    return SeminormValue(max(best, 0.0), 0.0, nodes.h, "bmo", notes)


def sharp_maximal(field: ScalarField, domain: ConvexDomain, x, h: float) -> float:
    """Sharp maximal function at the node nearest to x, over the shared radii."""
    x = _require_inside(domain, x)
    nodes = nodes_for(domain, h)
    table, _ = _scan_all(field, domain, h, centers_idx=snap_to_node(nodes, x))
    return max(float(table[0].max()), 0.0)


def lp_gradient_norm_q(field: ScalarField, domain: ConvexDomain, q: float, h: float) -> SeminormValue:
    """∫_Ω |Df|^q by the midpoint rule."""
    nodes = nodes_for(domain, h)
    try:
        grad = node_gradients(field, nodes.points, nodes.h)
    except ValueError as exc:
        raise ValueError(f"gradient unavailable at quadrature nodes: {exc}") from exc
    mag = np.linalg.norm(grad, axis=1)
    return SeminormValue(math.fsum(nodes.weights * mag ** q), 0.0, nodes.h, "lp-gradient")


def _node_magnitudes(g, nodes: NodeSet) -> np.ndarray:
    if isinstance(g, ScalarField):
        return np.abs(g.values(nodes.points))
    arr = np.abs(np.asarray(g, dtype=float))
    if arr.shape != (len(nodes),):
        raise ValueError("node values must have one entry per quadrature node")
    return arr


def maximal_function(g, domain: ConvexDomain, x, h: float) -> float:
    """sup_r |B_r|^{-1} ∫_{Ω∩B_r(x)} |g| over the shared radius grid.

    The normalizer is the full ball measure. ``g`` is a field or an array of
    node values.
    """
    x = _require_inside(domain, x)
    nodes = nodes_for(domain, h)
    mag = _node_magnitudes(g, nodes)
    radii = radius_grid(domain, h)
    W = ball_weights(nodes, x, radii)
    integrals = W @ mag
    return float(np.max(integrals / ball_volume(radii, domain.dimension)))


def gradient_node_magnitudes(field: ScalarField, domain: ConvexDomain, h: float) -> np.ndarray:
    nodes = nodes_for(domain, h)
    try:
        grad = node_gradients(field, nodes.points, nodes.h)
    except ValueError as exc:
        raise ValueError(f"gradient unavailable at quadrature nodes: {exc}") from exc
    return np.linalg.norm(grad, axis=1)


def oscillation_pair_average(field: ScalarField, A: BallRegion, B: BallRegion, h: float) -> float:
    """⨍_A ⨍_B |f(y) - f(x)| dy dx on the shared lattice of A's domain."""
    if A.domain != B.domain:
        raise ValueError("regions must live in the same domain")
    nodes = nodes_for(A.domain, h)
    vals = field.values(nodes.points)
    return cross_oscillation(vals, region_weights(A, h), region_weights(B, h))


def ball_average_deviation_many(field: ScalarField, domain: ConvexDomain, x, radii, h: float) -> np.ndarray:
    x = _require_inside(domain, x)
    nodes = nodes_for(domain, h)
    dev = np.abs(field.values(nodes.points) - float(field.values(x[None, :])[0]))
    W = ball_weights(nodes, x, np.atleast_1d(radii))
    tot = W.sum(axis=1)
    if np.any(tot <= 0):
        raise ValueError("ball contains no quadrature node at this resolution")
    return (W @ dev) / tot


def ball_average_deviation(field: ScalarField, domain: ConvexDomain, x, r: float, h: float) -> float:
    """⨍_{Ω∩B_r(x)} |f(z) - f(x)| dz, with f(x) from the field's own rule."""
    if r <= 0:
        raise ValueError("radius must be positive")
    return float(ball_average_deviation_many(field, domain, x, [r], h)[0])
