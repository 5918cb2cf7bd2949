"""Convex domains in one and two dimensions and their geometric constants.

Every domain kind has a closed-form measure for the intersection with a
Euclidean ball, so ``kappa`` is a sup over exact ratios taken on a
discrete (center, radius) grid.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

KINDS = ("full-space-window", "half-space-window", "interval", "box", "disk")

# Number of log-spaced radii shared by every discretized sup over radii.
N_RADII = 32


def ball_volume(r, d: int):
    """Lebesgue measure of a radius-``r`` ball in dimension ``d``."""
    r = np.asarray(r, dtype=float)
    if d == 1:
        return 2.0 * r
    if d == 2:
        return math.pi * r * r
    raise ValueError(f"unsupported dimension {d}")


@dataclass(frozen=True)
class ConvexDomain:
    """An open convex subset of R^d, d in {1, 2}.

    ``bounds`` is ``(a, b)`` for an interval, ``(a1, b1, a2, b2)`` for boxes
    and windows (one pair per axis) and ``(cx, cy, R)`` for a disk. Windows
    stand in for the unbounded model domains: the window is only used to
    discretize, the analytic kappa is attached.
    """

    kind: str
    bounds: tuple
    dimension: int

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown domain kind {self.kind!r}")
        if self.dimension not in (1, 2):
            raise ValueError("only d = 1 and d = 2 are supported")
        object.__setattr__(self, "bounds", tuple(float(b) for b in self.bounds))
        if self.kind == "disk":
            if self.dimension != 2 or len(self.bounds) != 3 or self.bounds[2] <= 0:
                raise ValueError("disk needs (cx, cy, R) with R > 0")
        else:
            if len(self.bounds) != 2 * self.dimension:
                raise ValueError(f"{self.kind} needs {2 * self.dimension} bounds")
            lo, hi = self.lower, self.upper
            if np.any(hi <= lo):
                raise ValueError("empty box: every upper bound must exceed the lower bound")
            if self.kind == "half-space-window" and lo[-1] != 0.0:
                raise ValueError("half-space window must start at x_d = 0")
        if self.kind == "interval" and self.dimension != 1:
            raise ValueError("interval is one-dimensional")

    # -- constructors -----------------------------------------------------

    @classmethod
    def interval(cls, a: float, b: float) -> ConvexDomain:
        return cls("interval", (a, b), 1)

    @classmethod
    def box(cls, lower, upper) -> ConvexDomain:
        lower, upper = np.atleast_1d(lower), np.atleast_1d(upper)
        return cls("box", _pairs(lower, upper), len(lower))

    @classmethod
    def disk(cls, center, radius: float) -> ConvexDomain:
        cx, cy = center
        return cls("disk", (cx, cy, radius), 2)

    @classmethod
    def full_space_window(cls, lower, upper) -> ConvexDomain:
        lower, upper = np.atleast_1d(lower), np.atleast_1d(upper)
        return cls("full-space-window", _pairs(lower, upper), len(lower))

    @classmethod
    def half_space_window(cls, lower, upper) -> ConvexDomain:
        lower, upper = np.atleast_1d(lower), np.atleast_1d(upper)
        return cls("half-space-window", _pairs(lower, upper), len(lower))

    # -- derived data -----------------------------------------------------

    @property
    def lower(self) -> np.ndarray:
        if self.kind == "disk":
            cx, cy, R = self.bounds
            return np.array([cx - R, cy - R])
        return np.array(self.bounds[0::2])

    @property
    def upper(self) -> np.ndarray:
        if self.kind == "disk":
            cx, cy, R = self.bounds
            return np.array([cx + R, cy + R])
        return np.array(self.bounds[1::2])

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (self.lower + self.upper)

    @property
    def is_window(self) -> bool:
        return self.kind.endswith("window")

    @property
    def analytic_kappa(self) -> float | None:
        return {"full-space-window": 1.0, "half-space-window": 2.0}.get(self.kind)

    @property
    def measure(self) -> float:
        """Lebesgue measure of the domain (of the window for window kinds)."""
        if self.kind == "disk":
            return math.pi * self.bounds[2] ** 2
        return float(np.prod(self.upper - self.lower))

    @property
    def label(self) -> str:
        names = {
            "interval": "interval",
            "box": "box",
            "disk": "disk",
            "full-space-window": "fullspace",
            "half-space-window": "halfspace",
        }
        return f"{names[self.kind]}({','.join(_fmt(b) for b in self.bounds)})"

    def translated(self, c) -> ConvexDomain:
        c = np.atleast_1d(np.asarray(c, dtype=float))
        if self.kind == "disk":
            cx, cy, R = self.bounds
            return ConvexDomain("disk", (cx + c[0], cy + c[1], R), 2)
        return ConvexDomain(self.kind, _pairs(self.lower + c, self.upper + c), self.dimension)

    def scaled(self, lam: float) -> ConvexDomain:
        """The dilation ``lam * domain``."""
        if lam <= 0:
            raise ValueError("dilation factor must be positive")
        if self.kind == "disk":
            cx, cy, R = self.bounds
            return ConvexDomain("disk", (lam * cx, lam * cy, lam * R), 2)
        return ConvexDomain(self.kind, _pairs(lam * self.lower, lam * self.upper), self.dimension)


def _pairs(lower, upper) -> tuple:
    if len(lower) != len(upper):
        raise ValueError("lower and upper bounds differ in length")
    out = []
    for a, b in zip(lower, upper):
        out += [float(a), float(b)]
    return tuple(out)


def _fmt(x: float) -> str:
    return f"{x:.12g}"


_DOMAIN_RE = re.compile(r"^\s*([a-z\-]+)\s*\(([^)]*)\)\s*$")


def parse_domain(text: str) -> ConvexDomain:
    """Parse ``interval(0,1)``, ``box(0,1,0,1)``, ``disk(0,0,1)``,
    ``fullspace(-1,1)`` or ``halfspace(-1,1,0,1)``; bare ``interval``,
    ``square`` and ``disk`` name the unit sets."""
    bare = {"interval": "interval(0,1)", "square": "square(0,1)", "disk": "disk(0,0,1)"}
    text = bare.get(text.strip(), text)
    m = _DOMAIN_RE.match(text)
    if not m:
        raise ValueError(f"cannot parse domain {text!r}")
    name, args = m.group(1), m.group(2)
    try:
        vals = [float(v) for v in args.split(",") if v.strip()]
    except ValueError as exc:
        raise ValueError(f"non-numeric bound in {text!r}") from exc
    if name in ("strip", "parabola", "epigraph"):
        raise ValueError(f"{name}: unbounded convex set with infinite kappa is not supported")
    if name == "interval":
        if len(vals) != 2:
            raise ValueError("interval(a,b) takes two bounds")
        return ConvexDomain.interval(*vals)
    if name == "square":
        if len(vals) != 2:
            raise ValueError("square(a,b) takes two bounds")
        return ConvexDomain.box([vals[0]] * 2, [vals[1]] * 2)
    if name in ("box", "fullspace", "halfspace"):
        if len(vals) not in (2, 4):
            raise ValueError(f"{name} takes 2 (d=1) or 4 (d=2) bounds")
        kind = {"box": "box", "fullspace": "full-space-window", "halfspace": "half-space-window"}[name]
        return ConvexDomain(kind, tuple(vals), len(vals) // 2)
    if name == "disk":
        if len(vals) != 3:
            raise ValueError("disk(cx,cy,R) takes three numbers")
        return ConvexDomain.disk(vals[:2], vals[2])
    raise ValueError(f"unknown domain kind {name!r}")


# ---------------------------------------------------------------------------
# Membership and diameter
# ---------------------------------------------------------------------------


def _as_points(domain: ConvexDomain, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if domain.dimension == 1 and x.ndim == 0:
        x = x.reshape(1)
    if x.shape[-1] != domain.dimension:
        raise ValueError(
            f"point of dimension {x.shape[-1]} given for a {domain.dimension}-d domain"
        )
    if not np.all(np.isfinite(x)):
        raise ValueError("point coordinates must be finite")
    return x


def contains(domain: ConvexDomain, x) -> bool | np.ndarray:
    """Open-set membership. Accepts one point or an array of shape (..., d)."""
    x = _as_points(domain, x)
    if domain.kind == "disk":
        cx, cy, R = domain.bounds
        inside = (x[..., 0] - cx) ** 2 + (x[..., 1] - cy) ** 2 < R * R
    else:
        inside = np.all((x > domain.lower) & (x < domain.upper), axis=-1)
    return bool(inside) if np.ndim(inside) == 0 else inside


def diameter(domain: ConvexDomain) -> float:
    if domain.kind == "disk":
        return 2.0 * domain.bounds[2]
    return float(np.linalg.norm(domain.upper - domain.lower))


def radius_grid(domain: ConvexDomain, h: float) -> np.ndarray:
    """The shared grid of log-spaced radii from ``h`` to the diameter."""
    diam = diameter(domain)
    if not 0 < h < diam:
        raise ValueError("resolution must lie in (0, diam)")
    return np.geomspace(h, diam, N_RADII)


# ---------------------------------------------------------------------------
# Ball intersections
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BallIntersection:
    center: tuple
    radius: float
    measure: float


def _chord_primitive(t, r):
    # antiderivative of sqrt(r^2 - t^2)
    s = np.sqrt(np.maximum(r * r - t * t, 0.0))
    return 0.5 * (t * s + r * r * np.arcsin(np.clip(t / r, -1.0, 1.0)))


def _quadrant_area(X, Y, r):
    """Area of {|u| < r, u1 < X, u2 < Y} for a disk centered at the origin."""
    X = np.clip(X, -r, r)
    Yc = np.clip(Y, -r, r)
    ts = np.sqrt(np.maximum(r * r - Yc * Yc, 0.0))

    def upto(b, a):
        return np.maximum(np.minimum(b, X), a)

    # |t| > ts: chord fully below Y when Y >= 0, fully above when Y < 0
    left_hi = upto(-ts, -r)
    right_hi = upto(r, ts)
    outer = 2.0 * (
        _chord_primitive(left_hi, r) - _chord_primitive(-r, r)
        + _chord_primitive(right_hi, r) - _chord_primitive(ts, r)
    )
    outer = np.where(Yc >= 0, outer, 0.0)
    mid_hi = upto(ts, -ts)
    inner = Yc * (mid_hi + ts) + _chord_primitive(mid_hi, r) - _chord_primitive(-ts, r)
    return outer + inner


def _rect_disk_area(lo, hi, x, r):
    a1, a2 = lo[0] - x[..., 0], lo[1] - x[..., 1]
    b1, b2 = hi[0] - x[..., 0], hi[1] - x[..., 1]
    area = (
        _quadrant_area(b1, b2, r) - _quadrant_area(a1, b2, r)
        - _quadrant_area(b1, a2, r) + _quadrant_area(a1, a2, r)
    )
    return np.maximum(area, 0.0)


def _lens_area(dist, r, R):
    dist = np.asarray(dist, dtype=float)
    r, R = np.broadcast_arrays(np.asarray(r, float), np.asarray(R, float))
    out = np.zeros(np.broadcast(dist, r).shape)
    dist = np.broadcast_to(dist, out.shape)
    r = np.broadcast_to(r, out.shape)
    R = np.broadcast_to(R, out.shape)
    small = np.minimum(r, R)
    contained = dist <= np.abs(R - r)
    out[contained] = math.pi * small[contained] ** 2
    part = (~contained) & (dist < r + R)
    d, rr, RR = dist[part], r[part], R[part]
    c1 = np.clip((d * d + rr * rr - RR * RR) / (2 * d * rr), -1.0, 1.0)
    c2 = np.clip((d * d + RR * RR - rr * rr) / (2 * d * RR), -1.0, 1.0)
    k = (-d + rr + RR) * (d + rr - RR) * (d - rr + RR) * (d + rr + RR)
    out[part] = rr * rr * np.arccos(c1) + RR * RR * np.arccos(c2) - 0.5 * np.sqrt(np.maximum(k, 0.0))
    return out


def _intersection_measure(domain: ConvexDomain, x: np.ndarray, r) -> np.ndarray:
    """Vectorized closed-form measure of domain ∩ B_r(x); x shape (..., d)."""
    r = np.asarray(r, dtype=float)
    d = domain.dimension
    kind = domain.kind
    if kind == "full-space-window":
        return np.broadcast_to(ball_volume(r, d), np.broadcast(x[..., 0], r).shape).copy()
    if kind == "half-space-window":
        t = x[..., -1]
        if d == 1:
            return r + np.minimum(t, r)
        t = np.minimum(t, r)
        seg = r * r * np.arccos(np.clip(t / r, -1, 1)) - t * np.sqrt(np.maximum(r * r - t * t, 0))
        return math.pi * r * r - seg
    if kind == "disk":
        cx, cy, R = domain.bounds
        dist = np.hypot(x[..., 0] - cx, x[..., 1] - cy)
        return _lens_area(dist, r, R)
    lo, hi = domain.lower, domain.upper
    if d == 1:
        xs = x[..., 0]
        return np.maximum(np.minimum(hi[0], xs + r) - np.maximum(lo[0], xs - r), 0.0)
    return _rect_disk_area(lo, hi, x, r)


def ball_intersection_measure(domain: ConvexDomain, x, r: float, resolution: float | None = None) -> float:
    """Lebesgue measure of ``domain ∩ B_r(x)``.

    All supported kinds have closed forms, so ``resolution`` does not enter
    the result; it is accepted for interface compatibility with callers that
    pass their working resolution. For window kinds the measure is that of
    the unbounded model set (R^d or the half-space), not of the window.
    """
    x = _as_points(domain, x)
    if r <= 0:
        raise ValueError("radius must be positive")
    if not contains(domain, x):
        raise ValueError("center lies outside the domain")
    return float(_intersection_measure(domain, x, r))


def ball_intersection(domain: ConvexDomain, x, r: float) -> BallIntersection:
    m = ball_intersection_measure(domain, x, r)
    return BallIntersection(tuple(np.atleast_1d(x).tolist()), float(r), m)


# ---------------------------------------------------------------------------
# kappa
# ---------------------------------------------------------------------------


def _kappa_probes(domain: ConvexDomain, resolution: float) -> np.ndarray:
    from .quadrature import domain_nodes

    nodes = domain_nodes(domain, resolution).points
    delta = 0.5 * resolution
    if domain.kind == "disk":
        cx, cy, R = domain.bounds
        ang = np.linspace(0.0, 2 * math.pi, 128, endpoint=False)
        ring = np.stack([cx + (R - delta) * np.cos(ang), cy + (R - delta) * np.sin(ang)], axis=1)
        extra = ring
    else:
        lo, hi = domain.lower, domain.upper
        axes = [np.array([lo[a] + delta, hi[a] - delta]) for a in range(domain.dimension)]
        grids = np.meshgrid(*axes, indexing="ij")
        extra = np.stack([g.ravel() for g in grids], axis=1)
    probes = np.concatenate([nodes, extra], axis=0)
    return probes[contains(domain, probes)]


def kappa(domain: ConvexDomain, resolution: float) -> float:
    """Worst-case ratio |B_r(x)| / |domain ∩ B_r(x)| over a discrete grid.

    Centers are the quadrature nodes at ``resolution`` plus probes at
    distance ``resolution / 2`` from the boundary (corners included);
    radii are the shared log-spaced grid. The discrete sup is a lower bound
    of the true value. Window kinds return their attached analytic value.
    """
    if domain.analytic_kappa is not None:
        return domain.analytic_kappa
    probes = _kappa_probes(domain, resolution)
    radii = radius_grid(domain, resolution)
    best = 1.0
    # blocks keep the (probes x radii) working set small
    for start in range(0, len(probes), 4096):
        x = probes[start:start + 4096, None, :]
        meas = _intersection_measure(domain, x, radii[None, :])
        ratio = ball_volume(radii, domain.dimension)[None, :] / meas
        best = max(best, float(ratio.max()))
    return best


def kappa_upper_bound(domain: ConvexDomain) -> float:
    """The convexity bound |B_1| diam^d / |domain| for bounded domains."""
    if domain.is_window:
        raise ValueError("the diameter bound needs a bounded domain")
    d = domain.dimension
    return float(ball_volume(1.0, d)) * diameter(domain) ** d / domain.measure
