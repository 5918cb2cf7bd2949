"""Scalar test functions and the built-in corpus.

A field is a vectorized rule ``points (..., d) -> values (...)`` with an
optional analytic gradient. Sampled fields wrap a multilinear lattice
interpolant; their gradients fall back to central differences.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field as dc_field
from pathlib import Path
from typing import Callable

import numpy as np

from .geometry import ConvexDomain, contains, diameter

SMOOTHNESS_CLASSES = ("smooth", "lipschitz", "holder", "bmo-unbounded")


@dataclass(frozen=True)
class ScalarField:
    label: str
    dimension: int
    rule: Callable
    gradient_rule: Callable | None = None
    # second derivative of a 1-d field, needed by the higher-order checks
    second_derivative_rule: Callable | None = None
    domain: ConvexDomain | None = None

    def values(self, points) -> np.ndarray:
        """Vectorized evaluation without domain checks; points (..., d)."""
        return np.asarray(self.rule(np.asarray(points, dtype=float)), dtype=float)

    def scaled(self, lam: float) -> ScalarField:
        """The field ``lam * f``."""
        g, g2 = self.gradient_rule, self.second_derivative_rule
        rule = self.rule
        return ScalarField(
            f"{lam:g}*{self.label}",
            self.dimension,
            lambda x: lam * rule(x),
            None if g is None else (lambda x: lam * g(x)),
            None if g2 is None else (lambda x: lam * g2(x)),
            self.domain,
        )

    def translated(self, c) -> ScalarField:
        """``x -> f(x - c)`` on the translated domain."""
        c = np.atleast_1d(np.asarray(c, dtype=float))
        g, g2, rule = self.gradient_rule, self.second_derivative_rule, self.rule
        return ScalarField(
            f"{self.label}(.-c)",
            self.dimension,
            lambda x: rule(x - c),
            None if g is None else (lambda x: g(x - c)),
            None if g2 is None else (lambda x: g2(x - c)),
            None if self.domain is None else self.domain.translated(c),
        )

    def dilated(self, mu: float) -> ScalarField:
        """``x -> f(mu x)`` on the domain ``domain / mu``."""
        g, g2, rule = self.gradient_rule, self.second_derivative_rule, self.rule
        return ScalarField(
            f"{self.label}({mu:g}.)",
            self.dimension,
            lambda x: rule(mu * x),
            None if g is None else (lambda x: mu * g(mu * x)),
            None if g2 is None else (lambda x: mu * mu * g2(mu * x)),
            None if self.domain is None else self.domain.scaled(1.0 / mu),
        )

    @classmethod
    def from_samples(cls, nodes, values, label: str = "samples", domain: ConvexDomain | None = None) -> ScalarField:
        """Grid field on a quadrature node set (see ``quadrature.domain_nodes``)."""
        interp = LatticeInterpolant.from_nodes(nodes, values)
        return cls(label, nodes.points.shape[1], interp, None, None, domain)


@dataclass(frozen=True)
class CorpusEntry:
    field: ScalarField
    smoothness_class: str
    notes: str = ""

    @property
    def label(self) -> str:
        return self.field.label


def _point(field: ScalarField, x) -> np.ndarray:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.shape != (field.dimension,):
        raise ValueError(f"expected a point of dimension {field.dimension}")
    return x


def eval(field: ScalarField, x) -> float:  # noqa: A001 - named after the operation
    """f(x) at a single point of the field's domain."""
    x = _point(field, x)
    if field.domain is not None and not contains(field.domain, x):
        raise ValueError("point lies outside the field's domain")
    return float(field.values(x[None, :])[0])


def gradient(field: ScalarField, x, h: float | None = None) -> np.ndarray:
    """Df(x): analytic when available, else central differences of step h."""
    x = _point(field, x)
    if field.domain is not None and not contains(field.domain, x):
        raise ValueError("point lies outside the field's domain")
    if field.gradient_rule is not None:
        return np.asarray(field.gradient_rule(x[None, :]), dtype=float).reshape(field.dimension)
    return central_difference(field, x[None, :], h)[0]


def central_difference(field: ScalarField, points: np.ndarray, h: float | None) -> np.ndarray:
    if h is None or h <= 0:
        raise ValueError("a positive step is required when no analytic gradient is present")
    d = field.dimension
    out = np.empty(points.shape)
    for a in range(d):
        e = np.zeros(d)
        e[a] = h
        fwd, bwd = points + e, points - e
        if field.domain is not None and not (
            np.all(contains(field.domain, fwd)) and np.all(contains(field.domain, bwd))
        ):
            raise ValueError("point too close to the boundary for the central-difference stencil")
        out[:, a] = (field.values(fwd) - field.values(bwd)) / (2 * h)
    return out


def node_gradients(field: ScalarField, points: np.ndarray, h: float, allow_missing: bool = False) -> np.ndarray:
    """Gradients at many points. With ``allow_missing`` points whose
    difference stencil leaves the domain get NaN rows instead of an error."""
    if field.gradient_rule is not None:
        return np.asarray(field.gradient_rule(points), dtype=float).reshape(points.shape)
    if not allow_missing:
        return central_difference(field, points, h)
    out = np.full(points.shape, np.nan)
    ok = np.ones(len(points), dtype=bool)
    if field.domain is not None:
        for a in range(field.dimension):
            e = np.zeros(field.dimension)
            e[a] = h
            ok &= contains(field.domain, points + e) & contains(field.domain, points - e)
    if ok.any():
        out[ok] = central_difference(field, points[ok], h)
    return out


def gradient_magnitude(field: ScalarField, h: float | None = None) -> ScalarField:
    """|Df| as a field in its own right (input to the maximal function)."""

    def rule(x):
        x = np.asarray(x, dtype=float)
        flat = x.reshape(-1, field.dimension)
        g = node_gradients(field, flat, h)
        return np.linalg.norm(g, axis=-1).reshape(x.shape[:-1])

    return ScalarField(f"|D{field.label}|", field.dimension, rule, None, None, field.domain)


# ---------------------------------------------------------------------------
# Lattice interpolation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LatticeInterpolant:
    """Multilinear interpolation of node-registered samples.

    Missing lattice sites (outside a disk, say) are NaN and dropped from the
    corner average; points beyond the outermost nodes are clamped.
    """

    origin: np.ndarray
    steps: np.ndarray
    grid: np.ndarray = dc_field(repr=False)

    @classmethod
    def from_nodes(cls, nodes, values) -> LatticeInterpolant:
        values = np.asarray(values, dtype=float)
        if values.shape != (len(nodes),):
            raise ValueError("one sample per node is required")
        grid = np.full(nodes.shape, np.nan)
        grid[tuple(nodes.index.T)] = values
        return cls(nodes.origin, nodes.steps, grid)

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        lead = x.shape[:-1]
        flat = x.reshape(-1, x.shape[-1])
        u = (flat - self.origin) / self.steps - 0.5
        near = np.rint(u)
        u = np.where(np.abs(u - near) < 1e-9, near, u)
        shape = np.array(self.grid.shape)
        u = np.clip(u, 0, shape - 1)
        i0 = np.minimum(np.floor(u).astype(int), np.maximum(shape - 2, 0))
        t = u - i0
        d = flat.shape[1]
        num = np.zeros(len(flat))
        den = np.zeros(len(flat))
        for corner in range(1 << d):
            idx = []
            wt = np.ones(len(flat))
            for a in range(d):
                bit = (corner >> a) & 1
                ia = np.minimum(i0[:, a] + bit, shape[a] - 1)
                idx.append(ia)
                wt = wt * (t[:, a] if bit else 1.0 - t[:, a])
            v = self.grid[tuple(idx)]
            valid = ~np.isnan(v)
            num += np.where(valid, wt * np.where(valid, v, 0.0), 0.0)
            den += np.where(valid, wt, 0.0)
        with np.errstate(invalid="ignore", divide="ignore"):
            out = num / den
        if np.any(den == 0):
            raise ValueError("point has no sampled lattice neighbour")
        return out.reshape(lead)


def load_samples_csv(path: str | Path, domain: ConvexDomain, label: str | None = None) -> ScalarField:
    """Read a grid field from a CSV of ``coordinates..., value`` rows.

    The header row is required. Coordinates must lie on a regular lattice.
    """
    from .quadrature import NodeSet

    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ValueError(f"{path}: empty file")
        try:
            float(header[0])
        except ValueError:
            pass
        else:
            raise ValueError(f"{path}: a header row is required")
        rows = [[float(v) for v in row] for row in reader if row]
    d = domain.dimension
    data = np.array(rows, dtype=float)
    if data.ndim != 2 or data.shape[1] != d + 1:
        raise ValueError(f"{path}: expected {d} coordinate columns and one value column")
    pts, vals = data[:, :d], data[:, d]
    if not np.all(contains(domain, pts)):
        raise ValueError(f"{path}: sample outside the domain")
    origin, steps, index = [], [], []
    for a in range(d):
        coords = np.unique(pts[:, a])
        if len(coords) > 1:
            diffs = np.diff(coords)
            step = float(diffs.min())
            k = np.rint((coords - coords[0]) / step)
            if not np.allclose(coords[0] + k * step, coords, rtol=0, atol=1e-9 * max(1.0, abs(step))):
                raise ValueError(f"{path}: axis {a} coordinates are not on a regular lattice")
        else:
            step = diameter(domain)
        steps.append(step)
        origin.append(coords[0] - 0.5 * step)
        index.append(np.rint((pts[:, a] - coords[0]) / step).astype(int))
    index = np.stack(index, axis=1)
    shape = tuple(int(c) for c in index.max(axis=0) + 1)
    steps = np.array(steps)
    nodes = NodeSet(pts, np.full(len(pts), float(np.prod(steps))), float(steps.max()),
                    np.array(origin), steps, shape, index)
    return ScalarField.from_samples(nodes, vals, label or path.stem, domain)


# ---------------------------------------------------------------------------
# Analytic families
# ---------------------------------------------------------------------------


def constant(value: float, dimension: int, domain: ConvexDomain | None = None) -> ScalarField:
    return ScalarField(
        "constant",
        dimension,
        lambda x: np.full(np.shape(x)[:-1], float(value)),
        lambda x: np.zeros(np.shape(x)),
        lambda x: np.zeros(np.shape(x)[:-1]),
        domain,
    )


def affine(slope, offset: float = 0.0, domain: ConvexDomain | None = None, label: str = "affine") -> ScalarField:
    a = np.atleast_1d(np.asarray(slope, dtype=float))
    return ScalarField(
        label,
        len(a),
        lambda x: x @ a + offset,
        lambda x: np.broadcast_to(a, np.shape(x)).copy(),
        lambda x: np.zeros(np.shape(x)[:-1]),
        domain,
    )


def quadratic(domain: ConvexDomain | None = None) -> ScalarField:
    """f(x) = |x|^2."""
    return ScalarField(
        "quadratic",
        1 if domain is None else domain.dimension,
        lambda x: np.sum(x * x, axis=-1),
        lambda x: 2.0 * x,
        lambda x: np.full(np.shape(x)[:-1], 2.0),
        domain,
    )


def bump(center, radius: float, domain: ConvexDomain | None = None) -> ScalarField:
    """exp(-1 / (1 - |u|^2)) with u = (x - center) / radius, zero for |u| >= 1."""
    c = np.atleast_1d(np.asarray(center, dtype=float))
    R = float(radius)

    def parts(x):
        u = (x - c) / R
        rho2 = np.sum(u * u, axis=-1)
        inside = rho2 < 1.0
        denom = np.where(inside, 1.0 - rho2, 1.0)
        val = np.where(inside, np.exp(-1.0 / denom), 0.0)
        return u, rho2, inside, denom, val

    def rule(x):
        return parts(x)[4]

    def grad(x):
        u, _, inside, denom, val = parts(x)
        g = -2.0 * val / (R * denom * denom)
        return np.where(inside[..., None], g[..., None] * u, 0.0)

    def second(x):
        u, rho2, inside, denom, val = parts(x)
        u = u[..., 0]
        g1 = -2.0 * u / (R * denom * denom)
        g2 = -2.0 * (1.0 + 3.0 * u * u) / (R * R * denom ** 3)
        return np.where(inside, val * (g1 * g1 + g2), 0.0)

    return ScalarField("bump", len(c), rule, grad, second if len(c) == 1 else None, domain)


def sinusoid(center, periods, wavenumbers=None, domain: ConvexDomain | None = None) -> ScalarField:
    """sin(theta(x)), theta = sum_a 2 pi k_a (x_a - c_a) / L_a."""
    c = np.atleast_1d(np.asarray(center, dtype=float))
    L = np.atleast_1d(np.asarray(periods, dtype=float))
    k = np.ones_like(c) if wavenumbers is None else np.atleast_1d(np.asarray(wavenumbers, dtype=float))
    omega = 2.0 * math.pi * k / L

    def rule(x):
        return np.sin((x - c) @ omega)

    def grad(x):
        return np.cos((x - c) @ omega)[..., None] * omega

    def second(x):
        return -np.sin((x - c) @ omega) * omega[0] ** 2

    return ScalarField("sinusoid", len(c), rule, grad, second if len(c) == 1 else None, domain)


def power(center, alpha: float, domain: ConvexDomain | None = None) -> ScalarField:
    """|x - center|^alpha; the gradient is set to 0 at the center itself."""
    c = np.atleast_1d(np.asarray(center, dtype=float))

    def rule(x):
        return np.linalg.norm(x - c, axis=-1) ** alpha

    def grad(x):
        v = x - c
        r = np.linalg.norm(v, axis=-1)
        with np.errstate(divide="ignore", invalid="ignore"):
            coef = np.where(r > 0, alpha * r ** (alpha - 2.0), 0.0)
        return coef[..., None] * v

    return ScalarField(f"power{alpha:g}", len(c), rule, grad, None, domain)


def capped_log(center, cap: float, domain: ConvexDomain | None = None) -> ScalarField:
    """ln max(|x - center|, cap): the logarithm frozen inside the cap radius."""
    c = np.atleast_1d(np.asarray(center, dtype=float))
    if cap <= 0:
        raise ValueError("cap distance must be positive")

    def rule(x):
        return np.log(np.maximum(np.linalg.norm(x - c, axis=-1), cap))

    def grad(x):
        v = x - c
        r = np.linalg.norm(v, axis=-1)
        coef = np.where(r > cap, 1.0 / np.where(r > cap, r * r, 1.0), 0.0)
        return coef[..., None] * v

    def second(x):
        r = np.abs(x[..., 0] - c[0])
        return np.where(r > cap, -1.0 / np.where(r > cap, r * r, 1.0), 0.0)

    return ScalarField("log", len(c), rule, grad, second if len(c) == 1 else None, domain)


def piecewise_linear(knots, values, domain: ConvexDomain | None = None, label: str = "pwlinear") -> ScalarField:
    """1-d continuous piecewise-linear interpolant of (knots, values)."""
    k = np.asarray(knots, dtype=float)
    v = np.asarray(values, dtype=float)
    slopes = np.diff(v) / np.diff(k)

    def rule(x):
        return np.interp(x[..., 0], k, v)

    def grad(x):
        i = np.clip(np.searchsorted(k, x[..., 0], side="right") - 1, 0, len(slopes) - 1)
        return slopes[i][..., None]

    return ScalarField(label, 1, rule, grad, None, domain)


def _inradius_about_center(domain: ConvexDomain) -> float:
    if domain.kind == "disk":
        return domain.bounds[2]
    return float(np.min(domain.upper - domain.lower)) / 2.0


def builtin_corpus(domain: ConvexDomain, h: float | None = None) -> list[CorpusEntry]:
    """The standard test functions on ``domain``.

    ``h`` sets the cap distance of the logarithmic entry (one grid step);
    without it the cap is diam / 1000.
    """
    d = domain.dimension
    c = domain.center
    cap = h if h is not None else diameter(domain) / 1000.0
    periods = domain.upper - domain.lower
    slope = [1.0] if d == 1 else [1.0, 0.5]
    log_center = c if d == 1 else np.zeros(2)
    entries = [
        CorpusEntry(constant(3.0, d, domain), "smooth", "degenerate: every seminorm vanishes"),
        CorpusEntry(affine(slope, 0.0, domain), "smooth", "unit gradient along the first axis"),
        CorpusEntry(bump(c, 0.45 * _inradius_about_center(domain), domain), "smooth",
                    "C-infinity, compactly supported inside the domain"),
        CorpusEntry(sinusoid(c, periods, [1.0] if d == 1 else [1.0, 0.5], domain), "smooth",
                    "one period along the first axis"),
        CorpusEntry(power(c, 0.6, domain), "holder", "Hoelder cusp, gradient unbounded at the center"),
        CorpusEntry(power(c, 1.5, domain), "lipschitz", "C^1 with Hoelder gradient"),
        CorpusEntry(capped_log(log_center, cap, domain), "bmo-unbounded",
                    f"logarithm capped at distance {cap:g}; finite BMO, unbounded as the cap shrinks"),
    ]
    return entries


def corpus_field(domain: ConvexDomain, label: str, h: float | None = None) -> ScalarField:
    for entry in builtin_corpus(domain, h):
        if entry.label == label:
            return entry.field
    known = ", ".join(e.label for e in builtin_corpus(domain, h))
    raise KeyError(f"no corpus field {label!r}; known: {known}")
