"""Center x radius scan of double oscillation averages.

For every center c and radius r_k the scan returns

    sum_ij w_i w_j |f_i - f_j| / (sum_i w_i)^2,   w_i = cell_i * cov(r_k, |x_i - c|),

where ``cov`` is the fraction of a node's cell inside the ball (a linear
ramp of width h across the sphere). Nodes are visited in ascending value
order so each pair contributes ``f_j - f_i >= 0`` through running sums.
"""

from __future__ import annotations

import math

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is an optional accelerator
    njit = None


def coverage(r, dist, h):
    """Fraction of a cell of side h, centered at distance ``dist``, inside B_r."""
    return np.clip((r - dist) / h + 0.5, 0.0, 1.0)


def _scan_numpy(points, weights, values, order, centers, radii, h):
    out = np.empty((len(centers), len(radii)))
    pts = points[order]
    w = weights[order]
    v = values[order]
    for c, x in enumerate(centers):
        dist = np.sqrt(np.sum((pts - x) ** 2, axis=1))
        W = w[None, :] * coverage(radii[:, None], dist[None, :], h)
        cw = np.cumsum(W, axis=1) - W
        cs = np.cumsum(W * v[None, :], axis=1) - W * v[None, :]
        pair = np.sum(W * (v[None, :] * cw - cs), axis=1)
        tot = W.sum(axis=1)
        out[c] = 2.0 * pair / (tot * tot)
    return out


def _scan_kernel(points, weights, values, order, centers, radii, h):
    C = centers.shape[0]
    R = radii.shape[0]
    N = points.shape[0]
    d = points.shape[1]
    out = np.zeros((C, R))
    acc_w = np.zeros(R)
    acc_s = np.zeros(R)
    pair = np.zeros(R)
    log_ratio = math.log(radii[1] / radii[0]) if R > 1 else 1.0
    for c in range(C):
        for k in range(R):
            acc_w[k] = 0.0
            acc_s[k] = 0.0
            pair[k] = 0.0
        for t in range(N):
            i = order[t]
            dist2 = 0.0
            for a in range(d):
                dd = points[i, a] - centers[c, a]
                dist2 += dd * dd
            dist = math.sqrt(dist2)
            lo = dist - 0.5 * h
            # first radius with positive coverage
            k0 = 0
            if lo > radii[0] and R > 1:
                k0 = int(math.log(lo / radii[0]) / log_ratio)
            if k0 > R:
                k0 = R
            while k0 > 0 and radii[k0 - 1] > lo:
                k0 -= 1
            while k0 < R and radii[k0] <= lo:
                k0 += 1
            v = values[i]
            for k in range(k0, R):
                cov = (radii[k] - dist) / h + 0.5
                if cov <= 0.0:
                    continue
                if cov > 1.0:
                    cov = 1.0
                ww = weights[i] * cov
                pair[k] += ww * (v * acc_w[k] - acc_s[k])
                acc_w[k] += ww
                acc_s[k] += ww * v
        for k in range(R):
            out[c, k] = 2.0 * pair[k] / (acc_w[k] * acc_w[k])
    return out


if njit is not None:
    _scan_compiled = njit(cache=True)(_scan_kernel)
else:  # pragma: no cover
    _scan_compiled = None


def oscillation_scan(points, weights, values, centers, radii, h, accelerated: bool = True) -> np.ndarray:
    """(centers x radii) matrix of double oscillation averages."""
    points = np.ascontiguousarray(points, dtype=float)
    weights = np.ascontiguousarray(weights, dtype=float)
    values = np.ascontiguousarray(values, dtype=float)
    centers = np.ascontiguousarray(np.atleast_2d(centers), dtype=float)
    radii = np.ascontiguousarray(radii, dtype=float)
    order = np.argsort(values, kind="stable")
    if accelerated and _scan_compiled is not None:
        return _scan_compiled(points, weights, values, order, centers, radii, float(h))
    return _scan_numpy(points, weights, values, order, centers, radii, float(h))
