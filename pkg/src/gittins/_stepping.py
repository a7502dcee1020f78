"""Shared machinery for backward value iteration on a uniform z-grid.

One Gaussian propagation step E[V(z + sqrt(h) * eps)] is evaluated by
Gauss-Hermite quadrature.  Because the z-grid is uniform, each quadrature
node is a constant shift of the grid, so linear interpolation reduces to
two slices of an edge-padded copy of the value array.  Values beyond the
grid edges are clamped (constant extrapolation).
"""

from __future__ import annotations

import numpy as np


def gauss_hermite_rule(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Unit-variance Gaussian quadrature: E[f(eps)] ~ sum(w * f(x))."""
    nodes, weights = np.polynomial.hermite.hermgauss(order)
    x = np.sqrt(2.0) * nodes
    w = weights / weights.sum()  # renormalize so the rule integrates 1 exactly
    return x, w


def gaussian_step(values: np.ndarray, dz: float, h: float,
                  nodes: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """E[V(z + sqrt(h) * eps)] on the grid carrying `values`, eps ~ N(0, 1)."""
    offsets = np.sqrt(h) * nodes
    k = np.floor(offsets / dz).astype(np.int64)
    frac = offsets / dz - k
    pad = int(np.max(np.abs(k))) + 1
    vp = np.pad(values, pad, mode="edge")
    n = values.shape[0]
    out = np.zeros_like(values)
    for ki, fi, wi in zip(k, frac, weights):
        lo = vp[pad + ki: pad + ki + n]
        hi = vp[pad + ki + 1: pad + ki + 1 + n]
        out += wi * ((1.0 - fi) * lo + fi * hi)
    return out


def extract_boundary(z: np.ndarray, premium: np.ndarray, tol: float,
                     refine: bool = True) -> tuple[float, int]:
    """Locate the smallest z at which the continuation premium vanishes.

    `premium` is V - g >= 0, nonincreasing to 0 at the boundary.  Returns the
    boundary estimate and the index of the first grid point in the stopping
    region.  When `refine` is set, the crossing is sharpened by linear
    extrapolation through the last two strictly positive premiums (clamped
    to the bracketing cell), otherwise the grid point itself is reported.
    Raises IndexError if no grid point has premium <= tol.
    """
    hits = np.flatnonzero(premium <= tol)
    if hits.size == 0:
        raise IndexError("no stopping point on the grid")
    j = int(hits[0])
    b = float(z[j])
    if refine and j >= 2:
        d1, d2 = float(premium[j - 2]), float(premium[j - 1])
        if d1 > d2 > tol:
            cross = z[j - 1] + (z[j - 1] - z[j - 2]) * d2 / (d1 - d2)
            b = float(min(max(cross, z[j - 1]), z[j]))
    return b, j
