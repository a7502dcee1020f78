"""Exact Gittins index by backward induction on the constrained stopping problem.

Stopping is allowed only on the ladder s_n = (v0/c) / (1 + v0*n), which
satisfies 1/s_{n+1} - 1/s_n = c exactly: in payoff-normalized form every
step carries the plain discount factor beta.  The index is
u0 + sqrt(c) * b_dp where b_dp is the smallest z in the stopping region at
the root step n = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .model import (ConfigurationError, Discounting, NormalArm, SolverError,
                    make_discounting, normalize)
from .boundary import psi
from ._stepping import extract_boundary, gauss_hermite_rule, gaussian_step

DEGENERATE_V = 1e-12


@dataclass(frozen=True)
class DpConfig:
    """Grid, horizon, and tolerance parameters for the index DP.

    dz is relative to the problem's z-scale min(s0, sqrt(s0)); z_min/z_max
    default to a span sized from the prior spread and the continuous-boundary
    estimate.  The ladder is truncated once beta^n <= truncation_discount
    (and never later than s_n <= horizon_s_min).
    """

    horizon_s_min: float = 0.0434
    dz: float = 2e-3
    z_min: float | None = None
    z_max: float | None = None
    quadrature_order: int = 32
    boundary_tolerance: float | None = None
    truncation_discount: float = 1e-10
    refine_boundary: bool = True

    def __post_init__(self):
        if self.horizon_s_min > 1.0 / (10.0 * math.log(10.0)) + 1e-15:
            raise ConfigurationError(
                "horizon_s_min too large: need exp(-1/horizon_s_min) <= 1e-10"
            )
        if self.dz <= 0.0:
            raise ConfigurationError("dz must be positive")
        if not (0.0 < self.truncation_discount < 1.0):
            raise ConfigurationError("truncation_discount must lie in (0, 1)")


def _horizon_steps(v0: float, d: Discounting, cfg: DpConfig) -> int:
    n_disc = math.ceil(math.log(1.0 / cfg.truncation_discount) / d.c)
    s0 = v0 / d.c
    n_abs = 0
    if s0 > cfg.horizon_s_min:
        # smallest n with s0/(1 + v0 n) <= horizon_s_min
        n_abs = math.ceil((s0 / cfg.horizon_s_min - 1.0) / v0)
    return max(n_disc, n_abs, 1)


def constrained_boundary(v0: float, d: Discounting, cfg: DpConfig | None = None,
                         diagnostics: dict[str, Any] | None = None) -> float:
    """Root stopping-boundary point of the ladder-constrained problem.

    Returns b such that the index is u0 + sqrt(c) * b; always strictly below
    the continuous boundary b(v0/c).
    """
    if cfg is None:
        cfg = DpConfig()
    if not (v0 > 0.0):
        raise ConfigurationError(f"v0 must be positive, got {v0}")
    s0 = v0 / d.c
    n_steps = _horizon_steps(v0, d, cfg)
    s = s0 / (1.0 + v0 * np.arange(n_steps + 1))

    z_scale = min(s0, math.sqrt(s0))
    dz = cfg.dz * z_scale
    delta = s[0] - s[1]
    # the boundary never exceeds s0/sqrt(2); headroom covers one-step noise
    z_lo = -6.0 * math.sqrt(s0) if cfg.z_min is None else cfg.z_min
    z_hi = (s0 / math.sqrt(2.0) + 4.0 * math.sqrt(delta) + 0.1 * z_scale
            if cfg.z_max is None else cfg.z_max)
    n = int(round((z_hi - z_lo) / dz)) + 1
    z = z_lo + dz * np.arange(n)
    nodes, weights = gauss_hermite_rule(cfg.quadrature_order)
    tol = cfg.boundary_tolerance if cfg.boundary_tolerance is not None \
        else 1e-9 * z_scale

    # payoff-normalized values: W_n = V_n * exp(1/s_n); per-step discount beta
    w = z.copy()
    for k in range(n_steps - 1, -1, -1):
        cont = d.beta * gaussian_step(w, dz, s[k] - s[k + 1], nodes, weights)
        w = np.maximum(z, cont)
    try:
        b, j = extract_boundary(z, w - z, tol, cfg.refine_boundary)
    except IndexError:
        raise SolverError(
            f"stopping boundary exceeds z_max={z_hi} at s0={s0} (v0={v0})"
        ) from None
    # reject boundaries hugging the top edge (clamped-extrapolation artifact)
    if j >= n - 1 or z_hi - b < 4.0 * math.sqrt(delta):
        raise SolverError(
            f"z_max={z_hi} leaves no headroom above the boundary b={b:.6g} "
            f"at s0={s0} (v0={v0})"
        )
    if diagnostics is not None:
        diagnostics.update({
            "n_steps": n_steps,
            "s0": s0,
            "dz": dz,
            "z_min": z_lo,
            "z_max": z_hi,
            "grid_points": n,
            "quadrature_order": cfg.quadrature_order,
            "truncation_error_bound": z_hi * d.beta ** n_steps,
            "boundary_grid_index": j,
        })
    return b


@dataclass(frozen=True)
class IndexResult:
    """An index value plus solver metadata."""

    value: float
    method: str
    diagnostics: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise SolverError(f"index value is not finite: {self.value}")


def gittins_exact(arm: NormalArm, d: Discounting,
                  cfg: DpConfig | None = None) -> IndexResult:
    """Exact index of a normalized arm (sigma2 = 1) via the constrained DP."""
    if not arm.is_normalized:
        raise ConfigurationError(
            "gittins_exact requires a normalized arm; use normalize() first"
        )
    if arm.v <= DEGENERATE_V:
        return IndexResult(arm.u, "exact", {"degenerate_prior": True})
    diag: dict[str, Any] = {}
    b = constrained_boundary(arm.v, d, cfg, diagnostics=diag)
    return IndexResult(arm.u + math.sqrt(d.c) * b, "exact", diag)


def index_exact(u0: float, v0: float, sigma2: float, beta: float,
                cfg: DpConfig | None = None) -> IndexResult:
    """Exact index for a general arm, reduced through the equivariance map."""
    arm = NormalArm(u=u0, v=v0, sigma2=sigma2)
    normalized, amap = normalize(arm)
    res = gittins_exact(normalized, make_discounting(beta), cfg)
    return IndexResult(amap.apply(res.value), "exact", res.diagnostics)
