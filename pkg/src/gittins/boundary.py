"""Free boundary of the Wiener-process retirement problem.

The payoff is g(z, s) = z * exp(-1/s) for a standard Brownian motion Z run
in the -s direction; the continuation region is {z < b(s)}.  This module
provides the closed-form approximation psi(s) to b(s)/sqrt(s), a numeric
backward-induction solver for b(s), the large-s expansion, and the
continuous-time index u0 + sqrt(c) * b(v0/c).
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import numpy as np

from .model import ConfigurationError, Discounting, SolverError
from ._stepping import extract_boundary, gauss_hermite_rule, gaussian_step

# exp(-1/s_min) <= 1e-10 makes the terminal payoff negligible
S_MIN_CAP = 1.0 / (10.0 * math.log(10.0))

# boundary values closer than this (in 1/s units) to the truncation horizon
# still feel the terminal condition and are not reported
_REPORT_MARGIN = math.log(1e4)


def psi(s: float) -> float:
    """Closed-form approximation to b(s)/sqrt(s), in five pieces."""
    if s <= 0.0:
        raise ConfigurationError(f"psi requires s > 0, got {s}")
    if s <= 0.2:
        return math.sqrt(s / 2.0)
    if s <= 1.0:
        return 0.49 - 0.11 / math.sqrt(s)
    if s <= 5.0:
        return 0.63 - 0.26 / math.sqrt(s)
    if s <= 15.0:
        return 0.77 - 0.58 / math.sqrt(s)
    arg = 2.0 * math.log(s) - math.log(math.log(s)) - math.log(16.0 * math.pi)
    assert arg > 0.0, "large-s piece must have a positive radicand for s > 15"
    return math.sqrt(arg)


def asymptotic_b(s: float) -> float:
    """Large-s expansion of b(s); only meaningful for s > 15."""
    if s <= 15.0:
        raise ConfigurationError(f"asymptotic expansion requires s > 15, got {s}")
    return math.sqrt(
        2.0 * s * (math.log(s) - 0.5 * math.log(math.log(s))
                   - 0.5 * math.log(16.0 * math.pi))
    )


@dataclass(frozen=True)
class BoundaryTable:
    """Sampled free boundary {(s, b(s))} with its grid tolerance."""

    s_grid: np.ndarray
    b_values: np.ndarray
    eps_grid: float = 0.0  # tolerance for the b/sqrt(s) monotonicity check

    def __post_init__(self):
        s = np.asarray(self.s_grid, dtype=float)
        b = np.asarray(self.b_values, dtype=float)
        if s.ndim != 1 or s.shape != b.shape or s.size == 0:
            raise ConfigurationError("s_grid and b_values must be matching 1-d arrays")
        if np.any(np.diff(s) <= 0.0) or s[0] <= 0.0:
            raise ConfigurationError("s_grid must be positive and strictly ascending")
        if np.any(b < 0.0):
            raise SolverError("boundary values must be nonnegative")
        ratio = b / np.sqrt(s)
        if np.any(np.diff(ratio) < -self.eps_grid):
            raise SolverError("b(s)/sqrt(s) is not nondecreasing within tolerance")
        if np.any(b > s / math.sqrt(2.0)):
            raise SolverError("boundary exceeds the s/sqrt(2) upper bound")
        object.__setattr__(self, "s_grid", s)
        object.__setattr__(self, "b_values", b)

    def b_at(self, s: float) -> float:
        """Linear interpolation of b(s); raises outside the solved range."""
        if not (self.s_grid[0] <= s <= self.s_grid[-1]):
            raise ConfigurationError(
                f"s={s} outside solved range [{self.s_grid[0]}, {self.s_grid[-1]}]"
            )
        return float(np.interp(s, self.s_grid, self.b_values))

    def to_csv(self, f) -> None:
        """Write rows `s,b,b_over_sqrt_s,psi` at full precision."""
        own = isinstance(f, str)
        out = open(f, "w") if own else f
        try:
            out.write("s,b,b_over_sqrt_s,psi\n")
            for s, b in zip(self.s_grid.tolist(), self.b_values.tolist()):
                out.write(f"{s!r},{b!r},{b / math.sqrt(s)!r},{psi(s)!r}\n")
        finally:
            if own:
                out.close()

    def to_csv_string(self) -> str:
        buf = io.StringIO()
        self.to_csv(buf)
        return buf.getvalue()


@dataclass(frozen=True)
class BoundarySolverConfig:
    """Grid and stepping parameters for the free-boundary solver.

    ds is the (maximum) step in s; when ds_rel > 0 the step at height s is
    additionally capped at ds_rel * s, which keeps the discrete-stopping bias
    proportional to sqrt(s) over wide ranges.  z_min/z_max default to
    -6 and s_max/sqrt(2) + 4.
    """

    s_min: float = 0.03
    s_max: float = 15.0
    ds: float = 2.9e-4
    z_min: float | None = None
    z_max: float | None = None
    dz: float = 2e-3
    quadrature_order: int = 32
    ds_rel: float = 0.0
    s_report_min: float | None = None
    refine_boundary: bool = True
    stop_tol: float = 1e-12

    def __post_init__(self):
        if not (0.0 < self.s_min < self.s_max):
            raise ConfigurationError("require 0 < s_min < s_max")
        if self.s_min > S_MIN_CAP + 1e-15:
            raise ConfigurationError(
                f"s_min={self.s_min} too large: need exp(-1/s_min) <= 1e-10 "
                f"(s_min <= {S_MIN_CAP:.6f})"
            )
        if self.ds <= 0.0 or self.dz <= 0.0:
            raise ConfigurationError("ds and dz must be positive")
        if self.quadrature_order < 2:
            raise ConfigurationError("quadrature_order must be at least 2")
        if self.z_min is not None and self.z_min >= 0.0:
            raise ConfigurationError("z_min must be negative")
        if self.z_max is not None and self.z_max <= 0.0:
            raise ConfigurationError("z_max must be positive")

    def resolved_z_range(self) -> tuple[float, float]:
        z_lo = -6.0 if self.z_min is None else self.z_min
        # b(s) <= s/sqrt(2), so this always contains the boundary
        z_hi = (self.s_max / math.sqrt(2.0) + 4.0
                if self.z_max is None else self.z_max)
        if not (z_lo < 0.0 < z_hi):
            raise ConfigurationError("z range must straddle 0")
        return z_lo, z_hi

    def resolved_report_min(self) -> float:
        if self.s_report_min is not None:
            return self.s_report_min
        inv = 1.0 / self.s_min - _REPORT_MARGIN
        return 1.0 / inv if inv > 0.0 else self.s_min


def solve_boundary(cfg: BoundarySolverConfig) -> BoundaryTable:
    """Backward value iteration for the free boundary b(s).

    Works with the payoff-normalized value W(z, s) = V(z, s) * exp(1/s), so
    a step from s down to s' carries the discount exp(1/s - 1/s'); this keeps
    every quantity on the scale of z and avoids exp(-1/s) underflow.
    """
    z_lo, z_hi = cfg.resolved_z_range()
    n = int(round((z_hi - z_lo) / cfg.dz)) + 1
    z = z_lo + cfg.dz * np.arange(n)
    nodes, weights = gauss_hermite_rule(cfg.quadrature_order)
    report_min = cfg.resolved_report_min()

    w = z.copy()  # terminal condition: stop everywhere at the truncation horizon
    s = cfg.s_min
    s_out: list[float] = []
    b_out: list[float] = []
    while s < cfg.s_max - 1e-15:
        step = cfg.ds if cfg.ds_rel <= 0.0 else min(cfg.ds, cfg.ds_rel * s)
        s_next = min(s + step, cfg.s_max)
        taken = s_next - s
        disc = math.exp(1.0 / s_next - 1.0 / s)
        cont = disc * gaussian_step(w, cfg.dz, taken, nodes, weights)
        w = np.maximum(z, cont)
        s = s_next
        if s >= report_min:
            try:
                b, j = extract_boundary(z, w - z, cfg.stop_tol, cfg.refine_boundary)
            except IndexError:
                raise SolverError(
                    f"stopping boundary exceeds z_max={z_hi} at s={s}"
                ) from None
            # a boundary found hugging the top edge is an artifact of the
            # clamped extrapolation there, not a real stopping point
            if j >= n - 1 or z_hi - b < 4.0 * math.sqrt(taken):
                raise SolverError(
                    f"z_max={z_hi} leaves no headroom above the boundary "
                    f"b={b:.6g} at s={s}"
                )
            s_out.append(s)
            b_out.append(max(b, 0.0))
    if not s_out:
        raise SolverError("no s grid point above the reporting threshold")
    eps = cfg.dz / math.sqrt(s_out[0])
    return BoundaryTable(np.array(s_out), np.array(b_out), eps_grid=eps)


def boundary_value(s: float, source="psi") -> float:
    """b(s) from either the closed form ("psi") or a numeric BoundaryTable."""
    if isinstance(source, BoundaryTable):
        return source.b_at(s)
    if source == "psi":
        return math.sqrt(s) * psi(s)
    raise ConfigurationError(f"unknown boundary source {source!r}")


def wiener_index(u0: float, v0: float, d: Discounting, boundary="psi") -> float:
    """Continuous-time index u0 + sqrt(c) * b(v0/c)."""
    if not (v0 > 0.0):
        raise ConfigurationError(f"v0 must be positive, got {v0}")
    return u0 + math.sqrt(d.c) * boundary_value(v0 / d.c, boundary)
