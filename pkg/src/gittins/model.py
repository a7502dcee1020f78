"""Domain types for normal-reward arms under geometric discounting.

Everything here is an immutable value type with pure operations, so
instances can be shared freely across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


class ConfigurationError(ValueError):
    """Invalid user-supplied parameter or configuration."""


class SolverError(RuntimeError):
    """A numerical solver could not produce a trustworthy answer."""


@dataclass(frozen=True)
class Discounting:
    """Geometric discount factor beta with its continuous-time rate c."""

    beta: float
    c: float

    def __post_init__(self):
        if not (0.0 < self.beta < 1.0):
            raise ConfigurationError(f"beta must lie in (0, 1), got {self.beta}")
        if not math.isclose(self.c, -math.log(self.beta), rel_tol=1e-12):
            raise ConfigurationError("c must equal -log(beta)")


def make_discounting(beta: float) -> Discounting:
    if not (0.0 < beta < 1.0):
        raise ConfigurationError(f"beta must lie in (0, 1), got {beta}")
    return Discounting(beta=beta, c=-math.log(beta))


@dataclass(frozen=True)
class NormalArm:
    """Normal prior/posterior N(u, v) on an unknown mean, observed with variance sigma2."""

    u: float
    v: float
    sigma2: float = 1.0

    def __post_init__(self):
        if not (self.v > 0.0):
            raise ConfigurationError(f"prior variance must be positive, got {self.v}")
        if not (self.sigma2 > 0.0):
            raise ConfigurationError(
                f"observation variance must be positive, got {self.sigma2}"
            )

    @property
    def is_normalized(self) -> bool:
        return abs(self.sigma2 - 1.0) <= 1e-12


@dataclass(frozen=True)
class AffineMap:
    """Index transform undoing `normalize`: index = shift + scale * normalized_index."""

    shift: float
    scale: float

    def apply(self, x: float) -> float:
        return self.shift + self.scale * x


def normalize(arm: NormalArm) -> tuple[NormalArm, AffineMap]:
    """Reduce an arm to mean 0 and unit observation variance.

    The returned map satisfies index(arm) = map.apply(index(normalized arm)),
    by location/scale equivariance of the index.
    """
    scale = math.sqrt(arm.sigma2)
    normalized = NormalArm(u=0.0, v=arm.v / arm.sigma2, sigma2=1.0)
    return normalized, AffineMap(shift=arm.u, scale=scale)


def posterior_update(arm: NormalArm, x: float) -> NormalArm:
    """Conjugate-normal update of (u, v) after observing x."""
    if not math.isfinite(x):
        raise ConfigurationError(f"observation must be finite, got {x}")
    v_new = 1.0 / (1.0 / arm.v + 1.0 / arm.sigma2)
    u_new = v_new * (arm.u / arm.v + x / arm.sigma2)
    return NormalArm(u=u_new, v=v_new, sigma2=arm.sigma2)


@dataclass(frozen=True)
class ScaledState:
    """Dimensionless stopping-problem coordinates of an (arm, discounting) pair.

    s0 is the horizon coordinate v / c.  z_shift is the arm's mean: a boundary
    value z in these coordinates maps back to an index via
    index = z_shift + sqrt(c) * z.
    """

    s0: float
    z_shift: float

    def __post_init__(self):
        if not (self.s0 > 0.0):
            raise ConfigurationError(f"s0 must be positive, got {self.s0}")


def time_change(arm: NormalArm, d: Discounting) -> ScaledState:
    """Map an arm's posterior variance to the stopping-problem horizon s = v/c."""
    return ScaledState(s0=arm.v / d.c, z_shift=arm.u)
