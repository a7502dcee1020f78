"""Seeded Monte Carlo simulator for k-armed normal bandits.

Replications run vectorized in fixed-size chunks with per-chunk seeds spawned
deterministically from the master seed, so results are bit-identical across
reruns and across worker counts.  Running several policies with the same
config reuses the same seed stream (common random numbers).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .model import ConfigurationError, NormalArm, make_discounting
from .exact import DpConfig, index_exact
from . import approx

POLICY_TAGS = ("exact", "ca", "ca_prime", "ua", "ua_prime", "avg", "greedy")

_CHUNK = 4096

# coarse grid is plenty for choosing between arms inside a simulation
_SIM_DP = DpConfig(dz=0.01, quadrature_order=16, truncation_discount=1e-8)


@dataclass(frozen=True)
class BanditConfig:
    arms: tuple[NormalArm, ...]
    beta: float
    replications: int
    seed: int
    truncation_tol: float = 1e-6

    def __post_init__(self):
        object.__setattr__(self, "arms", tuple(self.arms))
        if len(self.arms) < 2:
            raise ConfigurationError("need at least 2 arms")
        if not (0.0 < self.beta < 1.0):
            raise ConfigurationError(f"beta must lie in (0, 1), got {self.beta}")
        if self.replications < 1:
            raise ConfigurationError("replications must be >= 1")
        if not (self.truncation_tol > 0.0):
            raise ConfigurationError("truncation_tol must be positive")


@dataclass(frozen=True)
class SimResult:
    policy: str
    mean_discounted_reward: float
    std_err: float
    replications: int
    mean_pulls_per_arm: tuple[float, ...]

    def __post_init__(self):
        if self.std_err < 0.0:
            raise ConfigurationError("std_err must be nonnegative")


class IndexCache:
    """Memoizes exact-index offsets lambda(0, v) for one discount factor.

    By the location equivariance of the index, the index of an arm with
    posterior (u, v) is u + lambda(0, v), so caching by v alone suffices.
    """

    def __init__(self, beta: float, dp_config: DpConfig | None = None):
        self.beta = beta
        self.dp_config = dp_config if dp_config is not None else _SIM_DP
        self._values: dict[float, float] = {}

    def offset(self, v: float) -> float:
        got = self._values.get(v)
        if got is None:
            got = index_exact(0.0, v, 1.0, self.beta, self.dp_config).value
            self._values[v] = got
        return got


def _tag_offset(policy: str, v: float, beta: float,
                cache: IndexCache | None) -> float:
    if policy == "greedy":
        return 0.0
    if policy == "exact":
        if cache is None:
            cache = IndexCache(beta)
        return cache.offset(v)
    fn = {"ca": approx.index_ca, "ca_prime": approx.index_ca_prime,
          "ua": approx.index_ua, "ua_prime": approx.index_ua_prime,
          "avg": approx.index_avg}.get(policy)
    if fn is None:
        raise ConfigurationError(f"unknown policy {policy!r}")
    return fn(0.0, v, beta).value


def index_of(policy, arm: NormalArm, beta: float,
             index_cache: IndexCache | None = None) -> float:
    """The policy's index for the arm's current posterior (sigma2 = 1 arms
    are evaluated directly; others through the equivariance reduction)."""
    if callable(policy):
        return float(policy(np.asarray([arm.u]), np.asarray([arm.v]))[0])
    if policy == "greedy":
        return arm.u
    if arm.is_normalized:
        return arm.u + _tag_offset(policy, arm.v, beta, index_cache)
    scale = math.sqrt(arm.sigma2)
    return arm.u + scale * _tag_offset(policy, arm.v / arm.sigma2, beta,
                                       index_cache)


def _policy_name(policy) -> str:
    return policy if isinstance(policy, str) else getattr(policy, "__name__",
                                                          "custom")


def _horizon_cap(cfg: BanditConfig) -> int:
    u0 = np.array([a.u for a in cfg.arms])
    v0 = np.array([a.v for a in cfg.arms])
    s2 = np.array([a.sigma2 for a in cfg.arms])
    u_scale = float(np.max(np.abs(u0) + 8.0 * np.sqrt(v0)
                           + 5.0 * np.sqrt(v0 + s2))) + 1.0
    c = -math.log(cfg.beta)
    t = math.log(u_scale / (cfg.truncation_tol * (1.0 - cfg.beta))) / c
    return int(math.ceil(t)) + 8


def _offset_tables(cfg: BanditConfig, policy, v_table: np.ndarray,
                   index_cache: IndexCache | None) -> np.ndarray | None:
    """Per-arm, per-pull-count index offsets for tag policies (None for
    callables, which are evaluated inside the step loop)."""
    if callable(policy):
        return None
    arms = cfg.arms
    table = np.zeros_like(v_table)
    if policy == "greedy":
        return table
    cache = index_cache
    if policy == "exact" and cache is None:
        cache = IndexCache(cfg.beta)
    for a, arm in enumerate(arms):
        scale = math.sqrt(arm.sigma2)
        for k in range(v_table.shape[1]):
            v_norm = v_table[a, k] / arm.sigma2
            table[a, k] = scale * _tag_offset(policy, v_norm, cfg.beta, cache)
    return table


def _run_chunk(cfg: BanditConfig, policy, seed_seq, n_reps: int, t_cap: int,
               v_table: np.ndarray, offsets: np.ndarray | None
               ) -> tuple[np.ndarray, np.ndarray]:
    arms = cfg.arms
    n_arms = len(arms)
    u0 = np.array([a.u for a in arms])
    v0 = np.array([a.v for a in arms])
    sigma = np.sqrt([a.sigma2 for a in arms])
    sigma2 = sigma * sigma
    beta = cfg.beta
    tol = cfg.truncation_tol

    rng = np.random.default_rng(seed_seq)
    theta = u0 + np.sqrt(v0) * rng.standard_normal((n_reps, n_arms))

    u = np.broadcast_to(u0, (n_reps, n_arms)).copy()
    pulls = np.zeros((n_reps, n_arms), dtype=np.int64)
    reward = np.zeros(n_reps)
    active = np.ones(n_reps, dtype=bool)
    rows = np.arange(n_reps)
    arm_ix = np.arange(n_arms)
    disc = 1.0

    for _ in range(t_cap):
        if not active.any():
            break
        # one fixed-shape draw per step: paths are unchanged when the horizon
        # cap (hence t_cap) moves with the truncation tolerance
        noise = rng.standard_normal((n_reps, n_arms))
        if offsets is not None:
            idx = u + offsets[arm_ix[None, :], pulls]
        else:
            v_cur = v_table[arm_ix[None, :], pulls]
            idx = policy(u, v_cur)
        choice = np.argmax(idx, axis=1)  # ties go to the lowest arm ordinal
        k = pulls[rows, choice]
        x = theta[rows, choice] + sigma[choice] * noise[rows, choice]
        v_old = v_table[choice, k]
        v_new = v_table[choice, k + 1]
        u_new = v_new * (u[rows, choice] / v_old + x / sigma2[choice])

        upd = active
        reward[upd] += disc * x[upd]
        u[rows[upd], choice[upd]] = u_new[upd]
        pulls[rows[upd], choice[upd]] += 1
        disc *= beta

        v_cur = v_table[arm_ix[None, :], pulls]
        residual = disc * np.max(np.abs(u) + 5.0 * np.sqrt(v_cur + sigma2),
                                 axis=1) / (1.0 - beta)
        active = active & (residual >= tol)
    return reward, pulls


def simulate(cfg: BanditConfig, policy, index_cache: IndexCache | None = None,
             n_workers: int = 1) -> SimResult:
    """Mean discounted reward of a policy over cfg.replications episodes.

    Each episode draws the true means from their priors, repeatedly pulls the
    argmax-index arm, and stops once the geometric tail bound drops below
    cfg.truncation_tol.
    """
    t_cap = _horizon_cap(cfg)
    v0 = np.array([a.v for a in cfg.arms])
    sigma2 = np.array([a.sigma2 for a in cfg.arms])
    ks = np.arange(t_cap + 2)
    v_table = 1.0 / (1.0 / v0[:, None] + ks[None, :] / sigma2[:, None])
    offsets = _offset_tables(cfg, policy, v_table, index_cache)

    n_chunks = (cfg.replications + _CHUNK - 1) // _CHUNK
    seeds = np.random.SeedSequence(cfg.seed).spawn(n_chunks)
    sizes = [min(_CHUNK, cfg.replications - i * _CHUNK) for i in range(n_chunks)]

    def work(i: int):
        return _run_chunk(cfg, policy, seeds[i], sizes[i], t_cap, v_table,
                          offsets)

    if n_workers > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            parts = list(pool.map(work, range(n_chunks)))
    else:
        parts = [work(i) for i in range(n_chunks)]

    rewards = np.concatenate([p[0] for p in parts])
    pulls = np.concatenate([p[1] for p in parts])
    n = cfg.replications
    mean = math.fsum(rewards) / n  # exact summation: order/worker independent
    if n > 1:
        var = math.fsum((rewards - mean) ** 2) / (n - 1)
        std_err = math.sqrt(var / n)
    else:
        std_err = 0.0
    mean_pulls = tuple(math.fsum(pulls[:, a]) / n for a in range(len(cfg.arms)))
    return SimResult(policy=_policy_name(policy), mean_discounted_reward=mean,
                     std_err=std_err, replications=n,
                     mean_pulls_per_arm=mean_pulls)


def compare(cfg: BanditConfig, policies, index_cache: IndexCache | None = None,
            n_workers: int = 1) -> list[SimResult]:
    """Run each policy on the same seed stream (common random numbers)."""
    cache = index_cache
    if cache is None and any(p == "exact" for p in policies if isinstance(p, str)):
        cache = IndexCache(cfg.beta)
    return [simulate(cfg, p, index_cache=cache, n_workers=n_workers)
            for p in policies]


def compare_csv(results: list[SimResult]) -> str:
    lines = ["policy,mean,std_err,replications"]
    for r in results:
        lines.append(f"{r.policy},{r.mean_discounted_reward!r},{r.std_err!r},"
                     f"{r.replications}")
    return "\n".join(lines) + "\n"
