"""Acceptance suite: one test per release criterion.

Each test prints a single PASS/FAIL line (visible with pytest -s or on
failure) and then asserts.  Published reference values are from the standard
table of scaled Gittins indices n(1-beta)^{1/2} lambda(0, 1/n, beta) and its
closed-form approximation rows; tolerances are fixed per criterion.
"""

import math
import time

import numpy as np
import pytest

from gittins import (BanditConfig, BoundarySolverConfig, IndexCache,
                     NormalArm, compare, estimate_rho, index_avg, index_ca,
                     index_ca_prime, index_exact, index_ua, index_ua_prime,
                     make_discounting, psi, simulate, solve_boundary,
                     upper_bound_gittins, upper_bound_thm2)

BETAS = (0.5, 0.7, 0.9, 0.95, 0.99, 0.995)
NS = (10, 50, 100, 500, 1000)

# scaled exact indices, one row per beta in BETAS, one column per n in NS
EXACT_TABLE = {
    0.5: (0.211, 0.224, 0.226, 0.227, 0.227),
    0.7: (0.311, 0.337, 0.341, 0.344, 0.345),
    0.9: (0.415, 0.480, 0.493, 0.504, 0.506),
    0.95: (0.425, 0.519, 0.540, 0.562, 0.566),
    0.99: (0.353, 0.499, 0.549, 0.618, 0.633),
    0.995: (0.304, 0.457, 0.516, 0.614, 0.638),
}

# closed-form approximation rows, keyed by beta then method
APPROX_TABLE = {
    0.5: {"avg": (0.208, 0.192, 0.190, 0.189, 0.189),
          "ca": (0.208, 0.192, 0.190, 0.189, 0.189),
          "ca_prime": (0.208, 0.192, 0.190, 0.189, 0.189),
          "ua": (0.601,) * 5, "ua_prime": (0.601,) * 5},
    0.7: {"avg": (0.264, 0.332, 0.331, 0.329, 0.329),
          "ca": (0.184, 0.332, 0.331, 0.329, 0.329),
          "ca_prime": (0.344, 0.332, 0.331, 0.329, 0.329),
          "ua": (0.489, 0.648, 0.648, 0.648, 0.648), "ua_prime": (0.648,) * 5},
    0.9: {"avg": (0.357, 0.506, 0.505, 0.505, 0.505),
          "ca": (0.201, 0.506, 0.505, 0.505, 0.505),
          "ca_prime": (0.513, 0.506, 0.505, 0.505, 0.505),
          "ua": (0.377, 0.689, 0.689, 0.689, 0.689), "ua_prime": (0.689,) * 5},
    0.95: {"avg": (0.382, 0.468, 0.568, 0.568, 0.568),
           "ca": (0.190, 0.367, 0.568, 0.568, 0.568),
           "ca_prime": (0.574, 0.569, 0.568, 0.568, 0.568),
           "ua": (0.314, 0.496, 0.698, 0.698, 0.698), "ua_prime": (0.698,) * 5},
    0.99: {"avg": (0.390, 0.453, 0.485, 0.647, 0.647),
           "ca": (0.130, 0.257, 0.322, 0.647, 0.647),
           "ca_prime": (0.650, 0.648, 0.647, 0.647, 0.647),
           "ua": (0.185, 0.315, 0.380, 0.705, 0.705), "ua_prime": (0.705,) * 5},
    0.995: {"avg": (0.424, 0.437, 0.470, 0.562, 0.665),
            "ca": (0.181, 0.209, 0.274, 0.458, 0.665),
            "ca_prime": (0.667, 0.665, 0.665, 0.665, 0.665),
            "ua": (0.221, 0.250, 0.315, 0.499, 0.706),
            "ua_prime": (0.706,) * 5},
}

# large-n limits of the scaled approximations: beta -> (ca/ca', ua/ua')
LIMIT_TABLE = {
    0.5: (0.189, 0.601), 0.6: (0.257, 0.626), 0.7: (0.329, 0.648),
    0.8: (0.409, 0.669), 0.9: (0.505, 0.689), 0.95: (0.568, 0.698),
}

APPROX_FNS = {"ca": index_ca, "ca_prime": index_ca_prime, "ua": index_ua,
              "ua_prime": index_ua_prime, "avg": index_avg}


def scaled(value: float, n: int, beta: float) -> float:
    return n * math.sqrt(1.0 - beta) * value


def report(num, name, ok, detail=""):
    print(f"criterion {num} ({name}): {'PASS' if ok else 'FAIL'} {detail}")


def test_criterion_1_closed_form_table():
    t0 = time.time()
    worst = 0.0
    for beta, rows in APPROX_TABLE.items():
        for method, row in rows.items():
            for n, ref in zip(NS, row):
                got = scaled(APPROX_FNS[method](0.0, 1.0 / n, beta).value,
                             n, beta)
                worst = max(worst, abs(got - ref))
    elapsed = time.time() - t0
    ok = worst <= 0.001 and elapsed < 1.0
    report(1, "closed-form table", ok,
           f"max|err|={worst:.5f} in {elapsed:.2f}s")
    assert worst <= 0.001
    assert elapsed < 1.0


def test_criterion_2_limit_table():
    worst = 0.0
    for beta, (ref_ca, ref_ua) in LIMIT_TABLE.items():
        c = -math.log(beta)
        lim_ca = math.sqrt(1.0 - beta) * (1.0 / math.sqrt(2.0 * c) - 0.583)
        lim_ua = math.sqrt((1.0 - beta) / (2.0 * c))
        worst = max(worst, abs(lim_ca - ref_ca), abs(lim_ua - ref_ua))
    ok = worst <= 0.001
    report(2, "limit table", ok, f"max|err|={worst:.5f}")
    assert ok


def test_criterion_3_exact_index_table():
    worst = 0.0
    slowest = 0.0
    for beta, row in EXACT_TABLE.items():
        for n, ref in zip(NS, row):
            t0 = time.time()
            got = scaled(index_exact(0.0, 1.0 / n, 1.0, beta).value, n, beta)
            slowest = max(slowest, time.time() - t0)
            worst = max(worst, abs(got - ref))
    ok = worst <= 0.01 and slowest < 60.0
    report(3, "exact index table", ok,
           f"max|err|={worst:.4f}, slowest cell {slowest:.1f}s")
    assert worst <= 0.01
    assert slowest < 60.0


def test_criterion_4_rho_estimate():
    t0 = time.time()
    est = estimate_rho(n_samples=10**6, seed=20260823)
    elapsed = time.time() - t0
    ok = abs(est.rho_hat - 0.583) <= 0.005 and elapsed < 30.0
    report(4, "rho estimation", ok,
           f"rho_hat={est.rho_hat:.5f} in {elapsed:.1f}s "
           f"(aborted {est.n_aborted})")
    assert abs(est.rho_hat - 0.583) <= 0.005
    assert elapsed < 30.0


@pytest.fixture(scope="module")
def wide_boundary():
    cfg = BoundarySolverConfig(s_min=0.03, s_max=15.0, ds=0.02, ds_rel=1.5e-3,
                               dz=2e-3, quadrature_order=32,
                               s_report_min=0.2499)
    return solve_boundary(cfg)


def test_criterion_5_boundary_shape(wide_boundary):
    tab = wide_boundary
    ratio = tab.b_values / np.sqrt(tab.s_grid)
    mono = bool(np.all(np.diff(ratio) >= -tab.eps_grid))
    below_cap = bool(np.all(tab.b_values < tab.s_grid / math.sqrt(2.0)))

    small = solve_boundary(BoundarySolverConfig(
        s_min=0.0088, s_max=0.0125, ds=4e-7, dz=2e-5, z_min=-0.3, z_max=0.03,
        quadrature_order=16))
    slope = small.b_at(0.01) / 0.01
    slope_ok = abs(slope - 1.0 / math.sqrt(2.0)) <= 0.1 / math.sqrt(2.0)

    ok = mono and below_cap and slope_ok
    report(5, "boundary shape", ok,
           f"ratio monotone={mono}, b<s/sqrt2={below_cap}, "
           f"b(0.01)/0.01={slope:.4f}")
    assert mono
    assert below_cap
    assert slope_ok


def test_criterion_5_psi_consistency(wide_boundary):
    # |b(s)/sqrt(s) - psi(s)| <= 0.03 on [0.25, 15]
    tab = wide_boundary
    mask = (tab.s_grid >= 0.25) & (tab.s_grid <= 15.0)
    ratio = tab.b_values[mask] / np.sqrt(tab.s_grid[mask])
    psis = np.array([psi(s) for s in tab.s_grid[mask]])
    dev = np.abs(ratio - psis)
    worst = float(dev.max())
    s_worst = float(tab.s_grid[mask][dev.argmax()])
    ok = worst <= 0.03
    report(5, "psi consistency", ok,
           f"max|b/sqrt(s) - psi|={worst:.3f} at s={s_worst:.2f}")
    # Known failure: the piecewise closed form tracks the solved boundary
    # only for small s; see README and the numeric cross-checks in
    # test_criterion_3/test_criterion_6, which pin the solver itself down.
    assert ok, (
        f"psi deviates from the solved boundary by up to {worst:.3f} "
        f"(at s={s_worst:.2f}); the published exact indices imply the solved "
        "boundary is right and the closed form is not within 0.03 here"
    )


def test_criterion_6_bound_chain():
    eps = 0.005
    tab = solve_boundary(BoundarySolverConfig(
        s_min=0.0222, s_max=20.1, ds=0.05, ds_rel=1.5e-3, dz=2e-3,
        z_min=-6.0, z_max=10.5, quadrature_order=32, s_report_min=0.0222))
    ok = True
    worst = -math.inf
    for beta in (0.7, 0.9, 0.95):
        d = make_discounting(beta)
        for v0 in (0.01, 0.1, 1.0):
            lam = index_exact(0.0, v0, 1.0, beta).value
            b2 = upper_bound_thm2(0.0, v0, d, b_source=tab)
            bg = upper_bound_gittins(0.0, v0, beta, b_source=tab)
            ok &= lam <= b2 + eps and b2 <= bg + eps
            worst = max(worst, lam - b2, b2 - bg)
    report(6, "bound chain", ok, f"worst margin violation={worst:+.4f} "
           f"(<= {eps} required)")
    assert ok


def test_criterion_7_monotonicity_lattice():
    beta = 0.9
    eps = 0.005
    vs = (0.05, 0.1, 0.2, 0.5, 1.0)
    sigma2s = (0.5, 0.75, 1.0, 1.5, 2.0)
    cache = {}

    def lam(v, s2):
        if (v, s2) not in cache:
            cache[(v, s2)] = index_exact(0.0, v, s2, beta).value
        return cache[(v, s2)]

    # lambda(0, v, 1)/sqrt(v) nondecreasing in v
    r = [lam(v, 1.0) / math.sqrt(v) for v in vs]
    thm1 = all(b >= a - eps for a, b in zip(r, r[1:]))
    # nonincreasing in sigma2 at fixed v
    lem1 = all(lam(v, b) <= lam(v, a) + eps
               for v in vs for a, b in zip(sigma2s, sigma2s[1:]))
    # nondecreasing in v at fixed sigma2; additive in u exactly
    cor1_v = all(lam(b, s2) >= lam(a, s2) - eps
                 for s2 in sigma2s for a, b in zip(vs, vs[1:]))
    cor1_u = abs(index_exact(2.0, 0.1, 1.0, beta).value
                 - (2.0 + lam(0.1, 1.0))) < 1e-12
    # joint ordering in (v, v/sigma2)
    rem3 = all(
        lam(v1, s1) / math.sqrt(v1) >= lam(v2, s2) / math.sqrt(v2) - eps
        for v1 in vs for s1 in sigma2s for v2 in vs for s2 in sigma2s
        if v1 >= v2 and v1 / s1 >= v2 / s2)

    ok = thm1 and lem1 and cor1_v and cor1_u and rem3
    report(7, "monotonicity lattice", ok,
           f"ratio-in-v={thm1}, sigma2={lem1}, v={cor1_v}, u-shift={cor1_u}, "
           f"joint={rem3}")
    assert ok


def test_criterion_8_simulator_sanity():
    cfg = BanditConfig(arms=(NormalArm(0.0, 1.0), NormalArm(0.0, 1.0)),
                       beta=0.9, replications=10**5, seed=20260823)
    cache = IndexCache(cfg.beta)
    results = compare(cfg, ["exact", "greedy"], index_cache=cache)
    exact_res, greedy_res = results
    dominates = (exact_res.mean_discounted_reward
                 >= greedy_res.mean_discounted_reward)

    rerun = simulate(cfg, "exact", index_cache=cache)
    multi = simulate(cfg, "exact", index_cache=cache, n_workers=4)
    identical = (
        rerun.mean_discounted_reward == exact_res.mean_discounted_reward
        and multi.mean_discounted_reward == exact_res.mean_discounted_reward
        and multi.std_err == exact_res.std_err
        and multi.mean_pulls_per_arm == exact_res.mean_pulls_per_arm)

    ok = dominates and identical
    report(8, "simulator sanity", ok,
           f"exact={exact_res.mean_discounted_reward:.4f} "
           f"greedy={greedy_res.mean_discounted_reward:.4f}, "
           f"bit-identical={identical}")
    assert dominates
    assert identical
