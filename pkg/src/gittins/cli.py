"""Command-line surface: single indices, table regeneration, boundary dumps,
rho estimation, and bandit policy comparisons.  Output is CSV or JSON on
stdout; exit code 2 flags bad input, 3 a solver failure."""

from __future__ import annotations

import argparse
import json
import math
import sys

from .model import (ConfigurationError, NormalArm, SolverError,
                    make_discounting, normalize)
from .boundary import BoundarySolverConfig, solve_boundary, wiener_index
from .exact import DpConfig, gittins_exact
from . import approx, sim

TABLE_BETAS = (0.5, 0.7, 0.9, 0.95, 0.99, 0.995)
TABLE_NS = (10, 50, 100, 500, 1000)
TABLE1_METHODS = ("exact", "avg", "ca", "ca_prime", "ua", "ua_prime")
LIMIT_BETAS = (0.5, 0.6, 0.7, 0.8, 0.9, 0.95)


def _fmt(x: float, precision: int) -> str:
    return f"{x:.{precision}f}"  # IEEE formatting: round half to even


def _emit_rows(rows: list[dict], header: list[str], fmt: str, precision: int,
               out=None) -> None:
    out = out or sys.stdout
    if fmt == "json":
        def conv(v):
            if isinstance(v, float):
                return float(_fmt(v, precision))
            return v
        json.dump([{k: conv(v) for k, v in r.items()} for r in rows], out,
                  indent=2)
        out.write("\n")
        return
    out.write(",".join(header) + "\n")
    for r in rows:
        cells = []
        for k in header:
            v = r.get(k, "")
            cells.append(_fmt(v, precision) if isinstance(v, float) else str(v))
        out.write(",".join(cells) + "\n")


def _dp_config(args) -> DpConfig:
    kw = {}
    if args.dz is not None:
        kw["dz"] = args.dz
    if args.horizon_s_min is not None:
        kw["horizon_s_min"] = args.horizon_s_min
    if args.quadrature_order is not None:
        kw["quadrature_order"] = args.quadrature_order
    return DpConfig(**kw)


def _scaled_index(method: str, u0: float, v0: float, sigma2: float,
                  beta: float, cfg: DpConfig):
    """Index value plus diagnostics, reduced through the equivariance map
    when sigma2 != 1."""
    arm = NormalArm(u=u0, v=v0, sigma2=sigma2)
    normalized, amap = normalize(arm)
    d = make_discounting(beta)
    v_n = normalized.v
    if method == "exact":
        res = gittins_exact(normalized, d, cfg)
        return amap.apply(res.value), res.diagnostics
    if method == "wiener":
        return amap.apply(wiener_index(0.0, v_n, d)), {"boundary_source": "psi"}
    fn = {"ca": approx.index_ca, "ca_prime": approx.index_ca_prime,
          "ua": approx.index_ua, "ua_prime": approx.index_ua_prime,
          "avg": approx.index_avg}[method]
    return amap.apply(fn(0.0, v_n, beta).value), {}


def cmd_index(args) -> int:
    methods = (["exact", "ca", "ca_prime", "ua", "ua_prime", "avg", "wiener"]
               if args.method == "all" else [args.method])
    cfg = _dp_config(args)
    rows = []
    for m in methods:
        value, diag = _scaled_index(m, args.u0, args.v0, args.sigma2,
                                    args.beta, cfg)
        diag_str = ";".join(f"{k}={v}" for k, v in diag.items())
        rows.append({"method": m, "value": value, "diagnostics": diag_str})
    _emit_rows(rows, ["method", "value", "diagnostics"], args.format,
               args.precision)
    return 0


def cmd_table1(args) -> int:
    betas = args.beta or list(TABLE_BETAS)
    ns = args.n or list(TABLE_NS)
    methods = args.methods.split(",") if args.methods else list(TABLE1_METHODS)
    cfg = _dp_config(args)
    rows = []
    any_ok = False
    for beta in betas:
        for n in ns:
            scale = n * math.sqrt(1.0 - beta)
            for m in methods:
                row = {"beta": beta, "n": n, "method": m}
                try:
                    value, _ = _scaled_index(m, 0.0, 1.0 / n, 1.0, beta, cfg)
                    row["value"] = scale * value
                    any_ok = True
                except (ConfigurationError, SolverError) as exc:
                    print(f"table1 cell ({beta}, {n}, {m}) failed: {exc}",
                          file=sys.stderr)
                rows.append(row)
    _emit_rows(rows, ["beta", "n", "method", "value"], args.format,
               args.precision)
    return 0 if any_ok else 3


def table2_limits(beta: float) -> dict[str, float]:
    c = -math.log(beta)
    root = math.sqrt(1.0 - beta)
    return {
        "limit_ca": root * ((2.0 * c) ** -0.5 - approx.RHO),
        "limit_ua": math.sqrt((1.0 - beta) / (2.0 * c)),
    }


def cmd_table2(args) -> int:
    betas = args.beta or list(LIMIT_BETAS)
    cfg = _dp_config(args)
    rows = []
    for beta in betas:
        limits = table2_limits(beta)
        for m in ("limit_ca", "limit_ua"):
            rows.append({"beta": beta, "method": m, "value": limits[m]})
        if args.exact_n:
            n = args.exact_n
            value, _ = _scaled_index("exact", 0.0, 1.0 / n, 1.0, beta, cfg)
            rows.append({"beta": beta, "method": f"exact_n{n}",
                         "value": n * math.sqrt(1.0 - beta) * value})
            print(f"note: exact_n{n} is the finite-n value at n={n}, "
                  "not the extrapolated limit", file=sys.stderr)
    _emit_rows(rows, ["beta", "method", "value"], args.format, args.precision)
    return 0


def cmd_boundary(args) -> int:
    kw = dict(s_min=args.s_min, s_max=args.s_max, ds=args.ds,
              ds_rel=args.ds_rel, dz=args.dz,
              quadrature_order=args.quadrature_order or 32)
    if args.z_min is not None:
        kw["z_min"] = args.z_min
    if args.z_max is not None:
        kw["z_max"] = args.z_max
    table = solve_boundary(BoundarySolverConfig(**kw))
    sys.stdout.write(table.to_csv_string())
    return 0


def cmd_rho(args) -> int:
    est = approx.estimate_rho(args.n_samples,
                              args.seed if args.seed is not None else 0,
                              step_cap=args.step_cap)
    json.dump({"rho_hat": est.rho_hat, "es_tau": est.es_tau,
               "es_tau_sq": est.es_tau_sq, "n_samples": est.n_samples,
               "std_err": est.std_err, "n_aborted": est.n_aborted},
              sys.stdout, indent=2)
    sys.stdout.write("\n")
    return 0


def _read_config_file(path: str) -> dict[str, str]:
    values = {}
    with open(path) as f:
        for line in f:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigurationError(f"bad config line: {line!r}")
            key, _, val = line.partition("=")
            values[key.strip()] = val.strip()
    return values


def _parse_arms(text: str) -> tuple[NormalArm, ...]:
    arms = []
    for part in text.split(";"):
        fields = [float(x) for x in part.split(",")]
        if len(fields) == 2:
            fields.append(1.0)
        if len(fields) != 3:
            raise ConfigurationError(f"arm spec must be u,v[,sigma2]: {part!r}")
        arms.append(NormalArm(u=fields[0], v=fields[1], sigma2=fields[2]))
    return tuple(arms)


def cmd_simulate(args) -> int:
    conf = _read_config_file(args.config) if args.config else {}
    # flags override the config file
    arms_text = args.arms or conf.get("arms")
    beta = args.beta if args.beta is not None else float(conf.get("beta", "nan"))
    reps = args.replications if args.replications is not None \
        else int(conf.get("replications", "0"))
    seed = args.seed if args.seed is not None else int(conf.get("seed", "0"))
    policies_text = args.policies or conf.get("policies", "exact,greedy")
    tol = args.truncation_tol if args.truncation_tol is not None \
        else float(conf.get("truncation_tol", "1e-6"))
    if not arms_text or not math.isfinite(beta) or reps < 1:
        raise ConfigurationError(
            "simulate requires arms, beta and replications (flags or config)"
        )
    cfg = sim.BanditConfig(arms=_parse_arms(arms_text), beta=beta,
                           replications=reps, seed=seed, truncation_tol=tol)
    results = sim.compare(cfg, policies_text.split(","),
                          n_workers=args.workers)
    if args.format == "json":
        json.dump([{"policy": r.policy, "mean": r.mean_discounted_reward,
                    "std_err": r.std_err, "replications": r.replications,
                    "mean_pulls_per_arm": list(r.mean_pulls_per_arm)}
                   for r in results], sys.stdout, indent=2)
        sys.stdout.write("\n")
    else:
        sys.stdout.write(sim.compare_csv(results))
    return 0


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--precision", type=int, default=3)
    p.add_argument("--seed", type=int, default=None)


def _add_dp_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--dz", type=float, default=None)
    p.add_argument("--horizon-s-min", type=float, default=None)
    p.add_argument("--quadrature-order", type=int, default=None)


def _float_list(text: str) -> list[float]:
    return [float(x) for x in text.split(",")]


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",")]


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gittins")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("index", help="compute one index value")
    p.add_argument("--u0", type=float, default=0.0)
    p.add_argument("--v0", type=float, required=True)
    p.add_argument("--sigma2", type=float, default=1.0)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--method", default="exact",
                   choices=("exact", "ca", "ca_prime", "ua", "ua_prime",
                            "avg", "wiener", "all"))
    _add_dp_flags(p)
    _add_common(p)
    p.set_defaults(fn=cmd_index)

    p = sub.add_parser("table1", help="scaled indices and approximations")
    p.add_argument("--beta", type=_float_list, default=None)
    p.add_argument("--n", type=_int_list, default=None)
    p.add_argument("--methods", default=None)
    _add_dp_flags(p)
    _add_common(p)
    p.set_defaults(fn=cmd_table1)

    p = sub.add_parser("table2", help="large-n limits of the approximations")
    p.add_argument("--beta", type=_float_list, default=None)
    p.add_argument("--exact-n", type=int, default=None)
    _add_dp_flags(p)
    _add_common(p)
    p.set_defaults(fn=cmd_table2)

    p = sub.add_parser("boundary", help="dump a solved boundary table as CSV")
    p.add_argument("--s-min", type=float, default=0.03)
    p.add_argument("--s-max", type=float, default=5.0)
    p.add_argument("--ds", type=float, default=2.9e-4)
    p.add_argument("--ds-rel", type=float, default=0.0)
    p.add_argument("--dz", type=float, default=2e-3)
    p.add_argument("--z-min", type=float, default=None)
    p.add_argument("--z-max", type=float, default=None)
    _add_common(p)
    p.add_argument("--quadrature-order", type=int, default=None)
    p.set_defaults(fn=cmd_boundary)

    p = sub.add_parser("rho", help="Monte Carlo ladder-height estimate of 0.583")
    p.add_argument("--n-samples", type=int, default=1_000_000)
    p.add_argument("--step-cap", type=int, default=30_000)
    _add_common(p)
    p.set_defaults(fn=cmd_rho)

    p = sub.add_parser("simulate", help="compare bandit policies")
    p.add_argument("--config", default=None, help="key = value config file")
    p.add_argument("--arms", default=None,
                   help='semicolon-separated "u,v[,sigma2]" triples')
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--replications", type=int, default=None)
    p.add_argument("--policies", default=None)
    p.add_argument("--truncation-tol", type=float, default=None)
    p.add_argument("--workers", type=int, default=1)
    _add_common(p)
    p.set_defaults(fn=cmd_simulate)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
