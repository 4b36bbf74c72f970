"""``reachged`` command line: verify-bounds, verify-theory, sweep, decide.

Exit codes: 0 success, 2 validation error, 3 acceptance failure.
"""
import argparse
import json
import math
import os
import sys
from dataclasses import replace

from reachged import bounds, montecarlo, planner, theory
from reachged._parallel import WORKERS_ENV
from reachged.config import OUTPUT_FORMATS, ConfigError, load_config

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_FAILED = 3

SWEEP_COLUMNS = ("rho", "p_D", "branch", "regime", "p_E", "q", "expected_ged",
                 "weighted_cost", "latency", "at_knee", "knee_pD_exact")
BOUNDS_COLUMNS = ("bound", "checked", "violations", "tight", "min_rel_slack", "gated")
THEORY_COLUMNS = ("experiment", "p_D", "p_E", "tau", "replications", "empirical",
                  "std_error", "target", "z", "gap", "tolerance", "gated", "passed")

Z_LIMIT = 4.0
DENSE_PATHS = 32
DENSE_GAP_TOL = 0.02


def _csv_cell(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return "" if math.isnan(value) else format(value, ".12g")
    text = str(value)
    if any(c in text for c in ',"\n'):
        text = '"' + text.replace('"', '""') + '"'
    return text


def _json_cell(value):
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g") if math.isfinite(value) else "null"
    if isinstance(value, int):
        return str(value)
    return json.dumps(str(value))


def render(rows, columns, fmt):
    """Serialize dict rows; the column order is fixed by ``columns``."""
    if fmt == "csv":
        lines = [",".join(columns)]
        lines += [",".join(_csv_cell(row.get(c)) for c in columns) for row in rows]
        return "\n".join(lines) + "\n"
    if fmt == "json":
        objs = ["  {" + ", ".join(f"{json.dumps(c)}: {_json_cell(row.get(c))}" for c in columns) + "}"
                for row in rows]
        return "[\n" + ",\n".join(objs) + ("\n]\n" if objs else "]\n")
    raise ValueError(f"unknown output format {fmt!r}")


def _write(text, path):
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _workers(args, config):
    if args.workers is not None:
        return args.workers
    env = os.environ.get(WORKERS_ENV)
    if env:
        return max(1, int(env))
    return config.workers or 1


def cmd_verify_bounds(args, config):
    instances = args.instances or config.instances
    result = bounds.run_battery(
        instances, config.seed, config.thresholds, include_absolute=args.include_absolute,
        workers=_workers(args, config),
    )
    informational = ("singular_lower_E_abs", "singular_lower_D_abs")
    rows = [
        {"bound": name, "checked": s.checked, "violations": s.violations, "tight": s.tight,
         "min_rel_slack": s.min_rel_slack, "gated": name not in informational}
        for name, s in sorted(result.stats.items())
    ]
    _write(render(rows, BOUNDS_COLUMNS, config.output_format), config.output_path)
    if not result.ok:
        for v in result.violations[:20]:
            print("violation: " + json.dumps(v, sort_keys=True, default=float), file=sys.stderr)
        print(f"{len(result.violations)} violations; reproduce with --seed {config.seed}", file=sys.stderr)
        return EXIT_FAILED
    return EXIT_OK


def _dense_point(params):
    p = min(1.0, math.sqrt(DENSE_PATHS / params.N))
    return p, p, theory.sigma_A(params, p, p)


def _reach_reps(params, replications):
    return max(replications, 2, math.ceil(100_000 / (params.K * params.L)))


def cmd_verify_theory(args, config):
    params, th, seed = config.ensemble, config.thresholds, config.seed
    reps = config.replications
    workers = _workers(args, config)
    rows = []

    risk = montecarlo.run_risk_experiment(params, reps, seed, workers)
    for name, target, z, gated in (
        ("risk_exact", risk.theoretical, risk.z_score, True),
        ("risk_energy_bias", risk.energy_bias_theoretical, risk.energy_bias_z_score, False),
    ):
        rows.append({
            "experiment": name, "p_D": params.p_D, "p_E": params.p_E, "tau": None,
            "replications": reps, "empirical": risk.empirical.mean,
            "std_error": risk.empirical.std_error, "target": target, "z": z, "gap": None,
            "tolerance": Z_LIMIT, "gated": gated, "passed": abs(z) <= Z_LIMIT,
        })

    p_D, p_E, tau = _dense_point(params)
    for name, (pd, pe, t), gated in (
        ("reach_dense", (p_D, p_E, tau), True),
        ("reach_configured", (params.p_D, params.p_E, th.tau), False),
    ):
        n = _reach_reps(params, reps)
        reach = montecarlo.run_reach_experiment(params, pd, pe, t, n, seed, workers)
        rows.append({
            "experiment": name, "p_D": pd, "p_E": pe, "tau": t, "replications": n,
            "empirical": reach.empirical_q.mean, "std_error": reach.empirical_q.std_error,
            "target": reach.surrogate_q, "z": None, "gap": reach.gap,
            "tolerance": DENSE_GAP_TOL, "gated": gated, "passed": abs(reach.gap) <= DENSE_GAP_TOL,
        })

    ged = montecarlo.run_ged_experiment(params, params.p_D, params.p_E, th, config.costs, reps,
                                        seed, workers)
    for name, target, z, gated in (
        ("ged_decoupled", ged.decoupled_ged, ged.z_decoupled, True),
        ("ged_surrogate", ged.theoretical_ged, ged.z_surrogate, False),
    ):
        rows.append({
            "experiment": name, "p_D": params.p_D, "p_E": params.p_E, "tau": th.tau,
            "replications": reps, "empirical": ged.empirical_ged.mean,
            "std_error": ged.empirical_ged.std_error, "target": target, "z": z, "gap": None,
            "tolerance": Z_LIMIT, "gated": gated, "passed": abs(z) <= Z_LIMIT,
        })

    _write(render(rows, THEORY_COLUMNS, config.output_format), config.output_path)
    failed = [r["experiment"] for r in rows if r["gated"] and not r["passed"]]
    if failed:
        print(f"failed: {', '.join(failed)}; reproduce with --seed {seed}", file=sys.stderr)
        return EXIT_FAILED
    return EXIT_OK


def cmd_sweep(args, config):
    grid = planner.p_D_grid(*config.p_D_grid)
    rows = []
    for rho in config.rhos:
        rows += planner.sweep_pd(config.ensemble, config.costs_for(rho), config.thresholds, grid,
                                 config.latency_weights, envelope=args.envelope)
    dicts = [{c: getattr(r, c) for c in SWEEP_COLUMNS} for r in rows]
    _write(render(dicts, SWEEP_COLUMNS, config.output_format), config.output_path)
    return EXIT_OK


def cmd_decide(args, config):
    variant = args.slope_variant or config.slope_variant
    d = planner.boundary_decision(config.ensemble, config.costs, config.thresholds, variant)
    line = f"s={d.slope:.3f} variant={d.variant} action={d.action}\n"
    _write(line, config.output_path)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="reachged", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI config file (omitted keys take defaults)")
    common.add_argument("--seed", type=lambda s: int(s, 0), help="override [run] seed")
    common.add_argument("--output", help="output file (default: stdout)")
    common.add_argument("--format", choices=OUTPUT_FORMATS, help="override [run] output_format")
    common.add_argument("--workers", type=int, help=f"thread count (overrides ${WORKERS_ENV})")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-bounds", parents=[common], help="deterministic inequality battery")
    p.add_argument("--instances", type=int, help="override [run] instances")
    p.add_argument("--include-absolute", action="store_true",
                   help="also tally the two-sided singular-value form (informational)")
    p.set_defaults(func=cmd_verify_bounds)

    p = sub.add_parser("verify-theory", parents=[common], help="Monte Carlo checks of the closed forms")
    p.set_defaults(func=cmd_verify_theory)

    p = sub.add_parser("sweep", parents=[common], help="two-branch p_D sweep for each rho")
    p.add_argument("--no-envelope", dest="envelope", action="store_false",
                   help="omit the cost-optimal envelope rows")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("decide", parents=[common], help="boundary-rule decision")
    p.add_argument("--slope-variant", choices=theory.SLOPE_VARIANTS)
    p.set_defaults(func=cmd_decide)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
        overrides = {}
        if args.seed is not None:
            if not 0 <= args.seed < 2 ** 64:
                raise ConfigError("--seed must be a 64-bit unsigned integer")
            overrides["seed"] = args.seed
        if args.output is not None:
            overrides["output_path"] = args.output
        if args.format is not None:
            overrides["output_format"] = args.format
        if args.workers is not None and args.workers < 1:
            raise ConfigError("--workers must be positive")
        if getattr(args, "instances", None) is not None and args.instances < 1:
            raise ConfigError("--instances must be positive")
        config = replace(config, **overrides)
        return args.func(args, config)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
