"""Command-line entry point.

Subcommands: run, ecdf, sweep, ode, list-objectives.  A JSON config file
mirroring the RunConfig field names may be given with --config; explicit
flags override file values.  Exit codes: 0 success, 1 config error,
2 runtime error.
"""

import argparse
import dataclasses
import json
import os
import sys

from . import harness, ode
from .errors import InvalidConfig, LracmaError
from .harness import RunConfig
from .objectives import objective_names

_CFG_FIELDS = {f.name for f in dataclasses.fields(RunConfig)}


def _add_run_flags(p):
    p.add_argument("--config", help="JSON file with RunConfig fields")
    p.add_argument("--objective")
    p.add_argument("--dim", type=int)
    p.add_argument("--noise-variance", type=float, dest="noise_variance")
    p.add_argument("--algorithm", choices=["lra", "fixed"])
    p.add_argument("--eta-m", type=float, dest="eta_m")
    p.add_argument("--eta-sigma", type=float, dest="eta_sigma")
    p.add_argument("--lambda", type=int, dest="lam")
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta-m", type=float, dest="beta_m")
    p.add_argument("--beta-sigma", type=float, dest="beta_sigma")
    p.add_argument("--gamma", type=float)
    p.add_argument("--budget", type=int)
    p.add_argument("--target", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--history-stride", type=int, dest="history_stride")
    p.add_argument("--rotated", action="store_true", default=None)
    p.add_argument("--n-targets", type=int, dest="n_targets")
    p.add_argument("--out-dir", default=".")
    p.add_argument("--jobs", type=int, default=1)


def _build_config(args):
    values = {}
    if args.config:
        with open(args.config) as fh:
            file_values = json.load(fh)
        unknown = set(file_values) - _CFG_FIELDS
        if unknown:
            raise InvalidConfig(f"unknown config keys: {sorted(unknown)}")
        values.update(file_values)
    for name in _CFG_FIELDS:
        flag = getattr(args, name, None)
        if flag is not None:
            values[name] = flag
    if "objective" not in values or values["objective"] is None:
        raise InvalidConfig("objective is required")
    if values["objective"] not in objective_names():
        raise InvalidConfig(f"unknown objective {values['objective']!r}")
    if "dim" not in values or values["dim"] is None:
        raise InvalidConfig("dim is required")
    return RunConfig(**values).resolved()


def _summary(label, records):
    rate = harness.success_rate(records)
    s = harness.sp1(records)
    s_txt = f"{s:.6g}" if s is not None else "n/a"
    print(f"{label}: success_rate={rate:.3f} sp1={s_txt}")


def _cmd_run(args):
    cfg = _build_config(args)
    os.makedirs(args.out_dir, exist_ok=True)
    records = harness.run_config(cfg, jobs=args.jobs)
    harness.write_trials_csv(records, os.path.join(args.out_dir, "trials.csv"))
    harness.write_history_csv(records, os.path.join(args.out_dir, "history.csv"))
    _summary(f"{cfg.objective} d={cfg.dim} {cfg.algorithm}", records)
    return 0


def _cmd_ecdf(args):
    cfg = _build_config(args)
    os.makedirs(args.out_dir, exist_ok=True)
    grid = harness.ecdf_grid(cfg.budget)
    curves = {}
    for alg in args.algorithms:
        acfg = dataclasses.replace(cfg, algorithm=alg)
        records = harness.run_config(acfg, jobs=args.jobs)
        curves[alg] = harness.ecdf_curve(records, grid)
        _summary(f"{cfg.objective} d={cfg.dim} {alg}", records)
    harness.write_ecdf_csv(grid, curves, os.path.join(args.out_dir, "ecdf.csv"))
    return 0


def _cmd_sweep(args):
    cfg = _build_config(args)
    os.makedirs(args.out_dir, exist_ok=True)
    values = [type_for_param(args.param)(v) for v in args.values]
    rows = harness.sweep(cfg, args.param, values, jobs=args.jobs)
    harness.write_sweep_csv(rows, args.param, os.path.join(args.out_dir, "sweep.csv"))
    for value, rate, s in rows:
        s_txt = f"{s:.6g}" if s is not None else "n/a"
        print(f"{args.param}={value}: success_rate={rate:.3f} sp1={s_txt}")
    return 0


def type_for_param(param):
    return int if param in ("lam", "budget", "trials") else float


def _cmd_ode(args):
    os.makedirs(args.out_dir, exist_ok=True)
    traj = ode.euler_integrate(args.m0, args.v0, args.eta, args.steps, thin=args.thin)
    name = f"ode_eta{args.eta:g}_m{args.m0:g}_v{args.v0:g}.csv"
    path = os.path.join(args.out_dir, name)
    ode.write_ode_csv(traj, path)
    print(
        f"ode: eta={args.eta:g} final m={traj.m[-1]:.6g} v={traj.v[-1]:.6g}"
        f"{' (degenerate)' if traj.degenerate else ''} -> {path}"
    )
    return 0


def _cmd_list(args):
    for name in objective_names():
        print(name)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="lracma",
        description="CMA-ES with online learning-rate adaptation: benchmark runner",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run trials, write trials.csv + history.csv")
    _add_run_flags(p_run)
    p_run.set_defaults(fn=_cmd_run)

    p_ecdf = sub.add_parser("ecdf", help="run trials per algorithm, write ecdf.csv")
    _add_run_flags(p_ecdf)
    p_ecdf.add_argument(
        "--algorithms", nargs="+", default=["lra", "fixed"], choices=["lra", "fixed"]
    )
    p_ecdf.set_defaults(fn=_cmd_ecdf)

    p_sweep = sub.add_parser("sweep", help="sweep one parameter, write sweep.csv")
    _add_run_flags(p_sweep)
    p_sweep.add_argument("--param", required=True)
    p_sweep.add_argument("--values", nargs="+", required=True)
    p_sweep.set_defaults(fn=_cmd_sweep)

    p_ode = sub.add_parser("ode", help="integrate the 1-D mean/variance flow")
    p_ode.add_argument("--eta", type=float, required=True)
    p_ode.add_argument("--m0", type=float, default=3.0)
    p_ode.add_argument("--v0", type=float, default=2.0)
    p_ode.add_argument("--steps", type=int, default=int(1e7))
    p_ode.add_argument("--thin", type=int, default=1000)
    p_ode.add_argument("--out-dir", default=".")
    p_ode.set_defaults(fn=_cmd_ode)

    p_list = sub.add_parser("list-objectives", help="print registered objective names")
    p_list.set_defaults(fn=_cmd_list)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (InvalidConfig, FileNotFoundError, json.JSONDecodeError, TypeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except LracmaError as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
