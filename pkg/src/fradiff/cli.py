"""Command-line front end.

Exit codes: 0 all checks passed, 1 an audit or criterion failed,
2 usage/configuration error (argparse's own convention for bad flags).
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .acceptance import run_suite
from .analysis import FitError, fit_decay_exponent
from .config import ConfigError, parse_config_file, initial_field
from .mittag import TimeMesh, mittag_leffler, solve_scalar_fode
from .operators import predicted_gamma
from .runner import read_report_csv, run_scenario
from .stepping import HistoryBuffer, StepError, step
from .analysis import check_sa


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fradiff",
        description="Time-fractional evolution lab: run scenarios, audit "
                    "energy inequalities, fit decay exponents.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a scenario from a config file")
    p.add_argument("config")

    p = sub.add_parser("ml", help="evaluate the Mittag-Leffler function")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--z", type=float, required=True)

    p = sub.add_parser("fode", help="solve d_t^a w = -w^g / C and fit barrier")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--v0", type=float, required=True)
    p.add_argument("--t-end", type=float, required=True)
    p.add_argument("--steps", type=int, default=400)

    p = sub.add_parser("fit", help="fit a tail decay exponent from a CSV")
    p.add_argument("csv")
    p.add_argument("--column", type=str, default="2")
    p.add_argument("--tail-fraction", type=float, default=0.9)

    p = sub.add_parser("check-sa", help="structural-inequality ratio at a step")
    p.add_argument("config")
    p.add_argument("--snapshot", type=int, required=True)

    p = sub.add_parser("suite", help="run the full acceptance matrix")
    p.add_argument("--output-dir", type=str, default=None)
    return parser


def _cmd_run(args) -> int:
    config = parse_config_file(args.config)
    report = run_scenario(config)
    s0 = report.s_list[0]
    print(f"steps completed: {len(report.times) - 1}")
    v = report.norms[s0]
    print(f"norm_s{s0:g}: {v[0]:.6g} -> {v[-1]:.6g}")
    print(f"predicted decay rate alpha/gamma = {report.predicted_rate:.6g}")
    if s0 in report.fitted:
        exp_, resid = report.fitted[s0]
        print(f"fitted tail exponent: {exp_:.6g} (log10 misfit {resid:.3g})")
    print(f"empirical decay constant C* = {report.cstar:.6g}")
    for key, ok in report.audits.items():
        print(f"audit {key}: {'pass' if ok else 'FAIL'}")
    for w in report.warnings:
        print(f"warning: {w}")
    if report.failure is not None:
        print(f"step failure: {report.failure}")
    if config.output_csv:
        print(f"wrote {config.output_csv}")
    ok = report.completed and all(report.audits.values())
    return 0 if ok else 1


def _cmd_ml(args) -> int:
    print(repr(float(mittag_leffler(args.alpha, args.z))))
    return 0


def _cmd_fode(args) -> int:
    mesh = TimeMesh(alpha=args.alpha, t_end=args.t_end, nsteps=args.steps,
                    grading=2.0 / args.alpha)
    sol = solve_scalar_fode(args.alpha, args.gamma, args.c, args.v0, mesh)
    print(f"w({mesh.t_end:g}) = {sol.values[-1]:.12g}")
    print(f"barrier knee constant Cbar = {sol.cbar:.12g}  (t0 = {sol.t0:.12g})")
    print(f"decay constant C* = {sol.cstar:.12g}")
    dominated = bool(np.all(sol.values <= sol.barrier_values() * (1 + 1e-10)))
    print(f"dominated by barrier at every node: {dominated}")
    return 0 if dominated else 1


def _cmd_fit(args) -> int:
    table = read_report_csv(args.csv)
    col = f"norm_s{args.column}"
    if col not in table:
        raise ConfigError(f"column {col!r} not in {sorted(table)}")
    exp_, resid = fit_decay_exponent(table["t"], table[col],
                                     tail_fraction=args.tail_fraction)
    print(repr(exp_))
    print(f"# rms log10 misfit {resid:.6g}")
    return 0


def _cmd_check_sa(args) -> int:
    config = parse_config_file(args.config)
    mesh = config.mesh
    if not 0 <= args.snapshot <= mesh.nsteps:
        raise ConfigError(f"snapshot {args.snapshot} outside 0..{mesh.nsteps}")
    history = HistoryBuffer(config.grid, mesh)
    history.append(initial_field(config).values)
    for k in range(1, args.snapshot + 1):
        history.append(step(config.operator, history, mesh, k,
                            tol_newton=config.tol_newton).values)
    gamma_ = predicted_gamma(config.operator)
    ratio = check_sa(history.field(args.snapshot), config.operator,
                     config.s_list[0], gamma_)
    print(f"sa_ratio at step {args.snapshot} (t={history.times[-1]:g}): "
          f"{ratio!r}")
    return 0 if ratio > 0.0 else 1


def _cmd_suite(args) -> int:
    suite = run_suite(output_dir=args.output_dir)
    print(suite.summary())
    return 0 if suite.passed else 1


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "run": _cmd_run,
        "ml": _cmd_ml,
        "fode": _cmd_fode,
        "fit": _cmd_fit,
        "check-sa": _cmd_check_sa,
        "suite": _cmd_suite,
    }
    try:
        return handlers[args.command](args)
    except (ConfigError, FitError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except StepError as exc:
        print(f"step failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
