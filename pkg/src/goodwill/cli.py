"""Command-line front end.

    goodwill compare --out results --u 0.5
    goodwill extend --config run.json --delta 20

Every command computes all of its results before writing any file, so a
failing run leaves no partial output.  Exit status: 0 success, 1
configuration or validation error, 2 numerical or domain error, 3 I/O
error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import RunConfig, load_config, validate
from .errors import DomainError, ValidationError
from .estate import Estate, Uniform, estate_rate
from .growth import simulate
from .ledger import rotation_integrals
from .returns import base_rate
from .strategy import (
    RE, compare_strategies, evaluate, extend_rotation, optimize_rotation,
    parallel_map, run_plan, sweep_rotation,
)
from .tables import fmt, render_summary, render_trajectory, write

COMMANDS = ("simulate", "evaluate", "sweep", "optimize", "compare", "extend", "estate")


def _curve_name(label, strategy, u, suffix=""):
    return f"{label}_{strategy.lower()}{suffix}_u{fmt(u)}.csv"


def _u(cfg, scenario):
    return scenario.goodwill_u if cfg.u is None else cfg.u


def cmd_simulate(cfg: RunConfig):
    files, lines = {}, []
    for sc in cfg.scenarios:
        traj = simulate(sc, cfg.plan, cfg.grid_step)
        files[f"{sc.label}_trajectory.csv"] = render_trajectory(traj.ages, traj.tree_value)
        for strategy in cfg.strategies:
            series = run_plan(sc, cfg.plan, strategy, cfg.grid_step)
            files[f"{sc.label}_{strategy.lower()}_ledger.csv"] = series.export_ledger()
        removed = sum(imp.value_removed for imp in traj.thinning_impulses())
        lines.append(f"{sc.label}: rotation={fmt(cfg.plan.rotation)} "
                     f"standing_value={fmt(traj.tree_value[-1])} thinning_revenue={fmt(removed)}")
    return files, lines


def cmd_evaluate(cfg: RunConfig):
    files, lines = {}, []
    for sc in cfg.scenarios:
        for strategy in cfg.strategies:
            res = evaluate(sc, cfg.plan, strategy, _u(cfg, sc), cfg.grid_step)
            series = run_plan(sc, cfg.plan, strategy, cfg.grid_step)
            files[f"{sc.label}_{strategy.lower()}_ledger.csv"] = series.export_ledger()
            lines.append(f"{sc.label} {strategy}: u={fmt(res.u)} rotation={fmt(res.rotation)} "
                         f"plan={res.plan.describe()} rate={fmt(res.rate)}")
    return files, lines


def _sweeps(cfg):
    jobs = [(sc, s) for sc in cfg.scenarios for s in cfg.strategies]
    curves = parallel_map(
        lambda job: sweep_rotation(job[0], job[1], _u(cfg, job[0]), cfg.grid, cfg.grid_step),
        jobs)
    return curves


def cmd_sweep(cfg: RunConfig, report_optimum=False):
    files, lines = {}, []
    for curve in _sweeps(cfg):
        files[_curve_name(curve.label, curve.strategy, curve.u)] = curve.export()
        best = optimize_rotation(curve)
        if report_optimum:
            lines.append(f"{curve.label} {curve.strategy}: u={fmt(curve.u)} "
                         f"rotation={fmt(best.rotation)} plan={best.plan.describe()} "
                         f"rate={fmt(best.rate)}")
        else:
            lines.append(f"{curve.label} {curve.strategy}: u={fmt(curve.u)} "
                         f"{len(curve.samples)} rotations, max rate={fmt(best.rate)}")
    return files, lines


def cmd_compare(cfg: RunConfig):
    comps = parallel_map(
        lambda sc: compare_strategies(sc, _u(cfg, sc), cfg.grid, cfg.grid_step), cfg.scenarios)
    files, lines = {}, []
    for c in comps:
        for curve in (c.ts_curve, c.re_curve):
            files[_curve_name(c.label, curve.strategy, curve.u)] = curve.export()
        lines.append(f"{c.label}: u={fmt(c.u)} TS*={fmt(c.ts.rate)}@{fmt(c.ts.rotation)} "
                     f"RE*={fmt(c.re.rate)}@{fmt(c.re.rotation)} ratio={fmt(c.ratio)} "
                     f"rotation_difference={fmt(c.rotation_difference)}")
    files["compare_summary.csv"] = render_summary(c.summary_row() for c in comps)
    return files, lines


def cmd_extend(cfg: RunConfig):
    exts = parallel_map(
        lambda sc: extend_rotation(sc, _u(cfg, sc), cfg.delta, cfg.grid, cfg.grid_step),
        cfg.scenarios)
    files, lines = {}, []
    for sc, ext in zip(cfg.scenarios, exts):
        u = ext.baseline.u
        files[_curve_name(sc.label, RE, u)] = ext.curve.export()
        files[_curve_name(sc.label, RE, u, "_extended")] = ext.constrained.export()
        lines.append(
            f"{sc.label}: u={fmt(u)} delta={fmt(ext.delta)} "
            f"baseline={fmt(ext.baseline.rate)}@{fmt(ext.baseline.rotation)} "
            f"extended={fmt(ext.extended.rate)}@{fmt(ext.extended.rotation)} "
            f"plan={ext.extended.plan.describe()} unthinned={fmt(ext.unthinned.rate)} "
            f"loss={fmt(ext.rate_loss)}")
    return files, lines


def cmd_estate(cfg: RunConfig):
    files, lines = {}, []
    dist = cfg.distribution or Uniform(cfg.plan.rotation)
    for sc in cfg.scenarios:
        for strategy in cfg.strategies:
            series = run_plan(sc, cfg.plan, strategy, cfg.grid_step)
            rate = estate_rate(Estate(sc, dist), series)
            base = base_rate(rotation_integrals(series)).rate
            lines.append(f"{sc.label} {strategy}: estate_rate={fmt(rate)} base_rate={fmt(base)} "
                         f"difference={fmt(abs(rate - base))}")
    return files, lines


HANDLERS = {
    "simulate": cmd_simulate,
    "evaluate": cmd_evaluate,
    "sweep": cmd_sweep,
    "optimize": lambda cfg: cmd_sweep(cfg, report_optimum=True),
    "compare": cmd_compare,
    "extend": cmd_extend,
    "estate": cmd_estate,
}


def build_parser():
    p = argparse.ArgumentParser(
        prog="goodwill",
        description="Stand-level capital return under timber-sales and real-estate strategies.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", help="JSON run configuration")
    p.add_argument("--out", help="output directory")
    p.add_argument("--u", type=float, help="goodwill premium (default 0.5)")
    p.add_argument("--strategy", choices=["ts", "re", "both"])
    p.add_argument("--delta", type=float, help="rotation extension in years (extend)")
    p.add_argument("--grid-step", type=float, dest="grid_step",
                   help="simulation grid step in years (default 0.25)")
    return p


def run(command: str, cfg: RunConfig):
    """Execute ``command`` and write its files; returns the summary lines."""
    files, lines = HANDLERS[command](cfg)
    if files:
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        for name in sorted(files):
            write(out / name, files[name])
    return lines


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config) if args.config else RunConfig()
        if args.out:
            cfg.out = Path(args.out)
        if args.u is not None:
            cfg.u = args.u
        if args.strategy:
            cfg.strategy = args.strategy
        if args.delta is not None:
            cfg.delta = args.delta
        if args.grid_step is not None:
            cfg.grid_step = args.grid_step
        validate(cfg)
        lines = run(args.command, cfg)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (DomainError, ArithmeticError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 3
    for line in lines:
        print(line)
    return 0


if __name__ == "__main__":
    sys.exit(main())
