"""Command line front end.

Subcommands:

* ``run``: iterate a scenario to equilibrium, print a report, and write the
  trajectory CSV plus a rendered figure alongside it.
* ``verify``: run a scenario file or a named built-in suite and print one
  PASS/FAIL line per check.  Output is byte-identical for a fixed seed.
* ``conditions``: print the invariant interval and the theorem conditions.
* ``sweep``: solve from a range of starting balances and write the results
  as CSV plus a figure.

Exit codes: 0 success, 2 no equilibrium (divergence or iteration budget),
3 invalid input, 4 property violation.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .curves import ZERO_CURVE, YieldCurve
from .dynamics import CurveAssignment, trajectory
from .report import (render_conditions, render_run_report,
                     render_sweep_summary, write_sweep_csv,
                     write_trajectory_csv)
from .scenario import Scenario, ScenarioError, resolve_scenario
from .solver import (aligned_spread, check_conditions,
                     construct_invariant_interval, cycle_rate_bound,
                     find_equilibrium)
from .suites import run_scenario_suite, run_suite, SUITES

EXIT_OK = 0
EXIT_NO_EQUILIBRIUM = 2
EXIT_INVALID = 3
EXIT_VIOLATION = 4


def _parse_pair(text: str, scenario: Scenario) -> tuple[str, str]:
    parts = tuple(p.strip() for p in text.split(","))
    if len(parts) != 2 or not all(parts):
        raise ScenarioError("--pair expects two comma-separated entity names")
    for name in parts:
        if name not in scenario.entities:
            raise ScenarioError(f"--pair names unknown entity {name!r}")
    if parts[0] == parts[1]:
        raise ScenarioError("--pair needs two distinct entities")
    return parts


def _parse_starts(text: str) -> np.ndarray:
    parts = text.split(":")
    if len(parts) != 3:
        raise ScenarioError("--starts expects lower:upper:count")
    try:
        lower, upper = float(parts[0]), float(parts[1])
        count = int(parts[2])
    except ValueError as exc:
        raise ScenarioError(f"--starts {text!r} is not numeric") from exc
    if count < 1:
        raise ScenarioError("--starts count must be at least 1")
    return np.linspace(lower, upper, count)


def _direction_curve(curves: CurveAssignment, giver: str, receiver: str) -> YieldCurve:
    for key, curve in sorted(curves.items()):
        if key[0] == giver and key[1] == receiver:
            return curve
    return ZERO_CURVE


def _resolve(ref: str) -> Scenario:
    return resolve_scenario(ref)


def cmd_run(args: argparse.Namespace) -> int:
    scenario = _resolve(args.scenario)
    pair = _parse_pair(args.pair, scenario) if args.pair else scenario.default_pair()
    run = scenario.run
    x0 = run.x0 if args.x0 is None else args.x0

    result = find_equilibrium(scenario.schedule, pair, scenario.curves, x0=x0,
                              tol=run.tol, max_iter=run.max_iter)
    interval = construct_invariant_interval(scenario.schedule, pair, scenario.curves)
    conditions = check_conditions(scenario.schedule, pair, scenario.curves, interval)
    bound = cycle_rate_bound(scenario.schedule, pair, scenario.curves, interval)
    sys.stdout.write(render_run_report(scenario.name, pair, scenario.schedule.order,
                                       result, interval, conditions, bound))

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    steps = args.steps if args.steps is not None else 50
    path = trajectory(scenario.schedule, pair, scenario.curves, x0, steps)
    csv_path = out_dir / f"{scenario.name}_trajectory.csv"
    write_trajectory_csv(csv_path, path)

    from .plots import save_run_figure

    png_path = out_dir / f"{scenario.name}_run.png"
    save_run_figure(png_path, scenario.name,
                    _direction_curve(scenario.curves, pair[0], pair[1]),
                    _direction_curve(scenario.curves, pair[1], pair[0]),
                    path, result)
    sys.stdout.write(f"wrote: {csv_path.name}\n")
    sys.stdout.write(f"wrote: {png_path.name}\n")

    return EXIT_OK if result.converged else EXIT_NO_EQUILIBRIUM


def cmd_verify(args: argparse.Namespace) -> int:
    if args.suite and args.scenario:
        raise ScenarioError("give either a scenario file or --suite, not both")
    if args.suite:
        suite = run_suite(args.suite, seed=args.seed, count=args.count)
    elif args.scenario:
        suite = run_scenario_suite(_resolve(args.scenario), seed=args.seed)
    else:
        raise ScenarioError("verify needs a scenario file or --suite NAME")
    text = suite.render()
    sys.stdout.write(text)
    if args.out:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        report_path = out_dir / f"{suite.name}_report.txt"
        report_path.write_text(text)
    return EXIT_OK if suite.passed else EXIT_VIOLATION


def cmd_conditions(args: argparse.Namespace) -> int:
    scenario = _resolve(args.scenario)
    pair = _parse_pair(args.pair, scenario) if args.pair else scenario.default_pair()
    interval = construct_invariant_interval(scenario.schedule, pair, scenario.curves)
    report = check_conditions(scenario.schedule, pair, scenario.curves, interval,
                              samples=args.samples)
    sys.stdout.write(f"scenario: {scenario.name}\n")
    sys.stdout.write(f"pair: {pair[0]},{pair[1]}\n")
    sys.stdout.write(render_conditions(interval, report))
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    scenario = _resolve(args.scenario)
    pair = _parse_pair(args.pair, scenario) if args.pair else scenario.default_pair()
    starts = _parse_starts(args.starts)
    run = scenario.run
    results = [find_equilibrium(scenario.schedule, pair, scenario.curves,
                                x0=float(s), tol=run.tol, max_iter=run.max_iter)
               for s in starts]

    converged = [r for r in results if r.converged]
    spread: Optional[float] = None
    if len(converged) >= 2:
        first = converged[0]
        spread = max(aligned_spread(first.u, r.u) for r in converged[1:])
    sys.stdout.write(f"scenario: {scenario.name}\n")
    sys.stdout.write(render_sweep_summary([float(s) for s in starts], results, spread))

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"{scenario.name}_sweep.csv"
    write_sweep_csv(csv_path, [float(s) for s in starts], results)

    from .plots import save_sweep_figure

    png_path = out_dir / f"{scenario.name}_sweep.png"
    save_sweep_figure(png_path, scenario.name, [float(s) for s in starts], results)
    sys.stdout.write(f"wrote: {csv_path.name}\n")
    sys.stdout.write(f"wrote: {png_path.name}\n")

    return EXIT_OK if all(r.converged for r in results) else EXIT_NO_EQUILIBRIUM


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gifteq",
        description="Simulate and verify cyclic gift-exchange scenarios.")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="iterate a scenario to equilibrium")
    run_p.add_argument("scenario", help="scenario file or built-in name")
    run_p.add_argument("--pair", help="entity pair as GIVER,RECEIVER")
    run_p.add_argument("--steps", type=int, default=None,
                       help="trajectory steps to record (default 50)")
    run_p.add_argument("--x0", type=float, default=None,
                       help="starting balance override")
    run_p.add_argument("--out", default=".", help="output directory")
    run_p.set_defaults(func=cmd_run)

    verify_p = sub.add_parser("verify", help="run verification checks")
    verify_p.add_argument("scenario", nargs="?", default=None,
                          help="scenario file or built-in name")
    verify_p.add_argument("--suite", choices=sorted(SUITES),
                          help="named built-in suite")
    verify_p.add_argument("--seed", type=int, default=0)
    verify_p.add_argument("--count", type=int, default=None,
                          help="scenario count for the random suite")
    verify_p.add_argument("--out", default=None,
                          help="also save the report under this directory")
    verify_p.set_defaults(func=cmd_verify)

    cond_p = sub.add_parser("conditions", help="report the theorem conditions")
    cond_p.add_argument("scenario", help="scenario file or built-in name")
    cond_p.add_argument("--pair", help="entity pair as GIVER,RECEIVER")
    cond_p.add_argument("--samples", type=int, default=256,
                        help="sample count for empirical closure checking")
    cond_p.set_defaults(func=cmd_conditions)

    sweep_p = sub.add_parser("sweep", help="solve from a range of starts")
    sweep_p.add_argument("scenario", help="scenario file or built-in name")
    sweep_p.add_argument("--starts", required=True,
                         help="start range as lower:upper:count")
    sweep_p.add_argument("--pair", help="entity pair as GIVER,RECEIVER")
    sweep_p.add_argument("--out", default=".", help="output directory")
    sweep_p.set_defaults(func=cmd_sweep)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ScenarioError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INVALID
    except FileNotFoundError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INVALID
    except ValueError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
