"""Deterministic text and CSV rendering for command-line output.

Nothing here may depend on wall-clock time, absolute paths, or dict iteration
order: two runs with the same inputs must produce byte-identical output.
Floats are rendered with ``repr`` so round-trips are exact.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Optional, Sequence

from .dynamics import BalanceTrajectory
from .solver import ConditionReport, EquilibriumResult, InvariantInterval

CSV_COLUMNS = ("step_index", "phase", "balance", "p_yield", "q_yield")


def fmt_float(x: float) -> str:
    return repr(float(x))


def fmt_vector(values: Sequence[float]) -> str:
    return ", ".join(fmt_float(v) for v in values)


def fmt_interval(interval: InvariantInterval) -> str:
    lower = "-inf" if interval.lower == float("-inf") else fmt_float(interval.lower)
    upper = "inf" if interval.upper == float("inf") else fmt_float(interval.upper)
    return f"[{lower}, {upper}]"


def render_conditions(interval: InvariantInterval, report: ConditionReport) -> str:
    lines = [
        f"invariant-interval: {fmt_interval(interval)}",
        f"interval-unconstrained-below: {interval.lower_unconstrained}",
        f"interval-unconstrained-above: {interval.upper_unconstrained}",
        f"interval-closed-under-operators: {report.interval_closed_under_operators}",
        f"closure-checked-empirically: {report.closure_empirical}",
        f"curves-nonincreasing-nonexpanding: {report.all_curves_nonincreasing_nonexpanding}",
        f"uniformly-monotonous-step-exists: {report.exists_uniformly_monotonous_step}",
        f"contraction-step-exists: {report.exists_contraction_step}",
        f"witness-step: {report.witness_step}",
        f"theorem-applies: {report.theorem_applies}",
    ]
    return "\n".join(lines) + "\n"


def render_run_report(scenario_name: str, pair: tuple[str, str], order: int,
                      result: EquilibriumResult,
                      interval: Optional[InvariantInterval] = None,
                      conditions: Optional[ConditionReport] = None,
                      rate_bound: Optional[float] = None) -> str:
    lines = [
        f"scenario: {scenario_name}",
        f"pair: {pair[0]},{pair[1]}",
        f"cycle-order: {order}",
        f"status: {result.status}",
        f"iterations: {result.iterations}",
    ]
    if result.converged:
        lines.append(f"equilibrium: {fmt_vector(result.u)}")
        lines.append(f"zero-sum-residual: {fmt_float(result.zero_sum_residual)}")
        if result.rate_q is not None:
            lines.append(f"convergence-rate: {fmt_float(result.rate_q)}")
        else:
            lines.append("convergence-rate: not estimable")
    if result.note:
        lines.append(f"note: {result.note}")
    if interval is not None and conditions is not None:
        lines.append(render_conditions(interval, conditions).rstrip("\n"))
    if rate_bound is not None:
        lines.append(f"cycle-rate-bound: {fmt_float(rate_bound)}")
    return "\n".join(lines) + "\n"


def write_trajectory_csv(path: Path, trajectory: BalanceTrajectory) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(CSV_COLUMNS)
        for i, balance in enumerate(trajectory.balances):
            writer.writerow([
                i + 1,
                (i % trajectory.order) + 1,
                fmt_float(balance),
                fmt_float(trajectory.p_yields[i]),
                fmt_float(trajectory.q_yields[i]),
            ])


def write_sweep_csv(path: Path, starts: Sequence[float],
                    results: Sequence[EquilibriumResult]) -> None:
    order = max((len(r.u) for r in results if r.converged), default=0)
    header = ["start", "status", "iterations"]
    header.extend(f"u_{j + 1}" for j in range(order))
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        for start, result in zip(starts, results):
            row = [fmt_float(start), result.status, result.iterations]
            if result.converged:
                row.extend(fmt_float(v) for v in result.u)
            else:
                row.extend("" for _ in range(order))
            writer.writerow(row)


def render_sweep_summary(starts: Sequence[float],
                         results: Sequence[EquilibriumResult],
                         spread: Optional[float]) -> str:
    converged = sum(r.converged for r in results)
    lines = [
        f"starts: {len(starts)}",
        f"converged: {converged}",
    ]
    if spread is not None:
        lines.append(f"aligned-spread: {fmt_float(spread)}")
    for start, result in zip(starts, results):
        if result.converged:
            lines.append(f"start {fmt_float(start)}: {result.status} "
                         f"in {result.iterations} iterations")
        else:
            lines.append(f"start {fmt_float(start)}: {result.status}")
    return "\n".join(lines) + "\n"
