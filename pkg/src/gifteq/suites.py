"""Built-in verification suites driven by the command line and the tests.

Three suites:

* ``paper-graphs``: the bundled exchange scenarios with their known equilibria
  and the yield identities between solo and simultaneous steps.
* ``random``: seeded families of linear-flat scenarios; checks the zero sum of
  equilibrium yields, uniqueness across starts, and the sampled lemma checks.
* ``negative-controls``: deliberately invalid curves (slope magnitude > 1 built
  behind the validated constructors' back) must produce violations; the suite
  passes when the controls misbehave as predicted.

All output is deterministic for a fixed seed so repeated runs are
byte-identical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .checks import (account_map, check_L_contraction, check_L_nonexpanding,
                     check_composition, check_reflection, contraction,
                     NONEXPANDING)
from .curves import PiecewiseLinear, YieldCurve, linear_flat, zero_crossing
from .dynamics import CurveAssignment
from .model import Multiset, Schedule, Transaction
from .scenario import RunParams, Scenario, load_builtin_scenario
from .solver import (check_conditions, construct_invariant_interval,
                     cycle_rate_bound, default_starts, equilibrium_yields,
                     find_equilibrium, verify_uniqueness, verify_zero_sum)

IDENTITY_TOL = 1e-8
ZERO_SUM_TOL = 1e-9
UNIQUENESS_TOL = 1e-6
PAPER_GRAPH_NAMES = ("graph_II_5", "graph_II_6", "graph_II_7",
                     "graph_II_8", "graph_II_9")


@dataclass(frozen=True)
class SuiteLine:
    passed: bool
    label: str
    detail: str

    def render(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.label}: {self.detail}"


@dataclass(frozen=True)
class SuiteResult:
    name: str
    seed: int
    lines: tuple[SuiteLine, ...]

    @property
    def passed(self) -> bool:
        return all(line.passed for line in self.lines)

    def render(self) -> str:
        out = [f"suite: {self.name}", f"seed: {self.seed}"]
        out.extend(line.render() for line in self.lines)
        good = sum(line.passed for line in self.lines)
        out.append(f"summary: {good}/{len(self.lines)} passed")
        return "\n".join(out) + "\n"


def _fmt(x: float) -> str:
    return repr(float(x))


def _scenario_lines(scenario: Scenario, seed: int) -> list[SuiteLine]:
    """Common per-scenario checks: convergence, conditions, zero sum, rate, lemmas."""
    name = scenario.name
    pair = scenario.default_pair()
    schedule, curves, run = scenario.schedule, scenario.curves, scenario.run
    lines: list[SuiteLine] = []

    interval = construct_invariant_interval(schedule, pair, curves)
    report = check_conditions(schedule, pair, curves, interval)
    lines.append(SuiteLine(report.theorem_applies, f"{name}.conditions",
                           f"closed={report.interval_closed_under_operators} "
                           f"curves_ok={report.all_curves_nonincreasing_nonexpanding} "
                           f"witness={report.witness_step}"))

    result = find_equilibrium(schedule, pair, curves, x0=run.x0, tol=run.tol,
                              max_iter=run.max_iter)
    lines.append(SuiteLine(result.converged, f"{name}.solve",
                           f"status={result.status} iterations={result.iterations}"))
    if not result.converged:
        return lines

    residual = verify_zero_sum(result, schedule, pair, curves)
    bound = schedule.order * ZERO_SUM_TOL
    lines.append(SuiteLine(residual <= bound, f"{name}.zero-sum",
                           f"|sum of equilibrium yields| = {_fmt(residual)} "
                           f"<= {_fmt(bound)}"))

    uniq = verify_uniqueness(schedule, pair, curves,
                             default_starts(interval, run.starts), tol=1e-8)
    lines.append(SuiteLine(not uniq.failures and uniq.max_spread <= UNIQUENESS_TOL,
                           f"{name}.uniqueness",
                           f"{run.starts} starts, aligned spread = {_fmt(uniq.max_spread)}"))

    if result.rate_q is not None and not interval.degenerate:
        bound_q = cycle_rate_bound(schedule, pair, curves, interval)
        lines.append(SuiteLine(result.rate_q <= bound_q + 0.05, f"{name}.rate",
                               f"measured {_fmt(result.rate_q)} <= bound "
                               f"{_fmt(bound_q)} + 0.05"))

    window = _active_window(curves)
    for index, (key, curve) in enumerate(sorted(curves.items())):
        reflection = check_reflection(curve, window, n=200, seed=seed + index)
        lines.append(SuiteLine(reflection.passed, f"{name}.reflection[{index}]",
                               f"{reflection.samples} samples, "
                               f"{len(reflection.violations)} violations"))
    p_curves = [curve for _, curve in sorted(curves.items())]
    if p_curves:
        first = p_curves[0]
        last = p_curves[-1]
        nonexp = check_L_nonexpanding(first, last, window, n=500, seed=seed)
        lines.append(SuiteLine(nonexp.passed, f"{name}.lemma-nonexpanding",
                               f"{nonexp.samples} samples, "
                               f"{len(nonexp.violations)} violations"))
    return lines


def _active_window(curves: CurveAssignment, width: float = 10.0) -> tuple[float, float]:
    """Finite interval on which every assigned curve is still descending."""
    crossings = []
    for _, curve in curves.items():
        crossing = zero_crossing(curve)
        if crossing is not None and math.isfinite(crossing):
            crossings.append(crossing)
    upper = min(crossings) if crossings else 0.0
    return (upper - width, upper)


def _paper_graph_extras(name: str, scenario: Scenario) -> list[SuiteLine]:
    """Known equilibria and the solo/simultaneous yield identities."""
    pair = scenario.default_pair()
    result = find_equilibrium(scenario.schedule, pair, scenario.curves,
                              x0=scenario.run.x0, tol=scenario.run.tol,
                              max_iter=scenario.run.max_iter)
    if not result.converged:
        return [SuiteLine(False, f"{name}.identity", f"status={result.status}")]
    yields = equilibrium_yields(result.u, scenario.schedule, pair, scenario.curves)
    lines: list[SuiteLine] = []
    if name == "graph_II_5":
        worst = max(abs(v) for v in result.u)
        lines.append(SuiteLine(worst <= IDENTITY_TOL, f"{name}.balanced",
                               f"max |u| = {_fmt(worst)} <= {_fmt(IDENTITY_TOL)}"))
    elif name == "graph_II_6":
        expected = (2.4, 0.8)
        worst = max(abs(a - b) for a, b in zip(result.u, expected))
        lines.append(SuiteLine(worst <= IDENTITY_TOL, f"{name}.known-equilibrium",
                               f"|u - (2.4, 0.8)| = {_fmt(worst)}"))
        gap = max(abs(yields[0][0] - 1.6), abs(yields[1][1] - 1.6))
        lines.append(SuiteLine(gap <= IDENTITY_TOL, f"{name}.known-yields",
                               f"both equilibrium gifts within {_fmt(gap)} of 1.6"))
    elif name == "graph_II_7":
        a, b, c = yields[0][0], yields[1][0], yields[2][1]
        gap = abs(c - (a + b))
        lines.append(SuiteLine(gap <= IDENTITY_TOL, f"{name}.identity",
                               f"|closing gift - sum of opening gifts| = {_fmt(gap)}"))
    elif name == "graph_II_8":
        a, b, c = yields[0][0], yields[1][0], yields[1][1]
        gap = abs(c - (a + b))
        lines.append(SuiteLine(gap <= IDENTITY_TOL, f"{name}.identity",
                               f"|answering gift - sum of giver gifts| = {_fmt(gap)}"))
    elif name == "graph_II_9":
        a, b = yields[0][0], yields[1][0]
        c, d, e = yields[0][1], yields[1][1], yields[2][1]
        gap = abs((a + b) - (c + d + e))
        lines.append(SuiteLine(gap <= IDENTITY_TOL, f"{name}.identity",
                               f"|giver total - receiver total| = {_fmt(gap)}"))
    return lines


def run_paper_graphs_suite(seed: int = 0) -> SuiteResult:
    lines: list[SuiteLine] = []
    for name in PAPER_GRAPH_NAMES:
        scenario = load_builtin_scenario(name)
        lines.extend(_scenario_lines(scenario, seed))
        lines.extend(_paper_graph_extras(name, scenario))
    return SuiteResult(name="paper-graphs", seed=seed, lines=tuple(lines))


def run_scenario_suite(scenario: Scenario, seed: int = 0) -> SuiteResult:
    """The per-scenario checks applied to one loaded scenario file."""
    return SuiteResult(name=scenario.name, seed=seed,
                       lines=tuple(_scenario_lines(scenario, seed)))


def random_pair_scenario(rng: np.random.Generator, name: str = "random") -> Scenario:
    """One two-entity scenario from the randomized linear-flat family.

    Cycle length 1..5, slopes in (-0.95, -0.05), intercepts in [0, 5], each
    direction present in each step with probability one half, at least one
    transaction overall.
    """
    k = int(rng.integers(1, 6))
    give = Transaction(giver="P", receiver="Q", good="a")
    answer = Transaction(giver="Q", receiver="P", good="b")
    while True:
        presence = rng.random((k, 2)) < 0.5
        if presence.any():
            break
    steps = []
    for row in presence:
        transactions = []
        if row[0]:
            transactions.append(give)
        if row[1]:
            transactions.append(answer)
        steps.append(Multiset(transactions))
    curves = CurveAssignment({
        ("P", "Q", "a"): linear_flat(-float(rng.uniform(0.05, 0.95)),
                                     float(rng.uniform(0.0, 5.0))),
        ("Q", "P", "b"): linear_flat(-float(rng.uniform(0.05, 0.95)),
                                     float(rng.uniform(0.0, 5.0))),
    })
    run = RunParams(x0=float(rng.uniform(-5.0, 5.0)), pair=("P", "Q"))
    return Scenario(name=name, description="randomized linear-flat family",
                    entities=("P", "Q"), goods=("a", "b"), curves=curves,
                    schedule=Schedule.from_steps(steps), states=None, run=run)


def run_random_suite(seed: int = 0, count: int = 1000) -> SuiteResult:
    rng = np.random.default_rng(seed)
    solved = 0
    zero_sum_ok = 0
    worst_residual = 0.0
    uniq_total = 0
    uniq_ok = 0
    worst_spread = 0.0
    lemma_pairs = 0
    lemma_violations = 0
    contraction_pairs = 0
    contraction_violations = 0

    for index in range(count):
        scenario = random_pair_scenario(rng, name=f"random-{index}")
        pair = scenario.default_pair()
        schedule, curves = scenario.schedule, scenario.curves
        result = find_equilibrium(schedule, pair, curves, x0=scenario.run.x0)
        if result.converged:
            solved += 1
            residual = verify_zero_sum(result, schedule, pair, curves)
            worst_residual = max(worst_residual, residual)
            if residual <= schedule.order * ZERO_SUM_TOL:
                zero_sum_ok += 1
        interval = construct_invariant_interval(schedule, pair, curves)
        report = check_conditions(schedule, pair, curves, interval, samples=0)
        if report.theorem_applies and not interval.degenerate:
            uniq_total += 1
            uniq = verify_uniqueness(schedule, pair, curves,
                                     default_starts(interval, 10), tol=1e-8)
            if not uniq.failures:
                worst_spread = max(worst_spread, uniq.max_spread)
            if not uniq.failures and uniq.max_spread <= UNIQUENESS_TOL:
                uniq_ok += 1

        p_curve = curves.get("P", "Q", "a")
        q_curve = curves.get("Q", "P", "b")
        pair_seed = int(rng.integers(0, 2 ** 31))
        nonexp = check_L_nonexpanding(p_curve, q_curve, (-10.0, 10.0), n=200,
                                      seed=pair_seed)
        lemma_pairs += 1
        lemma_violations += len(nonexp.violations)
        active_upper = min(zero_crossing(p_curve), zero_crossing(q_curve))
        con = check_L_contraction(p_curve, q_curve,
                                  (active_upper - 10.0, active_upper), n=200,
                                  seed=pair_seed)
        if con.applicable:
            contraction_pairs += 1
            contraction_violations += len(con.violations)

    lines = [
        SuiteLine(solved == count, "solve",
                  f"{solved}/{count} scenarios converged"),
        SuiteLine(zero_sum_ok == solved, "zero-sum",
                  f"{zero_sum_ok}/{solved} within k * {_fmt(ZERO_SUM_TOL)} "
                  f"(worst {_fmt(worst_residual)})"),
        SuiteLine(uniq_ok == uniq_total, "uniqueness",
                  f"{uniq_ok}/{uniq_total} theorem-applicable scenarios agree "
                  f"across 10 starts within {_fmt(UNIQUENESS_TOL)} "
                  f"(worst spread {_fmt(worst_spread)})"),
        SuiteLine(lemma_violations == 0, "lemma-nonexpanding",
                  f"{lemma_pairs} curve pairs, {lemma_violations} violations"),
        SuiteLine(contraction_violations == 0, "lemma-contraction",
                  f"{contraction_pairs} applicable pairs, "
                  f"{contraction_violations} violations"),
    ]
    return SuiteResult(name="random", seed=seed, lines=tuple(lines))


def steep_invalid_curve() -> PiecewiseLinear:
    """Slope -1.5 until zero at x = 2, flat afterwards; bypasses curve validation."""
    return PiecewiseLinear((2.0,), (0.0,), left_slope=-1.5, right_slope=0.0)


def run_negative_controls_suite(seed: int = 0) -> SuiteResult:
    """Invalid curves must trip the checks; the suite passes when they do."""
    steep = steep_invalid_curve()
    valid = linear_flat(-0.6, 3.0)
    window = (-5.0, 5.0)
    lines: list[SuiteLine] = []

    both = check_L_nonexpanding(steep, steep, window, n=1000, seed=seed)
    lines.append(SuiteLine(not both.passed and both.worst_ratio > 1.0,
                           "steep-both-slots",
                           f"{len(both.violations)} violations, worst stretch "
                           f"{_fmt(both.worst_ratio)}"))

    mixed = check_L_nonexpanding(steep, valid, window, n=1000, seed=seed + 1)
    lines.append(SuiteLine(not mixed.passed, "steep-plus-valid",
                           f"{len(mixed.violations)} violations, worst stretch "
                           f"{_fmt(mixed.worst_ratio)}"))

    # A single steep curve with a zero partner keeps |1 + slope| <= 1, so the
    # conclusion survives even though the precondition fails; no violation is
    # the predicted behavior here.
    alone = check_L_nonexpanding(steep, PiecewiseLinear((0.0,), (0.0,)), window,
                                 n=1000, seed=seed + 2)
    lines.append(SuiteLine(alone.passed, "steep-alone",
                           f"{len(alone.violations)} violations expected 0 "
                           f"(worst stretch {_fmt(alone.worst_ratio)})"))

    gated = check_L_contraction(steep, valid, window, n=100, seed=seed + 3)
    lines.append(SuiteLine(not gated.applicable, "contraction-gate",
                           f"applicable={gated.applicable} ({gated.detail})"))

    rejected = False
    try:
        YieldCurve((2.0,), (0.0,), left_slope=-1.5)
    except ValueError:
        rejected = True
    lines.append(SuiteLine(rejected, "factory-rejects",
                           f"validated constructor rejected slope -1.5: {rejected}"))

    drift = check_composition(account_map(steep, steep), account_map(valid, valid),
                              window, NONEXPANDING, NONEXPANDING, n=500,
                              seed=seed + 4, anchors=(-2.0, 2.0))
    lines.append(SuiteLine(not drift.applicable, "composition-gate",
                           f"applicable={drift.applicable} ({drift.detail})"))

    return SuiteResult(name="negative-controls", seed=seed, lines=tuple(lines))


SUITES = {
    "paper-graphs": run_paper_graphs_suite,
    "random": run_random_suite,
    "negative-controls": run_negative_controls_suite,
}


def run_suite(name: str, seed: int = 0, count: Optional[int] = None) -> SuiteResult:
    if name not in SUITES:
        known = ", ".join(sorted(SUITES))
        raise ValueError(f"unknown suite {name!r}; available: {known}")
    if name == "random" and count is not None:
        return run_random_suite(seed=seed, count=count)
    return SUITES[name](seed=seed)
