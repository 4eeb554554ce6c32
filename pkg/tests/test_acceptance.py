"""Acceptance gate: every shipped claim, one test and one pass/fail line each.

Run with ``pytest -v tests/test_acceptance.py`` to see the per-criterion lines.
Each test prints its measured numbers so a failure is self-explanatory.
"""

import csv
import math
import subprocess
import sys

import numpy as np
import pytest

from gifteq.checks import check_L_contraction, check_L_nonexpanding
from gifteq.curves import PiecewiseLinear, linear_flat, zero_crossing
from gifteq.dynamics import CurveAssignment, trajectory
from gifteq.model import Multiset, Schedule, Transaction
from gifteq.scenario import load_builtin_scenario
from gifteq.solver import (construct_invariant_interval, cycle_rate_bound,
                           equilibrium_yields, find_equilibrium)
from gifteq.suites import run_random_suite

GIVE = Transaction(giver="P", receiver="Q", good="a")
ANSWER = Transaction(giver="Q", receiver="P", good="b")
PAIR = ("P", "Q")

SIMULTANEOUS = Schedule.from_steps([Multiset([GIVE, ANSWER])])
ALTERNATING = Schedule.from_steps([Multiset([GIVE]), Multiset([ANSWER])])

SYMMETRIC = CurveAssignment({
    ("P", "Q", "a"): linear_flat(-0.5, 1.0),
    ("Q", "P", "b"): linear_flat(-0.5, 1.0),
})
ASYMMETRIC = CurveAssignment({
    ("P", "Q", "a"): linear_flat(-0.5, 2.0),
    ("Q", "P", "b"): linear_flat(-0.25, 1.0),
})

EQ_TOL = 1e-8
ZERO_SUM_TOL = 1e-9
RATE_TOL = 0.05
RANDOM_SEED = 42
RANDOM_COUNT = 1000


def report(number, passed, detail):
    print(f"ACCEPTANCE {number:02d} {'PASS' if passed else 'FAIL'}: {detail}")
    assert passed, detail


@pytest.fixture(scope="module")
def random_suite():
    return run_random_suite(seed=RANDOM_SEED, count=RANDOM_COUNT)


def suite_line(suite, label):
    for line in suite.lines:
        if line.label == label:
            return line
    raise AssertionError(f"suite has no line {label!r}")


def test_acceptance_01_symmetric_pair_balances_to_zero():
    worst = 0.0
    slowest = 0
    for x0 in (-5.0, 0.0, 3.0):
        result = find_equilibrium(SIMULTANEOUS, PAIR, SYMMETRIC, x0=x0)
        assert result.converged
        worst = max(worst, max(abs(v) for v in result.u))
        slowest = max(slowest, result.iterations)
    report(1, worst <= EQ_TOL and slowest <= 200,
           f"symmetric simultaneous pair: max |u| = {worst:.3g} <= 1e-08 "
           f"within {slowest} iterations from starts -5, 0, 3")


def test_acceptance_02_simultaneous_equilibrium_matches_bisection():
    result = find_equilibrium(SIMULTANEOUS, PAIR, ASYMMETRIC)
    p = ASYMMETRIC.get("P", "Q", "a")
    q = ASYMMETRIC.get("Q", "P", "b")

    lo, hi = -4.0, 4.0
    f = lambda x: p.value(x) - q.value(-x)
    flo = f(lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if (f(mid) > 0) == (flo > 0):
            lo, flo = mid, f(mid)
        else:
            hi = mid
    root = 0.5 * (lo + hi)

    gap = abs(result.u[0] - root)
    report(2, result.converged and gap <= EQ_TOL and abs(root - 4.0 / 3.0) < 1e-12,
           f"single-step equilibrium {result.u[0]!r} matches bisection root "
           f"{root!r} (= 4/3) within {gap:.3g}")


def test_acceptance_03_alternating_equilibrium_and_yields():
    result = find_equilibrium(ALTERNATING, PAIR, ASYMMETRIC)
    yields = equilibrium_yields(result.u, ALTERNATING, PAIR, ASYMMETRIC)
    u_gap = max(abs(result.u[0] - 2.4), abs(result.u[1] - 0.8))
    y_gap = max(abs(yields[0][0] - 1.6), abs(yields[1][1] - 1.6))
    ok = (result.converged and u_gap <= EQ_TOL and y_gap <= EQ_TOL
          and result.zero_sum_residual <= ZERO_SUM_TOL)
    report(3, ok,
           f"alternating pair: |u - (2.4, 0.8)| = {u_gap:.3g}, both gifts within "
           f"{y_gap:.3g} of 1.6, zero-sum residual {result.zero_sum_residual:.3g}")


def test_acceptance_04_random_family_converges_with_zero_sum(random_suite):
    solve = suite_line(random_suite, "solve")
    zero_sum = suite_line(random_suite, "zero-sum")
    report(4, solve.passed and zero_sum.passed,
           f"{RANDOM_COUNT} seeded scenarios (cycle length 1..5): "
           f"{solve.detail}; {zero_sum.detail}")


def test_acceptance_05_equilibrium_unique_across_starts(random_suite):
    line = suite_line(random_suite, "uniqueness")
    report(5, line.passed,
           f"theorem-applicable subset, 10 interval-spanning starts: {line.detail}")


def test_acceptance_06_convergence_rate_matches_contraction_bound():
    result = find_equilibrium(ALTERNATING, PAIR, ASYMMETRIC)
    bound = cycle_rate_bound(ALTERNATING, PAIR, ASYMMETRIC)
    rate_ok = (result.rate_q is not None
               and abs(result.rate_q - 0.375) <= RATE_TOL
               and bound == 0.375)

    # Geometric decay: per-cycle errors sit on a line in log space.
    traj = trajectory(ALTERNATING, PAIR, ASYMMETRIC, 0.0, 60)
    target = result.u[-1]
    errors = []
    for cycle in range(1, 30):
        err = abs(traj.balances[2 * cycle - 1] - target)
        if err <= 1e-9:  # below this, roundoff replaces the geometric tail
            break
        errors.append(err)
    logs = np.log10(errors)
    cycles = np.arange(len(errors))
    slope, intercept = np.polyfit(cycles, logs, 1)
    residual = float(np.max(np.abs(logs - (slope * cycles + intercept))))
    fit_ok = len(errors) >= 6 and residual <= 0.15

    report(6, rate_ok and fit_ok,
           f"measured rate {result.rate_q!r} within 0.05 of bound {bound!r}; "
           f"log-error fit slope {slope:.4f} (rate {10 ** slope:.4f}) with max "
           f"residual {residual:.3g} over {len(errors)} cycles")


def test_acceptance_07_yield_identities_on_bundled_graphs():
    three_step = load_builtin_scenario("graph_II_7")
    result = find_equilibrium(three_step.schedule, three_step.default_pair(),
                              three_step.curves)
    ys = equilibrium_yields(result.u, three_step.schedule,
                            three_step.default_pair(), three_step.curves)
    gap_7 = abs(ys[2][1] - (ys[0][0] + ys[1][0]))

    cross = load_builtin_scenario("graph_II_9")
    result9 = find_equilibrium(cross.schedule, cross.default_pair(), cross.curves)
    ys9 = equilibrium_yields(result9.u, cross.schedule, cross.default_pair(),
                             cross.curves)
    given = ys9[0][0] + ys9[1][0]
    answered = ys9[0][1] + ys9[1][1] + ys9[2][1]
    gap_9 = abs(given - answered)

    report(7, gap_7 <= EQ_TOL and gap_9 <= EQ_TOL,
           f"graph_II_7 closing gift equals sum of opening gifts within {gap_7:.3g}; "
           f"graph_II_9 given total equals answered total within {gap_9:.3g}")


def test_acceptance_08_constant_curve_run_exits_2(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "gifteq", "run",
                           "constant_drift", "--out", "."],
                          cwd=tmp_path, capture_output=True, text=True,
                          timeout=300)
    report(8, proc.returncode == 2 and "diverged" in proc.stdout,
           f"CLI run on the constant-curve scenario exited {proc.returncode} "
           f"with status line present")


def test_acceptance_09_lemma_checks_on_random_pairs(random_suite):
    nonexp = suite_line(random_suite, "lemma-nonexpanding")
    con = suite_line(random_suite, "lemma-contraction")

    rng = np.random.default_rng(RANDOM_SEED + 1)
    extra_violations = 0
    for _ in range(1000):
        p = linear_flat(-float(rng.uniform(0.05, 0.95)), float(rng.uniform(0, 5)))
        q = linear_flat(-float(rng.uniform(0.05, 0.95)), float(rng.uniform(0, 5)))
        seed = int(rng.integers(0, 2 ** 31))
        extra_violations += len(
            check_L_nonexpanding(p, q, (-10.0, 10.0), n=60, seed=seed).violations)
        upper = min(zero_crossing(p), zero_crossing(q))
        gated = check_L_contraction(p, q, (upper - 10.0, upper), n=60, seed=seed)
        if gated.applicable:
            extra_violations += len(gated.violations)

    steep = PiecewiseLinear((2.0,), (0.0,), left_slope=-1.5, right_slope=0.0)
    control = check_L_nonexpanding(steep, steep, (-5.0, 5.0), n=500, seed=0)

    ok = (nonexp.passed and con.passed and extra_violations == 0
          and len(control.violations) > 0 and control.worst_ratio > 1.5)
    report(9, ok,
           f"scheduled pairs: {nonexp.detail}; {con.detail}; 1000 standalone "
           f"pairs added {extra_violations} violations; steep negative control "
           f"produced {len(control.violations)} violations "
           f"(worst stretch {control.worst_ratio:.3g})")


def test_acceptance_10_verify_output_is_deterministic(tmp_path):
    command = [sys.executable, "-m", "gifteq", "verify", "--suite",
               "paper-graphs", "--seed", "7"]
    first = subprocess.run(command, cwd=tmp_path, capture_output=True,
                           timeout=600)
    second = subprocess.run(command, cwd=tmp_path, capture_output=True,
                            timeout=600)
    identical = first.stdout == second.stdout
    report(10, first.returncode == 0 and second.returncode == 0 and identical
           and len(first.stdout) > 0,
           f"two verify runs with seed 7 produced byte-identical stdout "
           f"({len(first.stdout)} bytes, exit codes {first.returncode}/"
           f"{second.returncode})")
