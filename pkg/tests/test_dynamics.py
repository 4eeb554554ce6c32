"""Account operators, balance trajectories, cycle composition, and the ledger."""

import math

import pytest

from gifteq.curves import ZERO_CURVE, linear_flat
from gifteq.dynamics import (AccountOperator, CurveAssignment, Ledger,
                             build_cycle_operators, build_operator,
                             compose_cycle, ledger_update, trajectory)
from gifteq.model import Multiset, Schedule, Transaction

GIVE = Transaction(giver="P", receiver="Q", good="a")
ANSWER = Transaction(giver="Q", receiver="P", good="b")

UNIT_CURVES = CurveAssignment({
    ("P", "Q", "a"): linear_flat(-0.5, 1.0),
    ("Q", "P", "b"): linear_flat(-0.5, 1.0),
})
ASYMMETRIC_CURVES = CurveAssignment({
    ("P", "Q", "a"): linear_flat(-0.5, 2.0),
    ("Q", "P", "b"): linear_flat(-0.25, 1.0),
})
ALTERNATING = Schedule.from_steps([Multiset([GIVE]), Multiset([ANSWER])])

TELESCOPE_TOL = 1e-9


def test_account_operator_evaluation():
    op = AccountOperator(p_curve=linear_flat(-0.5, 2.0),
                         q_curve=linear_flat(-0.25, 1.0))
    assert op.apply(0.0) == pytest.approx(2.0 - 1.0)
    assert op.yields_at(0.0) == (2.0, 1.0)
    # Positive balance shrinks the gift and grows the answer.
    p, q = op.yields_at(2.0)
    assert p == 1.0
    assert q == 1.5
    assert op(2.0) == pytest.approx(2.0 + 1.0 - 1.5)


def test_operator_trivial_when_pair_not_touched():
    other = Schedule.from_steps([Multiset([Transaction("R", "S", "c")])])
    curves = CurveAssignment({("R", "S", "c"): linear_flat(-0.5, 1.0)})
    op = build_operator(other.steps[0], ("P", "Q"), curves)
    assert op.is_trivial
    assert op(3.5) == 3.5


def test_build_operator_rejects_non_basic_step():
    with pytest.raises(ValueError):
        build_operator(Multiset([GIVE, GIVE]), ("P", "Q"), UNIT_CURVES)


def test_build_operator_requires_assigned_curve():
    with pytest.raises(KeyError):
        build_operator(Multiset([GIVE]), ("P", "Q"), CurveAssignment({}))


def test_curve_assignment_rejects_duplicates():
    with pytest.raises(ValueError):
        CurveAssignment([(("P", "Q", "a"), ZERO_CURVE),
                         (("P", "Q", "a"), ZERO_CURVE)])


def test_two_step_trajectory_known_values():
    traj = trajectory(ALTERNATING, ("P", "Q"), UNIT_CURVES, 0.0, 2)
    assert traj.balances == (1.0, -0.5)
    assert traj.p_yields == (1.0, 0.0)
    assert traj.q_yields == (0.0, 1.5)
    assert traj.balance_before(0) == 0.0
    assert traj.balance_before(1) == 1.0


def test_trajectory_matches_hand_iteration():
    n = 37
    traj = trajectory(ALTERNATING, ("P", "Q"), ASYMMETRIC_CURVES, 1.25, n)
    ops = build_cycle_operators(ALTERNATING, ("P", "Q"), ASYMMETRIC_CURVES)
    x = 1.25
    for i in range(n):
        op = ops[i % len(ops)]
        p, q = op.yields_at(x)
        x = op.apply(x)
        assert traj.balances[i] == pytest.approx(x, abs=1e-15)
        assert traj.p_yields[i] == pytest.approx(p, abs=1e-15)
        assert traj.q_yields[i] == pytest.approx(q, abs=1e-15)


def test_trajectory_telescopes():
    n = 500
    x0 = -2.0
    traj = trajectory(ALTERNATING, ("P", "Q"), ASYMMETRIC_CURVES, x0, n)
    moved = math.fsum(p - q for p, q in zip(traj.p_yields, traj.q_yields))
    assert abs((traj.balances[-1] - x0) - moved) <= TELESCOPE_TOL


def test_compose_cycle_phases():
    C0 = compose_cycle(ALTERNATING, ("P", "Q"), ASYMMETRIC_CURVES, phase=0)
    C1 = compose_cycle(ALTERNATING, ("P", "Q"), ASYMMETRIC_CURVES, phase=1)
    ops = build_cycle_operators(ALTERNATING, ("P", "Q"), ASYMMETRIC_CURVES)
    for x in (-3.0, 0.0, 1.7, 4.0):
        assert C0(x) == pytest.approx(ops[1].apply(ops[0].apply(x)), abs=1e-15)
        assert C1(x) == pytest.approx(ops[0].apply(ops[1].apply(x)), abs=1e-15)
    # Phases wrap modulo the order.
    C2 = compose_cycle(ALTERNATING, ("P", "Q"), ASYMMETRIC_CURVES, phase=2)
    for x in (-3.0, 0.0, 1.7, 4.0):
        assert C2(x) == C0(x)


def test_ledger_update_and_antisymmetry():
    ledger = Ledger({})
    after = ledger_update(ledger, Multiset([GIVE]),
                          CurveAssignment({("P", "Q", "a"): linear_flat(-0.5, 2.0)}))
    assert after.balance("P", "Q") == 2.0
    assert after.balance("Q", "P") == -2.0
    assert after.pairs() == [("P", "Q")]
    # The original ledger is untouched.
    assert ledger.balance("P", "Q") == 0.0


def test_ledger_with_balance():
    ledger = Ledger({}).with_balance("Q", "P", 1.5)
    assert ledger.balance("Q", "P") == 1.5
    assert ledger.balance("P", "Q") == -1.5


def test_ledger_update_touches_each_pair_once():
    ledger = Ledger({})
    step = Multiset([GIVE, ANSWER])
    after = ledger_update(ledger, step, ASYMMETRIC_CURVES)
    # Simultaneous give and answer: x + P(0) - Q(0) from P's side.
    assert after.balance("P", "Q") == pytest.approx(2.0 - 1.0)
