"""Account operators, balance trajectories and the pairwise ledger.

For an ordered entity pair (P, Q) with balance x (what Q owes P, positive when
P has given more than it received), one step updates the balance as

    x  ->  x + P_yield(x) - Q_yield(-x)

where P_yield is the curve of P's transaction to Q in that step and Q_yield the
curve of Q's transaction to P; an absent transaction contributes the zero
curve. Composing the operators of one schedule period gives the cycle operator
whose fixed points are the k-fold equilibria.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Optional, Sequence

from .curves import YieldCurve, ZERO_CURVE, is_zero
from .model import EntityId, GoodId, Schedule, TransactionStep, is_basic_step

# Directed curve assignment key: (giver, receiver, good).
CurveKey = tuple[EntityId, EntityId, GoodId]


class CurveAssignment:
    """Yield curve per directed (giver, receiver, good) triple, at most one each."""

    __slots__ = ("_curves",)

    def __init__(self, curves: Mapping[CurveKey, YieldCurve] |
                 Iterable[tuple[CurveKey, YieldCurve]] = ()):
        items = curves.items() if isinstance(curves, Mapping) else curves
        table: dict[CurveKey, YieldCurve] = {}
        for key, curve in items:
            key = (str(key[0]), str(key[1]), str(key[2]))
            if key in table:
                raise ValueError(f"duplicate curve assignment for {key!r}")
            table[key] = curve
        self._curves = table

    def get(self, giver: EntityId, receiver: EntityId, good: GoodId) -> Optional[YieldCurve]:
        return self._curves.get((giver, receiver, good))

    def items(self):
        return self._curves.items()

    def __len__(self) -> int:
        return len(self._curves)

    def __contains__(self, key: CurveKey) -> bool:
        return key in self._curves

    def curve_for_direction(self, step: TransactionStep, giver: EntityId,
                            receiver: EntityId) -> YieldCurve:
        """Curve of the (unique, by basicness) transaction giver -> receiver in ``step``.

        Returns the zero curve when the step has no such transaction; raises
        when the transaction exists but has no assigned curve.
        """
        for transaction in step.distinct():
            if transaction.giver == giver and transaction.receiver == receiver:
                curve = self.get(giver, receiver, transaction.good)
                if curve is None:
                    raise KeyError(
                        f"no curve assigned for transaction {giver!r} -> {receiver!r} "
                        f"of good {transaction.good!r}")
                return curve
        return ZERO_CURVE


@dataclass(frozen=True)
class AccountOperator:
    """One-step balance update for an ordered entity pair."""

    p_curve: YieldCurve
    q_curve: YieldCurve

    def yields_at(self, x: float) -> tuple[float, float]:
        """(gift from P evaluated at x, gift from Q evaluated at -x)."""
        return self.p_curve.value(x), self.q_curve.value(-x)

    def apply(self, x: float) -> float:
        p_yield, q_yield = self.yields_at(x)
        return x + p_yield - q_yield

    def __call__(self, x: float) -> float:
        return self.apply(x)

    @property
    def is_trivial(self) -> bool:
        """Identity operator: both curves identically zero."""
        return is_zero(self.p_curve) and is_zero(self.q_curve)


def build_operator(step: TransactionStep, pair: tuple[EntityId, EntityId],
                   curves: CurveAssignment) -> AccountOperator:
    """Account operator of ``step`` restricted to the ordered ``pair``.

    Transactions involving other entities are ignored; the step itself must be
    basic so each direction holds at most one transaction.
    """
    if not is_basic_step(step):
        raise ValueError("step is not basic: some ordered pair trades more than once")
    p_entity, q_entity = pair
    return AccountOperator(
        p_curve=curves.curve_for_direction(step, p_entity, q_entity),
        q_curve=curves.curve_for_direction(step, q_entity, p_entity),
    )


def build_cycle_operators(schedule: Schedule, pair: tuple[EntityId, EntityId],
                          curves: CurveAssignment) -> list[AccountOperator]:
    """Operators of one schedule period, in step order."""
    return [build_operator(step, pair, curves) for step in schedule.steps]


@dataclass(frozen=True)
class BalanceTrajectory:
    """Balances and per-step yields produced by iterating a schedule."""

    x0: float
    order: int
    balances: tuple[float, ...]
    p_yields: tuple[float, ...]
    q_yields: tuple[float, ...]

    def __len__(self) -> int:
        return len(self.balances)

    def balance_before(self, index: int) -> float:
        """Balance entering 0-based step ``index``."""
        return self.x0 if index == 0 else self.balances[index - 1]


def trajectory(schedule: Schedule, pair: tuple[EntityId, EntityId],
               curves: CurveAssignment, x0: float, n: int) -> BalanceTrajectory:
    """Iterate ``n`` steps from ``x0``, recording balances and both yields per step."""
    if n < 0:
        raise ValueError("step count must be non-negative")
    operators = build_cycle_operators(schedule, pair, curves)
    k = len(operators)
    x = float(x0)
    balances: list[float] = []
    p_yields: list[float] = []
    q_yields: list[float] = []
    for i in range(n):
        op = operators[i % k]
        p_yield, q_yield = op.yields_at(x)
        x = x + p_yield - q_yield
        balances.append(x)
        p_yields.append(p_yield)
        q_yields.append(q_yield)
    return BalanceTrajectory(x0=float(x0), order=k, balances=tuple(balances),
                             p_yields=tuple(p_yields), q_yields=tuple(q_yields))


def compose_cycle(schedule: Schedule, pair: tuple[EntityId, EntityId],
                  curves: CurveAssignment, phase: int = 0) -> Callable[[float], float]:
    """Cycle operator at ``phase``: one full period applied to a phase-``phase`` balance.

    Maps the balance after ``phase`` steps to the balance after ``phase + k``
    steps. Phases k apart yield the same operator.
    """
    operators = build_cycle_operators(schedule, pair, curves)
    k = len(operators)
    ordered = [operators[(phase + t) % k] for t in range(k)]

    def cycle(x: float) -> float:
        for op in ordered:
            x = op.apply(x)
        return x

    return cycle


@dataclass(frozen=True)
class Ledger:
    """Signed balances for unordered entity pairs.

    Internally each pair is stored under its sorted key with the balance
    oriented from the lexicographically smaller entity, so reading (P, Q) and
    (Q, P) gives opposite signs. Missing pairs read as zero. Updates return a
    new ledger.
    """

    _balances: Mapping[tuple[EntityId, EntityId], float] = field(default_factory=dict)

    @staticmethod
    def _orient(p: EntityId, q: EntityId) -> tuple[tuple[EntityId, EntityId], float]:
        if p == q:
            raise ValueError("a ledger pair needs two distinct entities")
        return ((p, q), 1.0) if p < q else ((q, p), -1.0)

    def balance(self, p: EntityId, q: EntityId) -> float:
        key, sign = self._orient(p, q)
        return sign * self._balances.get(key, 0.0)

    def pairs(self) -> list[tuple[EntityId, EntityId]]:
        return sorted(self._balances)

    def with_balance(self, p: EntityId, q: EntityId, value: float) -> "Ledger":
        key, sign = self._orient(p, q)
        table = dict(self._balances)
        table[key] = sign * value
        return Ledger(table)


def ledger_update(ledger: Ledger, step: TransactionStep,
                  curves: CurveAssignment) -> Ledger:
    """Apply one step to every entity pair it touches; other pairs are untouched."""
    touched: dict[tuple[EntityId, EntityId], None] = {}
    for transaction in step.distinct():
        pair = tuple(sorted((transaction.giver, transaction.receiver)))
        touched.setdefault(pair, None)
    updated = ledger
    for pair in touched:
        operator = build_operator(step, pair, curves)
        new_balance = operator.apply(ledger.balance(*pair))
        updated = updated.with_balance(pair[0], pair[1], new_balance)
    return updated
