"""Core objects of the gift-economy model.

Entities hand goods to each other in discrete steps. A step is a multiset of
transactions; a state is a multiset of supply/demand items describing what the
entities are currently willing to give and receive. Schedules repeat a finite
list of steps cyclically. This module provides the multiset container plus the
admissibility, basicness and cycle-order checks the rest of the package builds
on.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Generic, Hashable, Iterable, Iterator, Mapping, Sequence, TypeVar, Union

T = TypeVar("T", bound=Hashable)

# Entities and goods are opaque identifiers; uniqueness is enforced at the
# scenario level.
EntityId = str
GoodId = str


class Multiset(Generic[T]):
    """Finite multiset: each element carries a positive occurrence count."""

    __slots__ = ("_counts",)

    def __init__(self, items: Union[Iterable[T], Mapping[T, int]] = ()):
        counts: dict[T, int] = {}
        if isinstance(items, Mapping):
            for element, count in items.items():
                if count < 0:
                    raise ValueError(f"negative count {count!r} for {element!r}")
                if count:
                    counts[element] = counts.get(element, 0) + count
        else:
            for element in items:
                counts[element] = counts.get(element, 0) + 1
        self._counts = counts

    def occurrence(self, element: T) -> int:
        """Number of occurrences of ``element``; 0 when absent."""
        return self._counts.get(element, 0)

    def union(self, other: "Multiset[T]") -> "Multiset[T]":
        """Additive union: occurrence counts are summed."""
        counts = dict(self._counts)
        for element, count in other._counts.items():
            counts[element] = counts.get(element, 0) + count
        return Multiset(counts)

    def is_multisubset(self, other: "Multiset[T]") -> bool:
        """True iff every element occurs in ``other`` at least as often."""
        return all(count <= other.occurrence(element) for element, count in self._counts.items())

    def scaled(self, factor: int) -> "Multiset[T]":
        """Multiset with every occurrence count multiplied by ``factor`` >= 0."""
        if factor < 0:
            raise ValueError("factor must be non-negative")
        return Multiset({element: count * factor for element, count in self._counts.items()})

    def items(self) -> Iterator[tuple[T, int]]:
        return iter(self._counts.items())

    def distinct(self) -> Iterator[T]:
        return iter(self._counts)

    def elements(self) -> Iterator[T]:
        """Iterate elements with multiplicity."""
        for element, count in self._counts.items():
            for _ in range(count):
                yield element

    def __contains__(self, element: object) -> bool:
        return element in self._counts

    def __iter__(self) -> Iterator[T]:
        return iter(self._counts)

    def __len__(self) -> int:
        """Total size counting multiplicity."""
        return sum(self._counts.values())

    def __bool__(self) -> bool:
        return bool(self._counts)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Multiset):
            return NotImplemented
        return self._counts == other._counts

    def __hash__(self) -> int:
        return hash(frozenset(self._counts.items()))

    def __repr__(self) -> str:
        inner = ", ".join(f"{element!r}: {count}" for element, count in sorted(
            self._counts.items(), key=lambda item: repr(item[0])))
        return f"Multiset({{{inner}}})"


@dataclass(frozen=True)
class SupplyDemandItem:
    """One side of a potential hand-over: ``entity`` supplies or demands ``good``."""

    kind: str  # "supply" or "demand"
    entity: EntityId
    good: GoodId

    def __post_init__(self) -> None:
        if self.kind not in ("supply", "demand"):
            raise ValueError(f"kind must be 'supply' or 'demand', got {self.kind!r}")


def supply(entity: EntityId, good: GoodId) -> SupplyDemandItem:
    return SupplyDemandItem("supply", entity, good)


def demand(entity: EntityId, good: GoodId) -> SupplyDemandItem:
    return SupplyDemandItem("demand", entity, good)


@dataclass(frozen=True)
class Transaction:
    """A single hand-over of ``good`` from ``giver`` to ``receiver``."""

    giver: EntityId
    receiver: EntityId
    good: GoodId

    def __post_init__(self) -> None:
        if self.giver == self.receiver:
            raise ValueError(f"giver and receiver must differ, got {self.giver!r} for both")


# A state collects supply/demand items; a step collects transactions.
State = Multiset[SupplyDemandItem]
TransactionStep = Multiset[Transaction]


def multipair(transaction: Transaction) -> State:
    """The two items a transaction consumes: the giver's supply, the receiver's demand."""
    return Multiset([supply(transaction.giver, transaction.good),
                     demand(transaction.receiver, transaction.good)])


def required_items(step: TransactionStep) -> State:
    """Union of the multipairs of every transaction in the step, with multiplicity."""
    needed: State = Multiset()
    for transaction, count in step.items():
        needed = needed.union(multipair(transaction).scaled(count))
    return needed


def minimal_state(step: TransactionStep) -> State:
    """Smallest state in which ``step`` is admissible."""
    return required_items(step)


def is_admissible_step(step: TransactionStep, state: State) -> bool:
    """A step is admissible when the state covers every consumed item, with multiplicity."""
    return required_items(step).is_multisubset(state)


def is_basic_step(step: TransactionStep) -> bool:
    """At most one transaction per ordered (giver, receiver) pair, counting multiplicity."""
    totals: dict[tuple[EntityId, EntityId], int] = {}
    for transaction, count in step.items():
        key = (transaction.giver, transaction.receiver)
        totals[key] = totals.get(key, 0) + count
        if totals[key] > 1:
            return False
    return True


def detect_cycle_order(steps: Sequence[TransactionStep]) -> int:
    """Smallest divisor k of len(steps) with steps[i] == steps[i mod k] for all i.

    Every non-empty list is consistent with k = len(steps), so a positive order
    always exists; empty input is rejected.
    """
    n = len(steps)
    if n == 0:
        raise ValueError("steps must be non-empty")
    for k in range(1, n + 1):
        if n % k:
            continue
        if all(steps[i] == steps[i % k] for i in range(k, n)):
            return k
    return n  # unreachable: k == n always matches


@dataclass(frozen=True)
class Schedule:
    """One period of a cyclical transaction schedule.

    Stores exactly the first cycle: the step list has minimal length (no proper
    divisor reproduces it) and every step is basic.
    """

    steps: tuple[TransactionStep, ...]

    def __post_init__(self) -> None:
        if not self.steps:
            raise ValueError("schedule needs at least one step")
        for index, step in enumerate(self.steps):
            if not is_basic_step(step):
                raise ValueError(f"step {index} is not basic")
        if detect_cycle_order(self.steps) != len(self.steps):
            raise ValueError("step list is reducible; use Schedule.from_steps to normalize")

    @classmethod
    def from_steps(cls, steps: Sequence[TransactionStep]) -> "Schedule":
        """Build a schedule, reducing the list to its minimal cycle."""
        order = detect_cycle_order(steps)
        return cls(tuple(steps[:order]))

    @property
    def order(self) -> int:
        return len(self.steps)

    def step_at(self, index: int) -> TransactionStep:
        """Step applied at 0-based position ``index`` of the infinite cyclic sequence."""
        return self.steps[index % len(self.steps)]

    def entity_pairs(self) -> list[tuple[EntityId, EntityId]]:
        """Unordered entity pairs (sorted tuples) that ever trade, in first-seen order."""
        seen: dict[tuple[EntityId, EntityId], None] = {}
        for step in self.steps:
            for transaction in step.distinct():
                pair = tuple(sorted((transaction.giver, transaction.receiver)))
                seen.setdefault(pair, None)
        return list(seen)


@dataclass(frozen=True)
class StepValidation:
    index: int
    admissible: bool
    basic: bool


@dataclass(frozen=True)
class InstanceValidation:
    """Per-step admissibility/basicness plus the overall cycle structure."""

    steps: tuple[StepValidation, ...]
    order: int
    cyclical: bool = True  # every finite list read cyclically is consistent with its own length

    @property
    def all_admissible(self) -> bool:
        return all(entry.admissible for entry in self.steps)

    @property
    def all_basic(self) -> bool:
        return all(entry.basic for entry in self.steps)

    @property
    def valid(self) -> bool:
        return self.all_admissible and self.all_basic


def validate_instance(
    states: Union[State, Sequence[State]],
    steps: Sequence[TransactionStep],
) -> InstanceValidation:
    """Check every step against its state and report the cycle order.

    ``states`` may be a single state reused at every index or a per-index
    sequence of the same length as ``steps``.
    """
    if not steps:
        raise ValueError("steps must be non-empty")
    if isinstance(states, Multiset):
        state_list: Sequence[State] = [states] * len(steps)
    else:
        state_list = list(states)
        if len(state_list) != len(steps):
            raise ValueError(
                f"got {len(state_list)} states for {len(steps)} steps; counts must match")
    reports = tuple(
        StepValidation(index=i + 1,
                       admissible=is_admissible_step(step, state_list[i]),
                       basic=is_basic_step(step))
        for i, step in enumerate(steps))
    return InstanceValidation(steps=reports, order=detect_cycle_order(steps))
