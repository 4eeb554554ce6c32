"""Scenario files: JSON documents describing a complete model instance.

A scenario names the entities and goods, assigns a yield curve to each
directed (giver, receiver, good) triple that ever trades, lists one period of
the cyclical schedule, optionally pins explicit states, and carries run
parameters. Files use extension ``.scn`` and a top-level ``version`` field.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Optional, Sequence, Union

from .curves import YieldCurve, ZERO_CURVE, is_zero, linear_flat
from .dynamics import CurveAssignment
from .model import (EntityId, Multiset, Schedule, State, Transaction,
                    TransactionStep, demand, is_admissible_step, minimal_state,
                    supply, validate_instance)

FORMAT_VERSION = 1


class ScenarioError(ValueError):
    """Malformed or inconsistent scenario document; message carries the location."""


@dataclass(frozen=True)
class RunParams:
    x0: float = 0.0
    tol: float = 1e-10
    max_iter: int = 10 ** 6
    starts: int = 10
    seed: int = 0
    pair: Optional[tuple[EntityId, EntityId]] = None


@dataclass(frozen=True)
class Scenario:
    name: str
    description: str
    entities: tuple[EntityId, ...]
    goods: tuple[str, ...]
    curves: CurveAssignment
    schedule: Schedule
    states: Optional[tuple[State, ...]]  # per schedule step when given
    run: RunParams = field(default_factory=RunParams)

    def states_or_minimal(self) -> tuple[State, ...]:
        """Explicit states, or the smallest admissible state per step."""
        if self.states is not None:
            return self.states
        return tuple(minimal_state(step) for step in self.schedule.steps)

    def default_pair(self) -> tuple[EntityId, EntityId]:
        """Pinned run pair, else the only trading pair; ambiguous otherwise."""
        if self.run.pair is not None:
            return self.run.pair
        pairs = self.schedule.entity_pairs()
        if len(pairs) != 1:
            raise ScenarioError(
                f"scenario {self.name!r} trades over {len(pairs)} entity pairs; "
                f"pick one explicitly")
        return pairs[0]


def _fail(location: str, message: str) -> "ScenarioError":
    return ScenarioError(f"{location}: {message}")


def _require(data: dict, key: str, kind: type, location: str) -> Any:
    if key not in data:
        raise _fail(location, f"missing required field {key!r}")
    value = data[key]
    if kind is float:
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise _fail(location, f"field {key!r} must be a number, got {value!r}")
        return float(value)
    if not isinstance(value, kind):
        raise _fail(location, f"field {key!r} must be {kind.__name__}, got {value!r}")
    return value


def parse_curve_literal(data: Any, location: str) -> YieldCurve:
    """Curve literal: kind 'linear_flat', 'piecewise' or 'zero'."""
    if not isinstance(data, dict):
        raise _fail(location, f"curve literal must be an object, got {data!r}")
    kind = data.get("kind")
    if kind == "zero":
        return ZERO_CURVE
    if kind == "linear_flat":
        slope = _require(data, "slope", float, location)
        intercept = _require(data, "intercept", float, location)
        try:
            return linear_flat(slope, intercept)
        except ValueError as exc:
            raise _fail(location, str(exc)) from None
    if kind == "piecewise":
        breakpoints = _require(data, "breakpoints", list, location)
        values = _require(data, "values", list, location)
        left = data.get("left_slope", 0.0)
        right = data.get("right_slope", 0.0)
        try:
            return YieldCurve(breakpoints, values, left_slope=float(left),
                              right_slope=float(right))
        except (TypeError, ValueError) as exc:
            raise _fail(location, str(exc)) from None
    raise _fail(location, f"unknown curve kind {kind!r}")


def curve_to_literal(curve: YieldCurve) -> dict:
    if is_zero(curve):
        return {"kind": "zero"}
    return {
        "kind": "piecewise",
        "breakpoints": list(curve.xs),
        "values": list(curve.ys),
        "left_slope": curve.left_slope,
        "right_slope": curve.right_slope,
    }


def _parse_transaction(data: Any, entities: set[str], goods: set[str],
                       location: str) -> tuple[Transaction, int]:
    if not isinstance(data, dict):
        raise _fail(location, f"transaction must be an object, got {data!r}")
    giver = _require(data, "giver", str, location)
    receiver = _require(data, "receiver", str, location)
    good = _require(data, "good", str, location)
    count = data.get("count", 1)
    if not isinstance(count, int) or isinstance(count, bool) or count < 1:
        raise _fail(location, f"count must be a positive integer, got {count!r}")
    for label, value, known in (("giver", giver, entities), ("receiver", receiver, entities),
                                ("good", good, goods)):
        if value not in known:
            raise _fail(location, f"unknown {label} {value!r}")
    try:
        return Transaction(giver=giver, receiver=receiver, good=good), count
    except ValueError as exc:
        raise _fail(location, str(exc)) from None


def _parse_state(data: Any, entities: set[str], goods: set[str], location: str) -> State:
    if not isinstance(data, list):
        raise _fail(location, f"state must be a list of items, got {data!r}")
    counts: dict = {}
    for index, item in enumerate(data):
        where = f"{location}[{index}]"
        if not isinstance(item, dict):
            raise _fail(where, f"state item must be an object, got {item!r}")
        kind = _require(item, "kind", str, where)
        if kind not in ("supply", "demand"):
            raise _fail(where, f"kind must be 'supply' or 'demand', got {kind!r}")
        entity = _require(item, "entity", str, where)
        good = _require(item, "good", str, where)
        if entity not in entities:
            raise _fail(where, f"unknown entity {entity!r}")
        if good not in goods:
            raise _fail(where, f"unknown good {good!r}")
        count = item.get("count", 1)
        if not isinstance(count, int) or isinstance(count, bool) or count < 1:
            raise _fail(where, f"count must be a positive integer, got {count!r}")
        made = supply(entity, good) if kind == "supply" else demand(entity, good)
        counts[made] = counts.get(made, 0) + count
    return Multiset(counts)


def parse_scenario(data: Any, name: str = "scenario") -> Scenario:
    """Validate a decoded JSON document into a Scenario."""
    if not isinstance(data, dict):
        raise _fail(name, f"document must be a JSON object, got {type(data).__name__}")
    version = data.get("version")
    if version != FORMAT_VERSION:
        raise _fail(name, f"unsupported version {version!r}; expected {FORMAT_VERSION}")
    name = data.get("name", name)
    description = data.get("description", "")

    entity_list = _require(data, "entities", list, name)
    if len(set(entity_list)) != len(entity_list):
        raise _fail(f"{name}:entities", "entity ids must be unique")
    if not all(isinstance(e, str) and e for e in entity_list):
        raise _fail(f"{name}:entities", "entity ids must be non-empty strings")
    goods_list = _require(data, "goods", list, name)
    if len(set(goods_list)) != len(goods_list):
        raise _fail(f"{name}:goods", "good ids must be unique")
    if not all(isinstance(g, str) and g for g in goods_list):
        raise _fail(f"{name}:goods", "good ids must be non-empty strings")
    entities, goods = set(entity_list), set(goods_list)

    curve_entries = _require(data, "curves", list, name)
    assignments: list[tuple[tuple[str, str, str], YieldCurve]] = []
    for index, entry in enumerate(curve_entries):
        where = f"{name}:curves[{index}]"
        if not isinstance(entry, dict):
            raise _fail(where, f"curve entry must be an object, got {entry!r}")
        transaction, _ = _parse_transaction(
            {k: entry.get(k) for k in ("giver", "receiver", "good")},
            entities, goods, where)
        curve = parse_curve_literal(entry.get("curve"), f"{where}:curve")
        assignments.append(((transaction.giver, transaction.receiver,
                             transaction.good), curve))
    try:
        curves = CurveAssignment(assignments)
    except ValueError as exc:
        raise _fail(f"{name}:curves", str(exc)) from None

    schedule_data = _require(data, "schedule", list, name)
    if not schedule_data:
        raise _fail(f"{name}:schedule", "schedule needs at least one step")
    steps: list[TransactionStep] = []
    for step_index, step_data in enumerate(schedule_data):
        where = f"{name}:schedule[{step_index}]"
        if not isinstance(step_data, list):
            raise _fail(where, f"step must be a list of transactions, got {step_data!r}")
        counts: dict = {}
        for t_index, t_data in enumerate(step_data):
            transaction, count = _parse_transaction(
                t_data, entities, goods, f"{where}[{t_index}]")
            counts[transaction] = counts.get(transaction, 0) + count
        steps.append(Multiset(counts))
    try:
        schedule = Schedule.from_steps(steps)
    except ValueError as exc:
        raise _fail(f"{name}:schedule", str(exc)) from None
    for index, step in enumerate(schedule.steps):
        for transaction in step.distinct():
            key = (transaction.giver, transaction.receiver, transaction.good)
            if key not in curves:
                raise _fail(f"{name}:schedule[{index}]",
                            f"no curve assigned for {key!r}")

    states: Optional[tuple[State, ...]] = None
    states_data = data.get("states")
    if states_data is not None:
        if not isinstance(states_data, dict):
            raise _fail(f"{name}:states",
                        "states must be an object with 'shared' or 'per_step'")
        if ("shared" in states_data) == ("per_step" in states_data):
            raise _fail(f"{name}:states",
                        "states needs exactly one of 'shared' or 'per_step'")
        if "shared" in states_data:
            shared = _parse_state(states_data["shared"], entities, goods,
                                  f"{name}:states.shared")
            states = tuple([shared] * schedule.order)
        else:
            per_step = states_data["per_step"]
            if not isinstance(per_step, list) or len(per_step) != schedule.order:
                raise _fail(f"{name}:states.per_step",
                            f"need exactly {schedule.order} states (one per step)")
            states = tuple(
                _parse_state(entry, entities, goods, f"{name}:states.per_step[{i}]")
                for i, entry in enumerate(per_step))
        for index, (step, state) in enumerate(zip(schedule.steps, states)):
            if not is_admissible_step(step, state):
                raise _fail(f"{name}:schedule[{index}]",
                            "step is not admissible in its state")

    run_data = data.get("run", {})
    if not isinstance(run_data, dict):
        raise _fail(f"{name}:run", f"run must be an object, got {run_data!r}")
    pair: Optional[tuple[str, str]] = None
    if run_data.get("pair") is not None:
        raw_pair = run_data["pair"]
        if (not isinstance(raw_pair, list) or len(raw_pair) != 2
                or not all(isinstance(p, str) for p in raw_pair)):
            raise _fail(f"{name}:run.pair", f"pair must be two entity ids, got {raw_pair!r}")
        if raw_pair[0] == raw_pair[1] or any(p not in entities for p in raw_pair):
            raise _fail(f"{name}:run.pair", "pair must name two distinct known entities")
        pair = (raw_pair[0], raw_pair[1])

    def _number(key: str, default: float) -> float:
        value = run_data.get(key, default)
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise _fail(f"{name}:run.{key}", f"must be a number, got {value!r}")
        return float(value)

    def _positive_int(key: str, default: int) -> int:
        value = run_data.get(key, default)
        if not isinstance(value, int) or isinstance(value, bool) or value < 1:
            raise _fail(f"{name}:run.{key}", f"must be a positive integer, got {value!r}")
        return value

    tol = _number("tol", RunParams.tol)
    if not (tol > 0 and math.isfinite(tol)):
        raise _fail(f"{name}:run.tol", f"tol must be positive and finite, got {tol!r}")
    seed = run_data.get("seed", RunParams.seed)
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise _fail(f"{name}:run.seed", f"must be an integer, got {seed!r}")
    run = RunParams(
        x0=_number("x0", RunParams.x0),
        tol=tol,
        max_iter=_positive_int("max_iter", RunParams.max_iter),
        starts=_positive_int("starts", RunParams.starts),
        seed=seed,
        pair=pair,
    )

    return Scenario(name=str(name), description=str(description),
                    entities=tuple(entity_list), goods=tuple(goods_list),
                    curves=curves, schedule=schedule, states=states, run=run)


def loads(text: str, name: str = "scenario") -> Scenario:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise _fail(name, f"invalid JSON: {exc}") from None
    return parse_scenario(data, name)


def load_scenario(path: Union[str, Path]) -> Scenario:
    """Read and validate a scenario file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise _fail(str(path), f"cannot read file: {exc.strerror or exc}") from None
    return loads(text, name=path.stem)


def _state_to_literal(state: State) -> list[dict]:
    items = sorted(state.items(), key=lambda kv: (kv[0].kind, kv[0].entity, kv[0].good))
    return [{"kind": item.kind, "entity": item.entity, "good": item.good, "count": count}
            for item, count in items]


def scenario_to_dict(scenario: Scenario) -> dict:
    """Plain-JSON form; load(emit(s)) yields an equivalent scenario."""
    document: dict[str, Any] = {
        "version": FORMAT_VERSION,
        "name": scenario.name,
        "description": scenario.description,
        "entities": list(scenario.entities),
        "goods": list(scenario.goods),
        "curves": [
            {"giver": giver, "receiver": receiver, "good": good,
             "curve": curve_to_literal(curve)}
            for (giver, receiver, good), curve in scenario.curves.items()
        ],
        "schedule": [
            [{"giver": t.giver, "receiver": t.receiver, "good": t.good, "count": count}
             for t, count in sorted(step.items(),
                                    key=lambda kv: (kv[0].giver, kv[0].receiver, kv[0].good))]
            for step in scenario.schedule.steps
        ],
        "run": {
            "x0": scenario.run.x0,
            "tol": scenario.run.tol,
            "max_iter": scenario.run.max_iter,
            "starts": scenario.run.starts,
            "seed": scenario.run.seed,
        },
    }
    if scenario.run.pair is not None:
        document["run"]["pair"] = list(scenario.run.pair)
    if scenario.states is not None:
        document["states"] = {
            "per_step": [_state_to_literal(state) for state in scenario.states]}
    return document


def dumps(scenario: Scenario) -> str:
    return json.dumps(scenario_to_dict(scenario), indent=2, sort_keys=False) + "\n"


def emit_scenario(scenario: Scenario, path: Union[str, Path]) -> None:
    Path(path).write_text(dumps(scenario), encoding="utf-8")


def builtin_scenario_names() -> list[str]:
    """Names of the scenarios shipped with the package."""
    root = resources.files("gifteq").joinpath("scenarios")
    return sorted(entry.name[:-4] for entry in root.iterdir()
                  if entry.name.endswith(".scn"))


def load_builtin_scenario(name: str) -> Scenario:
    """Load a bundled scenario by name (without the .scn extension)."""
    root = resources.files("gifteq").joinpath("scenarios")
    entry = root.joinpath(f"{name}.scn")
    if not entry.is_file():
        known = ", ".join(builtin_scenario_names())
        raise _fail(name, f"no bundled scenario with this name; available: {known}")
    return loads(entry.read_text(encoding="utf-8"), name=name)


def resolve_scenario(ref: str) -> Scenario:
    """Load ``ref`` as a file path, falling back to the bundled scenarios."""
    path = Path(ref)
    if path.exists():
        return load_scenario(path)
    stem = path.name[:-4] if path.name.endswith(".scn") else path.name
    try:
        return load_builtin_scenario(stem)
    except ScenarioError:
        raise _fail(ref, "no such scenario file or bundled scenario") from None


def instance_validation(scenario: Scenario):
    """Admissibility/basicness report of the scenario against its states."""
    return validate_instance(scenario.states_or_minimal(), scenario.schedule.steps)
