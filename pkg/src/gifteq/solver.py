"""Equilibrium search and verification for cyclical schedules.

The cycle operator (one schedule period) is iterated as a vector map on the k
per-phase balances. When every step is non-expanding and some step contracts
on an interval the schedule maps into itself, the iteration converges to the
unique k-fold equilibrium; this module finds it, checks the sufficient
conditions, and verifies the structural consequences (zero sum of equilibrium
yields, uniqueness across starts, geometric convergence rate).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .curves import Interval, analyze, is_zero, zero_crossing
from .dynamics import (AccountOperator, BalanceTrajectory, CurveAssignment,
                       build_cycle_operators)
from .model import EntityId, Schedule

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 10 ** 6
DIVERGENCE_BOUND = 1e12
CLOSURE_TOL = 1e-9

STATUS_CONVERGED = "converged"
STATUS_DIVERGED = "diverged"
STATUS_MAX_ITERATIONS = "max-iterations"

Pair = tuple[EntityId, EntityId]


@dataclass(frozen=True)
class InvariantInterval:
    """Interval [lower, upper] the account operators map into itself.

    An infinite bound is either a real obstruction (some always-positive curve
    admits no zero crossing) or vacuous because that side has no non-trivial
    curves at all; the ``*_unconstrained`` flags mark the vacuous case, where
    uniqueness is only one-sided.
    """

    lower: float
    upper: float
    lower_unconstrained: bool = False
    upper_unconstrained: bool = False

    def __post_init__(self) -> None:
        if self.lower > self.upper:
            raise ValueError(
                f"empty invariant interval: lower {self.lower} exceeds upper {self.upper}")

    def as_tuple(self) -> Interval:
        return (self.lower, self.upper)

    def contains(self, x: float) -> bool:
        return self.lower <= x <= self.upper

    @property
    def degenerate(self) -> bool:
        return self.lower == self.upper


def construct_invariant_interval(schedule: Schedule, pair: Pair,
                                 curves: CurveAssignment) -> InvariantInterval:
    """Build [z', z] from the zero crossings of the non-trivial curves.

    z is the largest crossing among the giving-side curves (beyond it they all
    yield nothing, so balances cannot climb past it); z' mirrors the receiving
    side. A side with only trivial curves is unbounded and flagged; a
    non-trivial curve without a crossing forces that side to infinity.
    """
    operators = build_cycle_operators(schedule, pair, curves)
    p_active = [op.p_curve for op in operators if not is_zero(op.p_curve)]
    q_active = [op.q_curve for op in operators if not is_zero(op.q_curve)]

    if not p_active:
        upper, upper_unconstrained = math.inf, True
    else:
        crossings = [zero_crossing(curve) for curve in p_active]
        upper = math.inf if any(c is None for c in crossings) else max(crossings)
        upper_unconstrained = False

    if not q_active:
        lower, lower_unconstrained = -math.inf, True
    else:
        crossings = [zero_crossing(curve) for curve in q_active]
        lower = -math.inf if any(c is None for c in crossings) else -max(crossings)
        lower_unconstrained = False

    return InvariantInterval(lower=lower, upper=upper,
                             lower_unconstrained=lower_unconstrained,
                             upper_unconstrained=upper_unconstrained)


@dataclass(frozen=True)
class ConditionReport:
    """Sufficient conditions for a unique k-fold equilibrium on the interval.

    ``witness_step`` is the 1-based index of the first step carrying both a
    uniformly monotonous curve and a contracting curve on the interval; the
    theorem needs both at the same step. ``closure_empirical`` marks closure
    that was only established by boundary sampling, not analytically.
    """

    interval: InvariantInterval
    interval_closed_under_operators: bool
    all_curves_nonincreasing_nonexpanding: bool
    exists_uniformly_monotonous_step: bool
    exists_contraction_step: bool
    witness_step: Optional[int]
    closure_empirical: bool = False

    @property
    def theorem_applies(self) -> bool:
        return (self.interval_closed_under_operators
                and self.all_curves_nonincreasing_nonexpanding
                and self.witness_step is not None)


def _mirror(interval: Interval) -> Interval:
    lo, hi = interval
    return (-hi, -lo)


def _closure_samples(interval: Interval, operators: Sequence[AccountOperator],
                     count: int = 97) -> np.ndarray:
    """Sample points of the interval, clipped to a finite window, boundary-dense."""
    lo, hi = interval
    breakpoints = [b for op in operators for b in op.p_curve.xs]
    breakpoints += [-b for op in operators for b in op.q_curve.xs]
    span = max(max(breakpoints) - min(breakpoints), 1.0)
    wlo = lo if lo != -math.inf else min(breakpoints) - 2.0 * span
    whi = hi if hi != math.inf else max(breakpoints) + 2.0 * span
    points = list(np.linspace(wlo, whi, count))
    for scale in (1e-3, 1e-6, 1e-9):  # hug the finite boundaries
        offset = scale * max(whi - wlo, 1.0)
        if hi != math.inf:
            points.append(hi - offset)
        if lo != -math.inf:
            points.append(lo + offset)
    arr = np.array(points)
    return arr[(arr >= wlo) & (arr <= whi)]


def check_conditions(schedule: Schedule, pair: Pair, curves: CurveAssignment,
                     interval: Optional[InvariantInterval] = None,
                     samples: int = 256) -> ConditionReport:
    """Evaluate the three sufficient conditions on ``interval``.

    Closure is first checked analytically (every giving-side curve vanishes at
    the upper bound, every receiving-side curve at the mirrored lower bound;
    non-expansion then pins the operators inside); if that fails, boundary
    sampling decides and the result is marked empirical. Receiving-side curves
    are analyzed on the mirrored interval because they enter the dynamics
    through x -> curve(-x).
    """
    if interval is None:
        interval = construct_invariant_interval(schedule, pair, curves)
    operators = build_cycle_operators(schedule, pair, curves)
    lo, hi = interval.as_tuple()

    # Condition 1: closure.
    analytic = True
    if hi != math.inf:
        analytic &= all(op.p_curve.value(hi) <= CLOSURE_TOL for op in operators)
    if lo != -math.inf:
        analytic &= all(op.q_curve.value(-lo) <= CLOSURE_TOL for op in operators)
    if analytic:
        closed, empirical = True, False
    else:
        points = _closure_samples(interval.as_tuple(), operators)
        closed = all(
            lo - CLOSURE_TOL <= op.apply(float(x)) <= hi + CLOSURE_TOL
            for op in operators for x in points)
        empirical = closed

    if interval.degenerate:
        # Single-point interval: every operator fixes the point once closure
        # holds, so uniqueness on it is immediate and the scan is vacuous.
        return ConditionReport(
            interval=interval,
            interval_closed_under_operators=closed,
            all_curves_nonincreasing_nonexpanding=True,
            exists_uniformly_monotonous_step=True,
            exists_contraction_step=True,
            witness_step=1 if closed else None,
            closure_empirical=empirical,
        )

    # Conditions 2 and 3 from exact piece inspection on the interval.
    curves_ok = True
    exists_um = False
    exists_con = False
    witness: Optional[int] = None
    for index, op in enumerate(operators):
        p_props = analyze(op.p_curve, interval.as_tuple(), samples=samples)
        q_props = analyze(op.q_curve, _mirror(interval.as_tuple()), samples=samples)
        for props in (p_props, q_props):
            if not props.nonincreasing or props.lipschitz_upper > 1.0 + 1e-12:
                curves_ok = False
        um = p_props.uniformly_monotonous or q_props.uniformly_monotonous
        con = p_props.is_contraction or q_props.is_contraction
        exists_um = exists_um or um
        exists_con = exists_con or con
        if um and con and witness is None:
            witness = index + 1
    return ConditionReport(
        interval=interval,
        interval_closed_under_operators=closed,
        all_curves_nonincreasing_nonexpanding=curves_ok,
        exists_uniformly_monotonous_step=exists_um,
        exists_contraction_step=exists_con,
        witness_step=witness,
        closure_empirical=empirical,
    )


@dataclass(frozen=True)
class EquilibriumResult:
    """Outcome of the fixed-point iteration.

    ``u`` holds the balances after steps 1..k of the final cycle, so ``u[-1]``
    is the balance entering step 1. ``zero_sum_residual`` and ``rate_q`` are
    only set for converged runs.
    """

    u: tuple[float, ...]
    status: str
    iterations: int
    zero_sum_residual: Optional[float]
    rate_q: Optional[float]
    note: Optional[str] = None

    @property
    def converged(self) -> bool:
        return self.status == STATUS_CONVERGED


def equilibrium_yields(u: Sequence[float], schedule: Schedule, pair: Pair,
                       curves: CurveAssignment) -> list[tuple[float, float]]:
    """Per-step (giving-side, receiving-side) yields evaluated at the cycle vector."""
    operators = build_cycle_operators(schedule, pair, curves)
    if len(u) != len(operators):
        raise ValueError(f"cycle vector has {len(u)} phases for {len(operators)} steps")
    return [op.yields_at(u[index - 1]) for index, op in enumerate(operators)]


def _fit_geometric_rate(errors: Sequence[float], scale: float) -> Optional[float]:
    """Least-squares slope of log-errors over the settled tail; None when unusable."""
    floor = 1e-13 * max(1.0, abs(scale))
    usable: list[float] = []
    for e in errors:
        if e <= floor:
            break
        usable.append(math.log(e))
    if len(usable) < 4:
        return None
    tail = usable[len(usable) // 3:]
    if len(tail) < 3:
        return None
    slope = float(np.polyfit(np.arange(len(tail)), np.array(tail), 1)[0])
    rate = math.exp(slope)
    if not (0.0 <= rate < 1.0) or not math.isfinite(rate):
        return None
    return rate


def estimate_rate(traj: BalanceTrajectory, u: Sequence[float]) -> Optional[float]:
    """Per-cycle contraction rate from one phase of the trajectory.

    Fits the decay of |x_{ik} - u_phase| on a log scale. Returns None when the
    errors vanish exactly (superlinear landing), hit the float floor too soon,
    or fail to decay.
    """
    k = len(u)
    if k == 0:
        raise ValueError("equilibrium vector is empty")
    if traj.order != k:
        raise ValueError(f"trajectory order {traj.order} does not match vector length {k}")
    phase_values = [traj.x0]
    phase_values += [traj.balances[i] for i in range(k - 1, len(traj.balances), k)]
    target = u[k - 1]
    errors = [abs(v - target) for v in phase_values]
    return _fit_geometric_rate(errors, target)


def find_equilibrium(schedule: Schedule, pair: Pair, curves: CurveAssignment,
                     x0: float = 0.0, tol: float = DEFAULT_TOL,
                     max_iter: int = DEFAULT_MAX_ITER) -> EquilibriumResult:
    """Iterate the cycle operator until the per-cycle change drops to ``tol``.

    Divergence is declared when a balance crosses the fixed bound, or early
    when the orbit provably translates forever: once two consecutive cycles
    show the identical displacement while every balance involved sits beyond
    every curve breakpoint on one side and keeps moving outward, the dynamics
    has entered a terminal affine piece of composite slope one, so it never
    returns. Early detection reports the projected distance to the bound.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")
    operators = build_cycle_operators(schedule, pair, curves)
    k = len(operators)
    envelope = max(abs(b) for op in operators
                   for b in list(op.p_curve.xs) + [-x for x in op.q_curve.xs])

    x = float(x0)
    history0 = [x]  # balance at the start of each cycle (phase 0)
    vectors: list[list[float]] = []  # up to the last three cycle vectors
    status = STATUS_MAX_ITERATIONS
    note: Optional[str] = None
    u: tuple[float, ...] = ()
    cycles = 0

    while cycles < max_iter:
        vec = []
        for op in operators:
            x = op.apply(x)
            vec.append(x)
        cycles += 1
        history0.append(x)
        u = tuple(vec)
        if not all(math.isfinite(v) for v in vec):
            status = STATUS_DIVERGED
            note = "balance overflowed"
            break
        if max(abs(v) for v in vec) > DIVERGENCE_BOUND:
            status = STATUS_DIVERGED
            break
        vectors.append(vec)
        if len(vectors) > 3:
            vectors.pop(0)
        if len(vectors) >= 2:
            previous = vectors[-2]
            if max(abs(a - b) for a, b in zip(vec, previous)) <= tol:
                status = STATUS_CONVERGED
                break
        drift = _translation_drift(vectors, envelope, tol)
        if drift is not None:
            status = STATUS_DIVERGED
            remaining = (DIVERGENCE_BOUND - abs(x)) / abs(drift)
            note = (f"translation regime: displacement {drift!r} per cycle beyond all "
                    f"breakpoints; projected to cross the divergence bound after "
                    f"about {remaining:.3g} more cycles")
            break

    residual: Optional[float] = None
    rate: Optional[float] = None
    if status == STATUS_CONVERGED:
        yields = equilibrium_yields(u, schedule, pair, curves)
        residual = abs(math.fsum(p - q for p, q in yields))
        rate = _fit_geometric_rate([abs(v - u[k - 1]) for v in history0], u[k - 1])
    return EquilibriumResult(u=u, status=status, iterations=cycles,
                             zero_sum_residual=residual, rate_q=rate, note=note)


def _translation_drift(vectors: Sequence[Sequence[float]], envelope: float,
                       tol: float) -> Optional[float]:
    """Per-cycle displacement if the last three cycles are an exact outward translation."""
    if len(vectors) < 3:
        return None
    v1, v2, v3 = vectors[-3], vectors[-2], vectors[-1]
    d0 = v3[0] - v2[0]
    if abs(d0) <= max(10.0 * tol, 1e-9):
        return None
    slack = 1e-9 * max(1.0, abs(d0))
    for a, b, c in zip(v1, v2, v3):
        if abs((c - b) - d0) > slack or abs((b - a) - d0) > slack:
            return None
    points = [p for vec in (v1, v2, v3) for p in vec]
    sign = 1.0 if d0 > 0 else -1.0
    if any(p * sign <= envelope for p in points):
        return None
    return d0


@dataclass(frozen=True)
class UniquenessReport:
    """Agreement of equilibria found from several starts, after cyclic alignment."""

    agreed: bool
    max_spread: float
    results: tuple[EquilibriumResult, ...]
    failures: tuple[tuple[float, str], ...]  # (start, status) for non-converged runs


def aligned_spread(u: Sequence[float], v: Sequence[float]) -> float:
    """Max-norm distance between cycle vectors, minimized over cyclic rotations.

    The same equilibrium cycle may be entered at any phase; rotating one vector
    before comparing removes that ambiguity.
    """
    if len(u) != len(v):
        raise ValueError("cycle vectors must have equal length")
    k = len(u)
    best = math.inf
    for shift in range(k):
        spread = max(abs(u[i] - v[(i + shift) % k]) for i in range(k))
        best = min(best, spread)
    return best


def min_rotation(u: Sequence[float]) -> tuple[float, ...]:
    """Canonical rotation starting at the minimal element (first occurrence)."""
    k = len(u)
    start = min(range(k), key=lambda i: (u[i], i))
    return tuple(u[(start + i) % k] for i in range(k))


def verify_uniqueness(schedule: Schedule, pair: Pair, curves: CurveAssignment,
                      starts: Sequence[float], tol: float = DEFAULT_TOL,
                      max_iter: int = DEFAULT_MAX_ITER) -> UniquenessReport:
    """Solve from every start and compare the aligned equilibria.

    Passes when every run converges and all vectors lie within 10 * tol of the
    first one after cyclic alignment. Any non-converged start is reported as a
    failure instead of a spread.
    """
    if not starts:
        raise ValueError("need at least one start")
    results = tuple(find_equilibrium(schedule, pair, curves, x0=s, tol=tol,
                                     max_iter=max_iter) for s in starts)
    failures = tuple((float(start), res.status)
                     for start, res in zip(starts, results) if not res.converged)
    if failures:
        return UniquenessReport(agreed=False, max_spread=math.inf,
                                results=results, failures=failures)
    reference = results[0].u
    spread = max((aligned_spread(reference, res.u) for res in results[1:]), default=0.0)
    return UniquenessReport(agreed=spread <= 10.0 * tol, max_spread=spread,
                            results=results, failures=())


def verify_zero_sum(result: EquilibriumResult, schedule: Schedule, pair: Pair,
                    curves: CurveAssignment) -> float:
    """|sum of net equilibrium yields| recomputed from the curves; tiny when converged.

    Over one cycle the balance changes by exactly the net sum of gifts, so at a
    fixed point the gifts cancel.
    """
    if not result.converged:
        raise ValueError(f"zero-sum check needs a converged result, got {result.status!r}")
    yields = equilibrium_yields(result.u, schedule, pair, curves)
    return abs(math.fsum(p - q for p, q in yields))


def default_starts(interval: InvariantInterval, count: int = 10,
                   reach: float = 20.0) -> list[float]:
    """Evenly spaced starts spanning the interval, clipped to a finite window."""
    if count < 1:
        raise ValueError("count must be positive")
    lo, hi = interval.as_tuple()
    if lo == -math.inf and hi == math.inf:
        lo, hi = -reach / 2.0, reach / 2.0
    elif lo == -math.inf:
        lo = hi - reach
    elif hi == math.inf:
        hi = lo + reach
    if count == 1:
        return [(lo + hi) / 2.0]
    return list(np.linspace(lo, hi, count))


def cycle_rate_bound(schedule: Schedule, pair: Pair, curves: CurveAssignment,
                     interval: Optional[InvariantInterval] = None,
                     samples: int = 0) -> float:
    """Product over steps of the best per-step contraction bound on the interval.

    For a step whose curves give a uniformly monotonous one (lower slope bound
    r > 0) and a contracting one (upper bound q < 1), the step contracts with
    modulus at most MAX(1 - r, q); steps without such a split contribute 1
    (non-expansion). The product bounds the per-cycle rate.
    """
    if interval is None:
        interval = construct_invariant_interval(schedule, pair, curves)
    if interval.degenerate:
        return 0.0
    operators = build_cycle_operators(schedule, pair, curves)
    product = 1.0
    for op in operators:
        p = analyze(op.p_curve, interval.as_tuple(), samples=samples)
        q = analyze(op.q_curve, _mirror(interval.as_tuple()), samples=samples)
        candidates = [1.0]
        for monotone, contracting in ((p, q), (q, p), (p, p), (q, q)):
            if monotone.uniformly_monotonous and contracting.is_contraction:
                candidates.append(max(1.0 - monotone.uniform_lower,
                                      contracting.contraction_q))
        product *= min(candidates)
    return product
