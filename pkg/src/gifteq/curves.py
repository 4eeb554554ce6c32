"""Piecewise-linear yield curves.

A yield curve maps an account balance to the size of the gift an entity is
willing to hand over: non-negative, monotonically non-increasing, and
non-expanding (no piece steeper than slope -1). The workhorse family is
"linear until the curve reaches zero, flat zero afterwards".

Two layers:

* ``PiecewiseLinear`` - plain signed piecewise-linear function, no validation.
  Used for reflections (which are <= 0) and for deliberately invalid curves in
  negative tests.
* ``YieldCurve`` - canonicalized and validated subclass. Canonicalization
  materializes the zero crossing of a descending right tail as an explicit
  breakpoint so evaluation, crossing lookup and slope analysis are all exact.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

# Slope comparisons tolerate float dust from canonicalization arithmetic.
SLOPE_TOL = 1e-12
VALUE_TOL = 1e-12

Interval = tuple[float, float]


class PiecewiseLinear:
    """Signed piecewise-linear function with explicit extrapolation slopes.

    ``xs`` are strictly increasing breakpoints with values ``ys``; outside the
    breakpoint range the function continues with ``left_slope`` / ``right_slope``.
    """

    __slots__ = ("xs", "ys", "left_slope", "right_slope")

    def __init__(self, xs: Sequence[float], ys: Sequence[float],
                 left_slope: float = 0.0, right_slope: float = 0.0):
        xs = tuple(float(x) for x in xs)
        ys = tuple(float(y) for y in ys)
        if not xs:
            raise ValueError("need at least one breakpoint")
        if len(xs) != len(ys):
            raise ValueError(f"{len(xs)} breakpoints but {len(ys)} values")
        if any(not math.isfinite(v) for v in xs + ys):
            raise ValueError("breakpoints and values must be finite")
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        if not (math.isfinite(left_slope) and math.isfinite(right_slope)):
            raise ValueError("extrapolation slopes must be finite")
        self.xs = xs
        self.ys = ys
        self.left_slope = float(left_slope)
        self.right_slope = float(right_slope)

    def value(self, x: float) -> float:
        xs, ys = self.xs, self.ys
        if x <= xs[0]:
            return ys[0] + self.left_slope * (x - xs[0])
        if x >= xs[-1]:
            return ys[-1] + self.right_slope * (x - xs[-1])
        i = bisect_right(xs, x)
        x0, x1 = xs[i - 1], xs[i]
        y0, y1 = ys[i - 1], ys[i]
        return y0 + (y1 - y0) * (x - x0) / (x1 - x0)

    def __call__(self, x: float) -> float:
        return self.value(x)

    def values(self, x: Iterable[float]) -> np.ndarray:
        """Vectorized evaluation."""
        arr = np.asarray(x, dtype=float)
        out = np.interp(arr, self.xs, self.ys)
        if self.left_slope:
            mask = arr < self.xs[0]
            out = np.where(mask, self.ys[0] + self.left_slope * (arr - self.xs[0]), out)
        if self.right_slope:
            mask = arr > self.xs[-1]
            out = np.where(mask, self.ys[-1] + self.right_slope * (arr - self.xs[-1]), out)
        return out

    def pieces(self) -> list[tuple[float, float, float]]:
        """(lo, hi, slope) for every linear piece, including the infinite tails."""
        out = [(-math.inf, self.xs[0], self.left_slope)]
        for i in range(len(self.xs) - 1):
            x0, x1 = self.xs[i], self.xs[i + 1]
            slope = (self.ys[i + 1] - self.ys[i]) / (x1 - x0)
            out.append((x0, x1, slope))
        out.append((self.xs[-1], math.inf, self.right_slope))
        return out

    def slopes_on(self, interval: Interval) -> list[float]:
        """Slopes of the pieces overlapping ``interval`` with positive length."""
        lo, hi = interval
        if not lo < hi:
            raise ValueError(f"interval must be non-degenerate, got {interval!r}")
        return [slope for (a, b, slope) in self.pieces() if max(a, lo) < min(b, hi)]

    def reflect(self) -> "PiecewiseLinear":
        """The mirrored function x -> -f(-x).

        Point reflection through the origin: breakpoints and values negate and
        reverse, the extrapolation slopes swap sides, and every piece keeps its
        slope.
        """
        xs = tuple(-x for x in reversed(self.xs))
        ys = tuple(-y for y in reversed(self.ys))
        return PiecewiseLinear(xs, ys, left_slope=self.right_slope,
                               right_slope=self.left_slope)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PiecewiseLinear):
            return NotImplemented
        return (self.xs == other.xs and self.ys == other.ys
                and self.left_slope == other.left_slope
                and self.right_slope == other.right_slope)

    def __hash__(self) -> int:
        return hash((self.xs, self.ys, self.left_slope, self.right_slope))

    def __repr__(self) -> str:
        return (f"{type(self).__name__}(xs={self.xs!r}, ys={self.ys!r}, "
                f"left_slope={self.left_slope!r}, right_slope={self.right_slope!r})")


def is_zero(curve: PiecewiseLinear) -> bool:
    """Representation-independent test for the identically-zero function."""
    return (all(y == 0.0 for y in curve.ys)
            and curve.left_slope == 0.0 and curve.right_slope == 0.0)


class YieldCurve(PiecewiseLinear):
    """Validated yield curve: non-negative, non-increasing, non-expanding.

    Construction canonicalizes the representation: if the right tail descends
    it is cut at its zero crossing and continues flat at zero, so the stored
    breakpoints describe the clamped function exactly.
    """

    __slots__ = ()

    def __init__(self, xs: Sequence[float], ys: Sequence[float],
                 left_slope: float = 0.0, right_slope: float = 0.0):
        base = PiecewiseLinear(xs, ys, left_slope, right_slope)
        if any(y < 0.0 for y in base.ys):
            raise ValueError("yield curve values must be non-negative")
        for lo, hi, slope in base.pieces():
            if not (-1.0 - SLOPE_TOL <= slope <= SLOPE_TOL):
                raise ValueError(
                    f"piece on ({lo}, {hi}) has slope {slope}; every slope must lie in [-1, 0]")
        xs2, ys2 = list(base.xs), list(base.ys)
        right = base.right_slope
        if right < 0.0:
            # Descending tail crosses zero; clamp there and stay flat.
            if ys2[-1] > 0.0:
                crossing = xs2[-1] + ys2[-1] / -right
                xs2.append(crossing)
                ys2.append(0.0)
            right = 0.0
        super().__init__(xs2, ys2, left_slope=base.left_slope, right_slope=right)

    def value(self, x: float) -> float:
        # Clamp from below: canonicalization makes this a no-op except for dust.
        return max(PiecewiseLinear.value(self, x), 0.0)

    def values(self, x: Iterable[float]) -> np.ndarray:
        return np.maximum(PiecewiseLinear.values(self, x), 0.0)


ZERO_CURVE = YieldCurve((0.0,), (0.0,))


def linear_flat(slope: float, intercept: float) -> YieldCurve:
    """Curve that is ``intercept + slope * x`` until it reaches zero, then flat zero.

    The family requires -1 < slope <= 0 and intercept >= 0.
    """
    if not -1.0 < slope <= 0.0:
        raise ValueError(f"slope must lie in (-1, 0], got {slope}")
    if intercept < 0.0:
        raise ValueError(f"intercept must be non-negative, got {intercept}")
    if slope == 0.0:
        return YieldCurve((0.0,), (intercept,))
    crossing = intercept / -slope
    return YieldCurve((crossing,), (0.0,), left_slope=slope, right_slope=0.0)


def zero_crossing(curve: PiecewiseLinear) -> Optional[float]:
    """Smallest x from which the curve is identically zero onwards.

    Returns None when no such point exists (the curve stays positive forever)
    and -inf for the identically-zero curve (every x qualifies).
    """
    if curve.right_slope != 0.0 or curve.ys[-1] != 0.0:
        return None
    # Walk left while the function stays pinned at zero.
    index = len(curve.ys) - 1
    while index > 0 and curve.ys[index - 1] == 0.0:
        index -= 1
    if index == 0:
        if curve.left_slope == 0.0 and curve.ys[0] == 0.0:
            return -math.inf
        return curve.xs[0]
    return curve.xs[index]


@dataclass(frozen=True)
class CurveProperties:
    """Exact monotonicity/Lipschitz summary of a curve on an interval.

    ``lipschitz_upper`` is the largest, ``uniform_lower`` the smallest slope
    magnitude among the pieces meeting the interval. ``contraction_q`` repeats
    the upper bound when it certifies a contraction (< 1), else None.
    """

    interval: Interval
    nonincreasing: bool
    lipschitz_upper: float
    uniform_lower: float
    contraction_q: Optional[float]

    @property
    def uniformly_monotonous(self) -> bool:
        return self.nonincreasing and self.uniform_lower > 0.0

    @property
    def is_contraction(self) -> bool:
        return self.contraction_q is not None


def _sampling_window(curve: PiecewiseLinear, interval: Interval) -> Interval:
    """Finite window inside ``interval`` that still sees every relevant piece."""
    lo, hi = interval
    span = max(curve.xs[-1] - curve.xs[0], 1.0)
    if lo == -math.inf:
        lo = min(curve.xs[0], hi if hi != math.inf else curve.xs[0]) - 2.0 * span
    if hi == math.inf:
        hi = max(curve.xs[-1], lo) + 2.0 * span
    return lo, hi


def analyze(curve: PiecewiseLinear, interval: Interval, samples: int = 256,
            seed: int = 0) -> CurveProperties:
    """Exact slope inspection on ``interval`` with a sampled cross-check.

    The bounds come from enumerating the linear pieces that overlap the
    interval. ``samples`` random point pairs (plus all breakpoint pairs inside
    the interval) only cross-check those exact bounds against difference
    quotients; a failure would mean the piece enumeration is wrong and raises.
    """
    slopes = curve.slopes_on(interval)
    if not slopes:  # interval has positive length, so at least one piece meets it
        raise AssertionError("no piece overlaps a non-degenerate interval")
    magnitudes = [abs(s) for s in slopes]
    upper = max(magnitudes)
    lower = min(magnitudes)
    nonincreasing = all(s <= SLOPE_TOL for s in slopes)
    props = CurveProperties(
        interval=interval,
        nonincreasing=nonincreasing,
        lipschitz_upper=upper,
        uniform_lower=lower,
        contraction_q=upper if upper < 1.0 else None,
    )
    if samples > 0:
        _cross_check(curve, interval, props, samples, seed)
    return props


def _cross_check(curve: PiecewiseLinear, interval: Interval,
                 props: CurveProperties, samples: int, seed: int) -> None:
    lo, hi = _sampling_window(curve, interval)
    rng = np.random.default_rng(seed)
    xs = rng.uniform(lo, hi, size=samples)
    ys = rng.uniform(lo, hi, size=samples)
    anchors = [b for b in curve.xs if lo <= b <= hi] + [lo, hi]
    for a in anchors:
        for b in anchors:
            if a < b:
                xs = np.append(xs, a)
                ys = np.append(ys, b)
    min_gap = 1e-6 * max(hi - lo, 1.0)
    keep = np.abs(xs - ys) >= min_gap
    xs, ys = xs[keep], ys[keep]
    quotients = np.abs(curve.values(xs) - curve.values(ys)) / np.abs(xs - ys)
    if quotients.size == 0:
        return
    if float(np.max(quotients)) > props.lipschitz_upper + VALUE_TOL:
        raise AssertionError(
            f"sampled difference quotient {np.max(quotients)} exceeds exact bound "
            f"{props.lipschitz_upper}")
    if props.nonincreasing and float(np.min(quotients)) < props.uniform_lower - VALUE_TOL:
        # For a monotone curve every quotient is a convex mix of piece slopes.
        raise AssertionError(
            f"sampled difference quotient {np.min(quotients)} below exact bound "
            f"{props.uniform_lower}")


def reflect(curve: PiecewiseLinear) -> PiecewiseLinear:
    """Mirrored curve x -> -f(-x); signed, so the result is a plain PiecewiseLinear."""
    return curve.reflect()
