"""Sampled verification of the structural lemmas behind the equilibrium theorem.

Each check evaluates an inequality on seeded random point pairs plus every
pair of curve breakpoints inside the interval (piecewise-linear violations are
extremal at breakpoints, so the deterministic pairs catch them even when the
random draw is unlucky). Checks never weaken a bound: a curve that fails its
declared precondition makes the check inapplicable rather than quietly passed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .curves import Interval, PiecewiseLinear, analyze

PRECISION_FLOOR = 1e-12

# A violation records (x, y, measured difference, allowed difference).
Violation = tuple[float, float, float, float]


@dataclass(frozen=True)
class SampledCheck:
    """Outcome of one sampled inequality check."""

    name: str
    samples: int
    violations: tuple[Violation, ...]
    worst_ratio: float
    applicable: bool = True
    detail: str = ""

    @property
    def passed(self) -> bool:
        return not self.violations


def _pair_samples(interval: Interval, n: int, seed: int,
                  anchors: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    """n random pairs inside the interval plus every anchor pair, well separated."""
    lo, hi = interval
    if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
        raise ValueError(f"need a finite non-degenerate interval, got {interval!r}")
    rng = np.random.default_rng(seed)
    xs = rng.uniform(lo, hi, size=n)
    ys = rng.uniform(lo, hi, size=n)
    inside = sorted({float(a) for a in anchors if lo <= a <= hi} | {lo, hi})
    extra_x = [a for i, a in enumerate(inside) for b in inside[i + 1:]]
    extra_y = [b for i, a in enumerate(inside) for b in inside[i + 1:]]
    xs = np.concatenate([xs, extra_x]) if extra_x else xs
    ys = np.concatenate([ys, extra_y]) if extra_y else ys
    keep = np.abs(xs - ys) >= 1e-9 * max(hi - lo, 1.0)
    return xs[keep], ys[keep]


def _run_pair_check(name: str, mapping: Callable[[np.ndarray], np.ndarray],
                    modulus: float, interval: Interval, n: int, seed: int,
                    anchors: Sequence[float], applicable: bool = True,
                    detail: str = "") -> SampledCheck:
    """Assert |f(x) - f(y)| <= modulus * |x - y| + floor on sampled pairs."""
    if not applicable:
        return SampledCheck(name=name, samples=0, violations=(), worst_ratio=math.nan,
                            applicable=False, detail=detail)
    xs, ys = _pair_samples(interval, n, seed, anchors)
    gaps = np.abs(xs - ys)
    diffs = np.abs(mapping(xs) - mapping(ys))
    allowed = modulus * gaps + PRECISION_FLOOR
    ratios = diffs / gaps
    bad = diffs > allowed
    violations = tuple(
        (float(x), float(y), float(d), float(a))
        for x, y, d, a in zip(xs[bad], ys[bad], diffs[bad], allowed[bad]))
    worst = float(np.max(ratios)) if ratios.size else 0.0
    return SampledCheck(name=name, samples=int(xs.size), violations=violations,
                        worst_ratio=worst, detail=detail)


def _curve_anchors(*curves: PiecewiseLinear) -> list[float]:
    return [b for curve in curves for b in curve.xs]


def check_L_nonexpanding(p_curve: PiecewiseLinear, q_curve: PiecewiseLinear,
                         interval: Interval, n: int = 1000,
                         seed: int = 0) -> SampledCheck:
    """x + P(x) + Q(x) never stretches distances when P and Q are valid yield curves."""

    def mapping(x: np.ndarray) -> np.ndarray:
        return x + p_curve.values(x) + q_curve.values(x)

    return _run_pair_check("L-nonexpanding", mapping, 1.0, interval, n, seed,
                           _curve_anchors(p_curve, q_curve))


def check_L_contraction(p_curve: PiecewiseLinear, q_curve: PiecewiseLinear,
                        interval: Interval, n: int = 1000,
                        seed: int = 0) -> SampledCheck:
    """x + P(x) + Q(x) contracts with modulus MAX(1 - r, q) on the interval.

    Needs one curve uniformly monotonous (lower slope bound r > 0) and one a
    contraction (upper bound q < 1) on the interval, in either role split;
    otherwise the check is inapplicable, not failed.
    """
    p_props = analyze(p_curve, interval, samples=0)
    q_props = analyze(q_curve, interval, samples=0)
    if not (p_props.nonincreasing and q_props.nonincreasing
            and p_props.lipschitz_upper <= 1.0 + PRECISION_FLOOR
            and q_props.lipschitz_upper <= 1.0 + PRECISION_FLOOR):
        return SampledCheck(name="L-contraction", samples=0, violations=(),
                            worst_ratio=math.nan, applicable=False,
                            detail="curves are not non-increasing and non-expanding "
                                   "on the interval")
    bounds = []
    for monotone, contracting in ((p_props, q_props), (q_props, p_props),
                                  (p_props, p_props), (q_props, q_props)):
        if monotone.uniformly_monotonous and contracting.is_contraction:
            bounds.append(max(1.0 - monotone.uniform_lower, contracting.contraction_q))
    if not bounds:
        return SampledCheck(name="L-contraction", samples=0, violations=(),
                            worst_ratio=math.nan, applicable=False,
                            detail="no uniformly-monotonous / contraction split "
                                   "on the interval")
    modulus = min(bounds)

    def mapping(x: np.ndarray) -> np.ndarray:
        return x + p_curve.values(x) + q_curve.values(x)

    return _run_pair_check("L-contraction", mapping, modulus, interval, n, seed,
                           _curve_anchors(p_curve, q_curve),
                           detail=f"modulus {modulus!r}")


def account_map(p_curve: PiecewiseLinear,
                q_curve: PiecewiseLinear) -> Callable[[np.ndarray], np.ndarray]:
    """Vectorized one-step balance update x -> x + P(x) - Q(-x)."""

    def mapping(x: np.ndarray) -> np.ndarray:
        return x + p_curve.values(x) - q_curve.values(-x)

    return mapping


# Declared function classes for composition checks.
NONEXPANDING = ("nonexpanding", 1.0)


def contraction(q: float) -> tuple[str, float]:
    if not 0.0 <= q < 1.0:
        raise ValueError(f"contraction modulus must lie in [0, 1), got {q}")
    return ("contraction", q)


def check_composition(f: Callable[[np.ndarray], np.ndarray],
                      g: Callable[[np.ndarray], np.ndarray],
                      interval: Interval,
                      f_class: tuple[str, float], g_class: tuple[str, float],
                      n: int = 1000, seed: int = 0,
                      anchors: Sequence[float] = ()) -> SampledCheck:
    """g o f inherits the declared classes: the composite modulus is the product.

    Both declared classes are themselves verified on the samples first; a
    mapping that fails its declaration makes the check inapplicable.
    """
    for label, (kind, modulus) in (("f", f_class), ("g", g_class)):
        if kind not in ("nonexpanding", "contraction"):
            raise ValueError(f"unknown class {kind!r} for {label}")
        if kind == "contraction" and not 0.0 <= modulus < 1.0:
            raise ValueError(f"contraction modulus must lie in [0, 1), got {modulus}")
        if kind == "nonexpanding" and modulus != 1.0:
            raise ValueError("non-expanding class carries modulus 1")

    xs, ys = _pair_samples(interval, n, seed, anchors)
    gaps = np.abs(xs - ys)
    for label, mapping, (kind, modulus) in (("f", f, f_class), ("g", g, g_class)):
        diffs = np.abs(mapping(xs) - mapping(ys))
        if np.any(diffs > modulus * gaps + PRECISION_FLOOR):
            return SampledCheck(
                name="composition", samples=int(xs.size), violations=(),
                worst_ratio=math.nan, applicable=False,
                detail=f"{label} violates its declared class {kind} ({modulus!r})")
    composite_modulus = f_class[1] * g_class[1]

    def composed(x: np.ndarray) -> np.ndarray:
        return g(f(x))

    check = _run_pair_check("composition", composed, composite_modulus, interval,
                            n, seed, anchors,
                            detail=f"composite modulus {composite_modulus!r}")
    return check


def check_reflection(curve: PiecewiseLinear, interval: Interval, n: int = 1000,
                     seed: int = 0) -> SampledCheck:
    """Mirroring x -> -f(-x) preserves the curve's shape properties exactly.

    Compares the exact analysis of the curve on the interval with the analysis
    of its reflection on the mirrored interval (flags and both slope bounds),
    then samples the pointwise mirror identity.
    """
    lo, hi = interval
    mirrored = (-hi, -lo)
    reflected = curve.reflect()
    original_props = analyze(curve, interval, samples=0)
    mirrored_props = analyze(reflected, mirrored, samples=0)
    violations: list[Violation] = []
    if original_props.nonincreasing != mirrored_props.nonincreasing:
        violations.append((lo, hi, 1.0, 0.0))
    for a, b in ((original_props.lipschitz_upper, mirrored_props.lipschitz_upper),
                 (original_props.uniform_lower, mirrored_props.uniform_lower)):
        if abs(a - b) > PRECISION_FLOOR:
            violations.append((lo, hi, abs(a - b), PRECISION_FLOOR))

    rng = np.random.default_rng(seed)
    xs = rng.uniform(lo, hi, size=n)
    xs = np.concatenate([xs, [b for b in curve.xs if lo <= b <= hi], [lo, hi]])
    mismatch = np.abs(reflected.values(-xs) - (-curve.values(xs)))
    for x, m in zip(xs[mismatch > PRECISION_FLOOR], mismatch[mismatch > PRECISION_FLOOR]):
        violations.append((float(-x), float(x), float(m), PRECISION_FLOOR))
    worst = float(np.max(mismatch)) if mismatch.size else 0.0
    return SampledCheck(name="reflection", samples=int(xs.size),
                        violations=tuple(violations), worst_ratio=worst)
