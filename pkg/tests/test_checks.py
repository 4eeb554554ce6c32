"""Sampled lemma checks and their negative controls."""

import numpy as np
import pytest

from gifteq.checks import (NONEXPANDING, PRECISION_FLOOR, account_map,
                           check_composition, check_L_contraction,
                           check_L_nonexpanding, check_reflection, contraction)
from gifteq.curves import PiecewiseLinear, YieldCurve, linear_flat

P_CURVE = linear_flat(-0.5, 2.0)
Q_CURVE = linear_flat(-0.25, 1.0)


def steep_curve():
    """Slope -1.5, zero from x = 2 on; built behind the validated constructor."""
    return PiecewiseLinear((2.0,), (0.0,), left_slope=-1.5, right_slope=0.0)


def test_nonexpanding_holds_for_valid_pairs():
    for seed in (0, 1, 2):
        result = check_L_nonexpanding(P_CURVE, Q_CURVE, (-8.0, 8.0), n=500,
                                      seed=seed)
        assert result.applicable
        assert result.passed
        assert result.violations == ()
        assert result.worst_ratio <= 1.0 + 1e-9


def test_nonexpanding_flags_steep_pair():
    steep = steep_curve()
    result = check_L_nonexpanding(steep, steep, (-5.0, 5.0), n=500, seed=3)
    assert not result.passed
    assert len(result.violations) > 0
    assert result.worst_ratio > 1.9

    # Hand-checked witness pair: both curves still active at 0 and 1, so
    # the sum map moves by 2 while the points are 1 apart.
    left = 0.0 + (3.0 - 1.5 * 0.0) + (3.0 - 1.5 * 0.0)
    right = 1.0 + (3.0 - 1.5 * 1.0) + (3.0 - 1.5 * 1.0)
    assert abs(left - right) == 2.0


def test_single_steep_curve_with_zero_partner_passes():
    # One violating slot is not enough: the sum map's slope stays in [-0.5, 1].
    zero = PiecewiseLinear((0.0,), (0.0,))
    result = check_L_nonexpanding(steep_curve(), zero, (-5.0, 5.0), n=500, seed=0)
    assert result.passed


def test_nonexpanding_requires_finite_interval():
    with pytest.raises(ValueError):
        check_L_nonexpanding(P_CURVE, Q_CURVE, (0.0, float("inf")))
    with pytest.raises(ValueError):
        check_L_nonexpanding(P_CURVE, Q_CURVE, (1.0, 1.0))


def test_contraction_check_on_active_region():
    result = check_L_contraction(P_CURVE, Q_CURVE, (-6.0, -1.0), n=300, seed=0)
    assert result.applicable
    assert result.passed
    assert "0.5" in result.detail


def test_contraction_check_inapplicable_for_steep_curves():
    result = check_L_contraction(steep_curve(), Q_CURVE, (-5.0, 5.0), n=100, seed=0)
    assert not result.applicable
    assert result.passed  # inapplicable is not failed
    assert result.detail


def test_contraction_bound_with_slope_minus_one():
    # Slope exactly -1 is non-expanding; the partner supplies the contraction.
    edge = YieldCurve((2.0,), (0.0,), left_slope=-1.0)
    result = check_L_contraction(edge, linear_flat(-0.5, 2.0), (-6.0, -1.0),
                                 n=300, seed=1)
    assert result.applicable
    assert result.passed


def test_account_map_matches_operator():
    from gifteq.dynamics import AccountOperator

    mapping = account_map(P_CURVE, Q_CURVE)
    op = AccountOperator(p_curve=P_CURVE, q_curve=Q_CURVE)
    grid = np.linspace(-6.0, 6.0, 25)
    expected = np.array([op.apply(float(x)) for x in grid])
    assert np.allclose(mapping(grid), expected, atol=1e-15)


def test_composition_of_nonexpanding_maps():
    f = account_map(P_CURVE, Q_CURVE)
    g = account_map(Q_CURVE, P_CURVE)
    result = check_composition(f, g, (-4.0, 4.0), NONEXPANDING, NONEXPANDING,
                               n=400, seed=0, anchors=(-4.0, 4.0))
    assert result.applicable
    assert result.passed


def test_composition_multiplies_contraction_moduli():
    # One-sided maps on the active region contract at exactly the curve slope.
    f = account_map(P_CURVE, PiecewiseLinear((0.0,), (0.0,)))
    g = account_map(Q_CURVE, PiecewiseLinear((0.0,), (0.0,)))
    result = check_composition(f, g, (-10.0, -6.0), contraction(0.5),
                               contraction(0.75), n=400, seed=2)
    assert result.applicable
    assert result.passed


def test_composition_rejects_false_declaration():
    steep_map = account_map(steep_curve(), steep_curve())
    good_map = account_map(P_CURVE, Q_CURVE)
    result = check_composition(steep_map, good_map, (-5.0, 5.0), NONEXPANDING,
                               NONEXPANDING, n=400, seed=0, anchors=(-2.0, 2.0))
    assert not result.applicable
    assert "declared class" in result.detail


def test_composition_validates_class_tuples():
    f = account_map(P_CURVE, Q_CURVE)
    with pytest.raises(ValueError):
        check_composition(f, f, (-2.0, 2.0), ("bogus", 1.0), NONEXPANDING)
    with pytest.raises(ValueError):
        check_composition(f, f, (-2.0, 2.0), contraction(1.5), NONEXPANDING)


def test_reflection_check_multi_piece_curve():
    curve = YieldCurve((-1.0, 0.0, 2.0), (3.0, 2.5, 0.5),
                       left_slope=-1.0, right_slope=-0.3)
    result = check_reflection(curve, (-6.0, 6.0), n=400, seed=5)
    assert result.applicable
    assert result.passed
    assert result.violations == ()


def test_checks_are_deterministic_per_seed():
    first = check_L_nonexpanding(P_CURVE, Q_CURVE, (-8.0, 8.0), n=300, seed=11)
    second = check_L_nonexpanding(P_CURVE, Q_CURVE, (-8.0, 8.0), n=300, seed=11)
    assert first == second
    other = check_L_nonexpanding(P_CURVE, Q_CURVE, (-8.0, 8.0), n=300, seed=12)
    assert other.samples == first.samples


def test_precision_floor_absorbs_roundoff():
    # Equal arguments after filtering never appear, and near-equal pairs must
    # not trip the check through floating-point noise.
    wiggly = YieldCurve(tuple(np.linspace(-3, 3, 13)),
                        tuple(np.maximum(0.0, np.linspace(2.0, 0.0, 13))),
                        left_slope=-0.9)
    result = check_L_nonexpanding(wiggly, wiggly, (-3.5, 3.5), n=800, seed=7)
    assert result.passed
    assert PRECISION_FLOOR == 1e-12
