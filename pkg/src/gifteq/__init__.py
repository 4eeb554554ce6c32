"""Simulation and verification toolkit for cyclic gift-exchange economies.

Balances between pairs of entities move under piecewise-linear yield curves;
the package builds the account operators, iterates schedules to their periodic
equilibria, checks the contraction conditions that guarantee uniqueness, and
ships sampled property checks plus a small scenario format and CLI.
"""

from .checks import (PRECISION_FLOOR, SampledCheck, account_map,
                     check_composition, check_L_contraction,
                     check_L_nonexpanding, check_reflection, contraction,
                     NONEXPANDING)
from .curves import (SLOPE_TOL, VALUE_TOL, ZERO_CURVE, CurveProperties,
                     PiecewiseLinear, YieldCurve, analyze, is_zero,
                     linear_flat, reflect, zero_crossing)
from .dynamics import (AccountOperator, BalanceTrajectory, CurveAssignment,
                       Ledger, build_cycle_operators, build_operator,
                       compose_cycle, ledger_update, trajectory)
from .model import (InstanceValidation, Multiset, Schedule, StepValidation,
                    SupplyDemandItem, Transaction, demand, detect_cycle_order,
                    is_admissible_step, is_basic_step, minimal_state,
                    multipair, required_items, supply, validate_instance)
from .scenario import (RunParams, Scenario, ScenarioError,
                       builtin_scenario_names, dumps, emit_scenario,
                       instance_validation, load_builtin_scenario,
                       load_scenario, loads, parse_scenario, resolve_scenario)
from .solver import (CLOSURE_TOL, DEFAULT_MAX_ITER, DEFAULT_TOL,
                     DIVERGENCE_BOUND, ConditionReport, EquilibriumResult,
                     InvariantInterval, UniquenessReport, aligned_spread,
                     check_conditions, construct_invariant_interval,
                     cycle_rate_bound, default_starts, equilibrium_yields,
                     estimate_rate, find_equilibrium, verify_uniqueness,
                     verify_zero_sum)
from .suites import (SuiteLine, SuiteResult, random_pair_scenario, run_suite,
                     run_negative_controls_suite, run_paper_graphs_suite,
                     run_random_suite, run_scenario_suite)

__version__ = "0.1.0"

__all__ = [
    "AccountOperator",
    "BalanceTrajectory",
    "CLOSURE_TOL",
    "ConditionReport",
    "CurveAssignment",
    "CurveProperties",
    "DEFAULT_MAX_ITER",
    "DEFAULT_TOL",
    "DIVERGENCE_BOUND",
    "EquilibriumResult",
    "InstanceValidation",
    "InvariantInterval",
    "Ledger",
    "Multiset",
    "NONEXPANDING",
    "PRECISION_FLOOR",
    "PiecewiseLinear",
    "RunParams",
    "SLOPE_TOL",
    "SampledCheck",
    "Scenario",
    "ScenarioError",
    "Schedule",
    "StepValidation",
    "SuiteLine",
    "SuiteResult",
    "SupplyDemandItem",
    "Transaction",
    "UniquenessReport",
    "VALUE_TOL",
    "YieldCurve",
    "ZERO_CURVE",
    "account_map",
    "aligned_spread",
    "analyze",
    "build_cycle_operators",
    "build_operator",
    "builtin_scenario_names",
    "check_L_contraction",
    "check_L_nonexpanding",
    "check_composition",
    "check_conditions",
    "check_reflection",
    "compose_cycle",
    "construct_invariant_interval",
    "contraction",
    "cycle_rate_bound",
    "default_starts",
    "demand",
    "detect_cycle_order",
    "dumps",
    "emit_scenario",
    "equilibrium_yields",
    "estimate_rate",
    "find_equilibrium",
    "instance_validation",
    "is_admissible_step",
    "is_basic_step",
    "is_zero",
    "ledger_update",
    "linear_flat",
    "load_builtin_scenario",
    "load_scenario",
    "loads",
    "minimal_state",
    "multipair",
    "parse_scenario",
    "random_pair_scenario",
    "reflect",
    "required_items",
    "resolve_scenario",
    "run_negative_controls_suite",
    "run_paper_graphs_suite",
    "run_random_suite",
    "run_scenario_suite",
    "run_suite",
    "supply",
    "trajectory",
    "validate_instance",
    "verify_uniqueness",
    "verify_zero_sum",
    "zero_crossing",
]
