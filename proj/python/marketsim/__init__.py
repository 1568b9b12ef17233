"""Deterministic simulator of market-based CPU resource allocation."""

from ._core import (
    Behavior,
    ConfigError,
    ExpiryPolicy,
    MechanismSpec,
    RunRecord,
    SimConfig,
    Task,
    TaskOutcome,
    TaskStatus,
    behavior_name,
    efficiency,
    fixed_price_allocate,
    generate_workload,
    market_allocate,
    mean_utility_per_host,
    mechanism_name,
    optimal_utility_bruteforce,
    parse_behavior,
    parse_mechanism,
    proportional_share_allocate,
    redistribute,
    run,
    run_with_arrivals,
    task_utility,
    validate,
)

__all__ = [
    "Behavior",
    "ConfigError",
    "ExpiryPolicy",
    "MechanismSpec",
    "RunRecord",
    "SimConfig",
    "Task",
    "TaskOutcome",
    "TaskStatus",
    "behavior_name",
    "efficiency",
    "fixed_price_allocate",
    "generate_workload",
    "market_allocate",
    "mean_utility_per_host",
    "mechanism_name",
    "optimal_utility_bruteforce",
    "parse_behavior",
    "parse_mechanism",
    "proportional_share_allocate",
    "redistribute",
    "run",
    "run_with_arrivals",
    "task_utility",
    "validate",
]
