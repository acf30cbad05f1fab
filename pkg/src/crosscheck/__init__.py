"""Priority-first activity scheduling with failure explanation."""

from .intervals import (
    EMPTY_SET,
    Interval,
    IntervalSet,
    from_pairs,
    intersect,
    normalize,
    occupancy_to_start_windows,
    subtract,
)
from .model import (
    Activity,
    ConstraintKind,
    Plan,
    PlanConfig,
    PlanError,
    ThermalSpec,
    UhfRule,
    Window,
    validate_plan,
)
from .profiles import (
    GeneratedActivity,
    GeneratedKind,
    PlacedActivity,
    PowerProfile,
    SocProfile,
    simulate_soc,
)
from .scheduler import (
    Phase2Reason,
    ReasonAt,
    Schedule,
    StepRecord,
    constraint_valid_intervals,
    final_valid_intervals,
    generate_thermal,
    place_awake,
    run_plan,
    run_scheduler,
    schedule_activity,
    try_place,
)
from .explain import (
    Explanation,
    FailingSubsets,
    FailureStepResult,
    collect_phase2_reasons,
    conflict_details,
    energy_consumers,
    explain,
    find_failing_subsets,
    find_failure_step,
    gate_constraints,
    peak_power_users,
)
from .planio import (
    canonical_json,
    parse_plan,
    serialize_explanation,
    serialize_plan,
    serialize_schedule,
)

__version__ = "0.1.0"

__all__ = [
    "Activity",
    "ConstraintKind",
    "EMPTY_SET",
    "Explanation",
    "FailingSubsets",
    "FailureStepResult",
    "GeneratedActivity",
    "GeneratedKind",
    "Interval",
    "IntervalSet",
    "PlacedActivity",
    "Plan",
    "PlanConfig",
    "PlanError",
    "Phase2Reason",
    "PowerProfile",
    "ReasonAt",
    "Schedule",
    "SocProfile",
    "StepRecord",
    "ThermalSpec",
    "UhfRule",
    "Window",
    "canonical_json",
    "collect_phase2_reasons",
    "conflict_details",
    "constraint_valid_intervals",
    "energy_consumers",
    "explain",
    "final_valid_intervals",
    "find_failing_subsets",
    "find_failure_step",
    "from_pairs",
    "gate_constraints",
    "generate_thermal",
    "intersect",
    "normalize",
    "occupancy_to_start_windows",
    "parse_plan",
    "peak_power_users",
    "place_awake",
    "run_plan",
    "run_scheduler",
    "schedule_activity",
    "serialize_explanation",
    "serialize_plan",
    "serialize_schedule",
    "simulate_soc",
    "subtract",
    "try_place",
    "validate_plan",
]
