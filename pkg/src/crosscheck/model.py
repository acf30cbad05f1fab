"""Plan domain types: activities, constraints, plan configuration, validation.

Values are immutable after construction and safe to share across threads.
Validation collects every problem it can find as ``path: message`` strings
(paths follow the JSON document layout) instead of stopping at the first.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Mapping

from .intervals import Interval, IntervalSet

SECONDS_PER_DAY = 86400


class ConstraintKind(str, enum.Enum):
    EXECUTION = "execution"
    DEPENDENCY = "dependency"
    UNIT_RESOURCE = "unit_resource"
    STATE_REQUIREMENT = "state_requirement"
    STATE_EFFECT = "state_effect"
    DATA_VOLUME = "data_volume"
    UHF_INTERACTION = "uhf_interaction"


KIND_ORDER: tuple[ConstraintKind, ...] = tuple(ConstraintKind)

REQUIRED_CONCURRENT = "required_concurrent"
FORBIDDEN_CONCURRENT = "forbidden_concurrent"
UHF_MODES = (REQUIRED_CONCURRENT, FORBIDDEN_CONCURRENT)


@dataclass(frozen=True)
class Window:
    """Allowed start-time window [start, end] with a preferred start.

    A missing preferred start defaults to the window start.
    """

    start: int
    preferred: int
    end: int


@dataclass(frozen=True)
class UhfRule:
    """Concurrency rule against communication activities of one type."""

    uhf_type: str
    mode: str  # required_concurrent | forbidden_concurrent


@dataclass(frozen=True)
class Activity:
    """One schedulable task with its full constraint set.

    Rates are averages over the execution interval; `peak_power` is the
    maximum instantaneous draw.  `data_rate` may be negative (downlinks
    free capacity).  `thermal` lists instruments that need a warm-up
    before the activity and maintained heating during it.
    """

    id: str
    priority: int
    duration: int
    windows: tuple[Window, ...] = ()
    unit_resources: frozenset[str] = frozenset()
    energy_rate: float = 0.0
    data_rate: float = 0.0
    peak_power: float = 0.0
    nondepletable: Mapping[str, float] = field(default_factory=dict)
    dependencies: frozenset[str] = frozenset()
    state_requirements: Mapping[str, str] = field(default_factory=dict)
    state_effects: Mapping[str, str] = field(default_factory=dict)
    uhf_interactions: tuple[UhfRule, ...] = ()
    uhf_type: str | None = None
    thermal: tuple[str, ...] = ()

    def present_kinds(self) -> tuple[ConstraintKind, ...]:
        """Constraint kinds this activity actually carries."""
        present = []
        if self.windows:
            present.append(ConstraintKind.EXECUTION)
        if self.dependencies:
            present.append(ConstraintKind.DEPENDENCY)
        if self.unit_resources:
            present.append(ConstraintKind.UNIT_RESOURCE)
        if self.state_requirements:
            present.append(ConstraintKind.STATE_REQUIREMENT)
        if self.state_effects:
            present.append(ConstraintKind.STATE_EFFECT)
        if self.data_rate:
            present.append(ConstraintKind.DATA_VOLUME)
        if self.uhf_interactions:
            present.append(ConstraintKind.UHF_INTERACTION)
        return tuple(present)


@dataclass(frozen=True)
class ThermalSpec:
    """Heating model for one instrument.

    `preheat_bins` maps time-of-day (second within a 24h cycle, relative
    to plan epoch) to warm-up duration; the bins must partition the day.
    The warm-up must fit inside `operability`, expressed in absolute plan
    time.
    """

    preheat_bins: tuple[tuple[Interval, int], ...]
    operability: IntervalSet
    preheat_power: float = 0.0
    maintenance_power: float = 0.0

    def preheat_duration(self, t: int) -> int:
        tod = t % SECONDS_PER_DAY
        for bin_iv, dur in self.preheat_bins:
            if bin_iv.contains(tod):
                return dur
        raise ValueError(f"time of day {tod} not covered by preheat bins")


@dataclass(frozen=True)
class PlanConfig:
    """Plan-wide bounds, battery/power model, wake-sleep and heating rules."""

    plan_bounds: Interval
    initial_soc: float  # watt-hours
    soc_max: float
    min_soc: float
    max_peak_power: float  # watts
    min_sleep: int  # seconds
    min_awake: int
    wakeup_dur: int
    shutdown_dur: int
    gen_power: float  # constant source, watts
    awake_idle_power: float
    sleep_power: float
    data_capacity: float = 0.0  # bits; 0 disables the data-volume constraint
    initial_states: Mapping[str, str] = field(default_factory=dict)
    nondepletable_capacities: Mapping[str, float] = field(default_factory=dict)
    thermal: Mapping[str, ThermalSpec] = field(default_factory=dict)
    heaters_require_awake: bool = False

    @property
    def plan_start(self) -> int:
        return self.plan_bounds.start

    @property
    def plan_end(self) -> int:
        return self.plan_bounds.end

    def plan_set(self) -> IntervalSet:
        return IntervalSet((self.plan_bounds,))


@dataclass(frozen=True)
class Plan:
    """A validated plan: configuration plus the activity list."""

    config: PlanConfig
    activities: tuple[Activity, ...]

    @cached_property
    def by_id(self) -> dict[str, Activity]:
        return {a.id: a for a in self.activities}

    @cached_property
    def ordered(self) -> tuple[Activity, ...]:
        """Activities ascending by priority value (highest priority first)."""
        return tuple(sorted(self.activities, key=lambda a: a.priority))

    def rank_of(self, activity_id: str) -> int:
        """1-based scheduling step index of an activity."""
        for i, act in enumerate(self.ordered, start=1):
            if act.id == activity_id:
                return i
        raise KeyError(activity_id)

    def with_activities(self, activities: tuple[Activity, ...]) -> "Plan":
        return replace(self, activities=activities)


class PlanError(ValueError):
    """Validation failure; `errors` holds every `path: message` found."""

    def __init__(self, errors: list[str]):
        super().__init__("; ".join(errors))
        self.errors = errors


def validate_config(cfg: PlanConfig, errors: list[str], path: str = "/config") -> None:
    b = cfg.plan_bounds
    if b.start < 0:
        errors.append(f"{path}/plan_bounds: plan must start at or after time 0")
    if cfg.awake_idle_power <= cfg.gen_power:
        errors.append(f"{path}/awake_idle_power: must exceed gen_power")
    if cfg.gen_power <= cfg.sleep_power:
        errors.append(f"{path}/gen_power: must exceed sleep_power")
    if not (cfg.min_soc < cfg.initial_soc <= cfg.soc_max):
        errors.append(f"{path}/initial_soc: require min_soc < initial_soc <= soc_max")
    for name, value in (
        ("min_sleep", cfg.min_sleep),
        ("min_awake", cfg.min_awake),
        ("wakeup_dur", cfg.wakeup_dur),
        ("shutdown_dur", cfg.shutdown_dur),
    ):
        if value < 0:
            errors.append(f"{path}/{name}: must be non-negative")
    if cfg.data_capacity < 0:
        errors.append(f"{path}/data_capacity: must be non-negative")
    for inst, spec in sorted(cfg.thermal.items()):
        tpath = f"{path}/thermal/{inst}"
        cursor = 0
        for bin_iv, dur in spec.preheat_bins:
            if bin_iv.start != cursor:
                errors.append(f"{tpath}/preheat_bins: bins must partition the 24h cycle")
                break
            if dur <= 0:
                errors.append(f"{tpath}/preheat_bins: preheat duration must be positive")
                break
            cursor = bin_iv.end
        else:
            if cursor != SECONDS_PER_DAY:
                errors.append(f"{tpath}/preheat_bins: bins must cover the full 24h cycle")


def validate_plan(plan: Plan) -> list[str]:
    """Every problem found, as `path: message`; empty list means valid."""
    errors: list[str] = []
    cfg = plan.config
    validate_config(cfg, errors)

    seen_ids: set[str] = set()
    seen_priorities: dict[int, str] = {}
    for idx, act in enumerate(plan.activities):
        apath = f"/activities/{idx}"
        if act.id in seen_ids:
            errors.append(f"{apath}/id: duplicate activity id {act.id!r}")
        seen_ids.add(act.id)
        if act.priority <= 0:
            errors.append(f"{apath}/priority: must be a positive integer")
        elif act.priority in seen_priorities:
            errors.append(
                f"{apath}/priority: duplicate priority {act.priority} "
                f"(also used by {seen_priorities[act.priority]!r})"
            )
        else:
            seen_priorities[act.priority] = act.id
        if act.duration <= 0:
            errors.append(f"{apath}/duration: must be positive")
        elif act.duration > cfg.plan_bounds.length:
            errors.append(f"{apath}/duration: longer than the plan itself")
        for widx, win in enumerate(act.windows):
            wpath = f"{apath}/windows/{widx}"
            if not (win.start <= win.preferred <= win.end):
                errors.append(f"{wpath}: require start <= preferred <= end")
            if win.start < 0 or win.end > cfg.plan_end:
                errors.append(f"{wpath}: window falls outside [0, plan_end]")
        for rule_idx, rule in enumerate(act.uhf_interactions):
            if rule.mode not in UHF_MODES:
                errors.append(
                    f"{apath}/uhf/{rule_idx}: unknown mode {rule.mode!r} "
                    f"(expected one of {', '.join(UHF_MODES)})"
                )
        for var in sorted(set(act.state_requirements) | set(act.state_effects)):
            if var not in cfg.initial_states:
                errors.append(
                    f"{apath}: unknown state variable {var!r} "
                    "(declare it in config.initial_states)"
                )
        for res in sorted(act.nondepletable):
            if res not in cfg.nondepletable_capacities:
                errors.append(
                    f"{apath}/nondepletable: unknown resource {res!r} "
                    "(declare it in config.nondepletable_capacities)"
                )
        for inst in act.thermal:
            if inst not in cfg.thermal:
                errors.append(f"{apath}/thermal: unknown instrument {inst!r}")

    by_id = {a.id: a for a in plan.activities}
    for idx, act in enumerate(plan.activities):
        apath = f"/activities/{idx}"
        for dep in sorted(act.dependencies):
            parent = by_id.get(dep)
            if parent is None:
                errors.append(f"{apath}/dependencies: unknown activity id {dep!r}")
            elif parent.priority >= act.priority:
                errors.append(
                    f"{apath}/dependencies: {dep!r} must have higher scheduling "
                    f"priority (smaller value) than {act.id!r}"
                )
    return errors


def check_plan(plan: Plan) -> Plan:
    errors = validate_plan(plan)
    if errors:
        raise PlanError(errors)
    return plan
