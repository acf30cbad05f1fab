"""Priority-first, non-backtracking activity scheduler.

Each activity is attempted once, in ascending priority-value order, and is
never moved or removed afterwards.  An attempt has two phases:

1. Per-constraint valid start windows are computed against the partial
   schedule and intersected.  An empty intersection fails the activity.
2. Candidate start times inside the final windows are tried in order
   (preferred times first, then event boundaries ascending); a candidate
   is accepted only if the battery stays above the floor, peak power and
   non-depletable capacities are respected, and the wake-sleep and
   heating companions can be generated.  If no candidate is accepted the
   activity fails with every reason observed.

All phase-1 reasoning happens in start-window space: an occupancy set
("the condition holds over [s, e)") is converted with
`occupancy_to_start_windows` so that window intersection is plain set
intersection.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Mapping, Sequence

from .intervals import EMPTY_SET, Interval, IntervalSet, intersect, normalize, subtract
from .model import (
    FORBIDDEN_CONCURRENT,
    REQUIRED_CONCURRENT,
    Activity,
    ConstraintKind,
    Plan,
    PlanConfig,
    PlanError,
    validate_plan,
)
from .profiles import (
    GeneratedActivity,
    GeneratedKind,
    PlacedActivity,
    data_feasible_occupancy,
    nondepletable_peaks,
    power_profile,
    simulate_soc,
)

SOC_EPS = 1e-9
POWER_EPS = 1e-9


class Phase2Reason(str, enum.Enum):
    INSUFFICIENT_ENERGY = "insufficient_energy"
    PEAK_POWER_EXCEEDED = "peak_power_exceeded"
    MIN_SLEEP_VIOLATION = "min_sleep_violation"
    MIN_AWAKE_VIOLATION = "min_awake_violation"
    PREHEAT_OUTSIDE_OPERABILITY = "preheat_outside_operability"
    PREHEAT_OUTSIDE_PLAN_BOUNDS = "preheat_outside_plan_bounds"


@dataclass(frozen=True)
class ReasonAt:
    """One failure reason observed while testing a candidate start time."""

    time: int
    reason: Phase2Reason
    detail: str = ""


OUTCOME_SCHEDULED = "scheduled"
OUTCOME_FAILED_PHASE1 = "failed_phase1"
OUTCOME_FAILED_PHASE2 = "failed_phase2"


@dataclass(frozen=True)
class StepRecord:
    """What happened at one scheduling step."""

    step: int
    activity_id: str
    outcome: str
    valid_intervals: tuple[tuple[ConstraintKind, IntervalSet], ...]
    final_intervals: IntervalSet
    placement: PlacedActivity | None = None
    reasons: tuple[ReasonAt, ...] = ()
    awake_after: tuple[Interval, ...] = ()

    @property
    def start(self) -> int | None:
        return self.placement.start if self.placement else None

    def vi_map(self) -> dict[ConstraintKind, IntervalSet]:
        return dict(self.valid_intervals)


@dataclass(frozen=True)
class Schedule:
    """Immutable result (or snapshot) of a scheduler run.

    A snapshot after step k is simply the same schedule with the record
    list truncated, so explainer probes can share structure freely.
    """

    config: PlanConfig
    activities: tuple[Activity, ...]  # priority order
    records: tuple[StepRecord, ...] = ()

    @cached_property
    def activity_map(self) -> dict[str, Activity]:
        return {a.id: a for a in self.activities}

    @property
    def placed(self) -> tuple[PlacedActivity, ...]:
        return tuple(r.placement for r in self.records if r.placement)

    @property
    def awake(self) -> tuple[Interval, ...]:
        return self.records[-1].awake_after if self.records else ()

    @property
    def scheduled_ids(self) -> tuple[str, ...]:
        return tuple(r.activity_id for r in self.records if r.outcome == OUTCOME_SCHEDULED)

    @property
    def failed_ids(self) -> tuple[str, ...]:
        return tuple(r.activity_id for r in self.records if r.outcome != OUTCOME_SCHEDULED)

    def at_step(self, k: int) -> "Schedule":
        if not 0 <= k <= len(self.records):
            raise IndexError(f"step {k} outside 0..{len(self.records)}")
        return Schedule(self.config, self.activities, self.records[:k])

    def record_for(self, activity_id: str) -> StepRecord:
        for r in self.records:
            if r.activity_id == activity_id:
                return r
        raise KeyError(activity_id)

    def placement_of(self, activity_id: str) -> PlacedActivity | None:
        r = self.record_for(activity_id)
        return r.placement

    def soc_profile(self):
        return simulate_soc(self.placed, self.awake, self.config, self.activity_map)

    def power_profile(self):
        return power_profile(self.placed, self.awake, self.config, self.activity_map)


def empty_schedule(activities: Sequence[Activity], cfg: PlanConfig) -> Schedule:
    ordered = tuple(sorted(activities, key=lambda a: a.priority))
    return Schedule(cfg, ordered)


# ---------------------------------------------------------------------------
# Phase 1: per-constraint valid start windows


def _full_start_windows(duration: int, cfg: PlanConfig) -> IntervalSet:
    return cfg.plan_set().start_windows(duration)


def _execution_windows(act: Activity, cfg: PlanConfig) -> IntervalSet:
    # Window bounds are inclusive start times; clip so the activity fits.
    fit = _full_start_windows(act.duration, cfg)
    raw = normalize(
        Interval(w.start, w.end + 1) for w in act.windows
    )
    return intersect(raw, fit)


def _dependency_occupancy(act: Activity, partial: Schedule) -> IntervalSet:
    latest_end = None
    for dep in sorted(act.dependencies):
        placement = None
        for r in partial.records:
            if r.activity_id == dep and r.placement:
                placement = r.placement
                break
        if placement is None:
            return EMPTY_SET  # unscheduled (failed or absent) parent
        latest_end = placement.end if latest_end is None else max(latest_end, placement.end)
    if latest_end is None:
        return partial.config.plan_set()
    if latest_end >= partial.config.plan_end:
        return EMPTY_SET
    return IntervalSet((Interval(latest_end, partial.config.plan_end),))


def _unit_resource_occupancy(act: Activity, partial: Schedule) -> IntervalSet:
    busy = [
        p.interval
        for p in partial.placed
        if act.unit_resources & partial.activity_map[p.activity_id].unit_resources
    ]
    return subtract(partial.config.plan_set(), normalize(busy))


def _state_timeline(var: str, partial: Schedule) -> list[tuple[int, str]]:
    """Value changes of one state variable: (time, value), first at plan start.

    Effects take hold at the end of the activity that sets them; ties are
    applied in priority order so the lowest-priority setter wins.
    """
    cfg = partial.config
    changes: list[tuple[int, int, str]] = []
    for p in partial.placed:
        act = partial.activity_map[p.activity_id]
        if var in act.state_effects:
            changes.append((p.end, act.priority, act.state_effects[var]))
    changes.sort()
    timeline = [(cfg.plan_start, cfg.initial_states[var])]
    for t, _, value in changes:
        if t < cfg.plan_end:
            timeline.append((t, value))
    return timeline


def _state_requirement_occupancy(act: Activity, partial: Schedule) -> IntervalSet:
    cfg = partial.config
    result = cfg.plan_set()
    for var in sorted(act.state_requirements):
        required = act.state_requirements[var]
        timeline = _state_timeline(var, partial)
        good: list[Interval] = []
        for i, (t, value) in enumerate(timeline):
            end = timeline[i + 1][0] if i + 1 < len(timeline) else cfg.plan_end
            if value == required and t < end:
                good.append(Interval(t, end))
        result = intersect(result, normalize(good))
    return result


def _state_effect_occupancy(act: Activity, partial: Schedule) -> IntervalSet:
    # The activity may not overlap the span of any scheduled activity whose
    # satisfied state requirement its own effect would break.
    cfg = partial.config
    broken: list[Interval] = []
    for p in partial.placed:
        other = partial.activity_map[p.activity_id]
        for var, required in other.state_requirements.items():
            if var in act.state_effects and act.state_effects[var] != required:
                broken.append(p.interval)
    return subtract(cfg.plan_set(), normalize(broken))


def _uhf_occupancy(act: Activity, partial: Schedule) -> IntervalSet:
    cfg = partial.config
    result = cfg.plan_set()
    for rule in act.uhf_interactions:
        passes = normalize(
            p.interval
            for p in partial.placed
            if partial.activity_map[p.activity_id].uhf_type == rule.uhf_type
        )
        if rule.mode == REQUIRED_CONCURRENT:
            result = intersect(result, passes)
        elif rule.mode == FORBIDDEN_CONCURRENT:
            result = intersect(result, subtract(cfg.plan_set(), passes))
        else:
            raise PlanError([f"activity {act.id!r}: unknown uhf mode {rule.mode!r}"])
    return result


def constraint_valid_intervals(
    act: Activity,
    kind: ConstraintKind,
    partial: Schedule,
    cfg: PlanConfig,
) -> IntervalSet:
    """Valid start windows for one constraint kind, within plan bounds.

    Kinds the activity does not carry yield the full plan-bounds start
    windows.
    """
    d = act.duration
    if kind is ConstraintKind.EXECUTION:
        if not act.windows:
            return _full_start_windows(d, cfg)
        return _execution_windows(act, cfg)
    if kind is ConstraintKind.DEPENDENCY:
        if not act.dependencies:
            return _full_start_windows(d, cfg)
        return _dependency_occupancy(act, partial).start_windows(d)
    if kind is ConstraintKind.UNIT_RESOURCE:
        if not act.unit_resources:
            return _full_start_windows(d, cfg)
        return _unit_resource_occupancy(act, partial).start_windows(d)
    if kind is ConstraintKind.STATE_REQUIREMENT:
        if not act.state_requirements:
            return _full_start_windows(d, cfg)
        for var in act.state_requirements:
            if var not in cfg.initial_states:
                raise PlanError([f"activity {act.id!r}: unknown state variable {var!r}"])
        return _state_requirement_occupancy(act, partial).start_windows(d)
    if kind is ConstraintKind.STATE_EFFECT:
        if not act.state_effects:
            return _full_start_windows(d, cfg)
        return _state_effect_occupancy(act, partial).start_windows(d)
    if kind is ConstraintKind.DATA_VOLUME:
        if not act.data_rate:
            return _full_start_windows(d, cfg)
        return intersect(
            data_feasible_occupancy(act.data_rate, d, partial.placed, cfg, partial.activity_map),
            cfg.plan_set(),
        ).start_windows(d)
    if kind is ConstraintKind.UHF_INTERACTION:
        if not act.uhf_interactions:
            return _full_start_windows(d, cfg)
        return _uhf_occupancy(act, partial).start_windows(d)
    raise ValueError(f"unknown constraint kind {kind!r}")


def final_valid_intervals(
    act: Activity,
    partial: Schedule,
    cfg: PlanConfig,
) -> tuple[IntervalSet, dict[ConstraintKind, IntervalSet]]:
    """Intersection of all per-kind start windows plus the per-kind map.

    An empty intersection is a legal result and means the activity fails
    in phase 1.
    """
    vi_map: dict[ConstraintKind, IntervalSet] = {}
    final = _full_start_windows(act.duration, cfg)
    for kind in ConstraintKind:
        vi = constraint_valid_intervals(act, kind, partial, cfg)
        vi_map[kind] = vi
        final = intersect(final, vi)
    return final, vi_map


# ---------------------------------------------------------------------------
# Phase 2: thermal, wake-sleep and plan-wide resource checks


def generate_thermal(
    act: Activity,
    t: int,
    cfg: PlanConfig,
) -> tuple[list[GeneratedActivity], list[ReasonAt]]:
    """Preheat and maintenance companions for a candidate start time.

    Preheat duration is looked up from the time-of-day bin containing the
    activity start; the preheat interval [t - dur, t) must lie inside the
    plan and inside the instrument's operability windows.
    """
    generated: list[GeneratedActivity] = []
    reasons: list[ReasonAt] = []
    for inst in act.thermal:
        spec = cfg.thermal.get(inst)
        if spec is None:
            raise PlanError([f"activity {act.id!r}: unknown instrument {inst!r}"])
        dur = spec.preheat_duration(t)
        pre_start = t - dur
        if pre_start < cfg.plan_start:
            reasons.append(
                ReasonAt(
                    t,
                    Phase2Reason.PREHEAT_OUTSIDE_PLAN_BOUNDS,
                    f"{inst}: warm-up of {dur}s would begin at {pre_start}, before the plan",
                )
            )
            continue
        pre = Interval(pre_start, t)
        if not spec.operability.contains_interval(pre):
            reasons.append(
                ReasonAt(
                    t,
                    Phase2Reason.PREHEAT_OUTSIDE_OPERABILITY,
                    f"{inst}: warm-up [{pre_start}, {t}) falls outside operability windows",
                )
            )
            continue
        generated.append(
            GeneratedActivity(GeneratedKind.PREHEAT, pre_start, t, spec.preheat_power, act.id, inst)
        )
        generated.append(
            GeneratedActivity(
                GeneratedKind.MAINTENANCE, t, t + act.duration, spec.maintenance_power, act.id, inst
            )
        )
    return generated, reasons


def place_awake(
    awake: Sequence[Interval],
    needed: Interval,
    cfg: PlanConfig,
) -> tuple[tuple[Interval, ...] | None, list[ReasonAt]]:
    """Cover `needed` with an awake block, merging with existing blocks.

    The new block is flanked by the wakeup and shutdown durations.  The
    result fails if the block would extend outside the plan, if any sleep
    gap between consecutive blocks lands in (0, min_sleep), or if any
    block is shorter than min_awake.
    """
    t = needed.start
    reasons: list[ReasonAt] = []
    if needed.start < cfg.plan_start or needed.end > cfg.plan_end:
        return None, [
            ReasonAt(t, Phase2Reason.MIN_AWAKE_VIOLATION, "activity extends outside the plan")
        ]
    block = Interval(needed.start - cfg.wakeup_dur, needed.end + cfg.shutdown_dur)
    if block.start < cfg.plan_start or block.end > cfg.plan_end:
        return None, [
            ReasonAt(
                t,
                Phase2Reason.MIN_AWAKE_VIOLATION,
                f"awake block [{block.start}, {block.end}) would extend outside the plan",
            )
        ]
    merged = normalize(list(awake) + [block]).intervals
    for prev, nxt in zip(merged, merged[1:]):
        gap = nxt.start - prev.end
        if 0 < gap < cfg.min_sleep:
            reasons.append(
                ReasonAt(
                    t,
                    Phase2Reason.MIN_SLEEP_VIOLATION,
                    f"sleep gap of {gap}s between awake blocks is shorter than {cfg.min_sleep}s",
                )
            )
    for b in merged:
        if b.length < cfg.min_awake:
            reasons.append(
                ReasonAt(
                    t,
                    Phase2Reason.MIN_AWAKE_VIOLATION,
                    f"awake block of {b.length}s is shorter than {cfg.min_awake}s",
                )
            )
    if reasons:
        return None, reasons
    return merged, []


def try_place(
    act: Activity,
    t: int,
    partial: Schedule,
    cfg: PlanConfig,
) -> tuple[PlacedActivity | None, tuple[Interval, ...] | None, list[ReasonAt]]:
    """Tentatively place the activity at `t` and run the plan-wide checks.

    Returns the placement and updated awake blocks on success, otherwise
    every reason observed at this candidate.
    """
    reasons: list[ReasonAt] = []
    generated, thermal_reasons = generate_thermal(act, t, cfg)
    reasons.extend(thermal_reasons)

    needed = Interval(t, t + act.duration)
    if cfg.heaters_require_awake and generated:
        lo = min([needed.start] + [g.start for g in generated])
        hi = max([needed.end] + [g.end for g in generated])
        needed = Interval(lo, hi)
    new_awake, awake_reasons = place_awake(partial.awake, needed, cfg)
    reasons.extend(awake_reasons)
    if reasons:
        return None, None, reasons

    placement = PlacedActivity(act.id, t, t + act.duration, tuple(generated))
    tentative = partial.placed + (placement,)
    acts = dict(partial.activity_map)
    acts[act.id] = act
    assert new_awake is not None

    soc = simulate_soc(tentative, new_awake, cfg, acts)
    if soc.minimum < cfg.min_soc - SOC_EPS:
        reasons.append(
            ReasonAt(
                t,
                Phase2Reason.INSUFFICIENT_ENERGY,
                f"state of charge would dip to {soc.minimum:.3f} Wh "
                f"(floor {cfg.min_soc:.3f} Wh)",
            )
        )
    power = power_profile(tentative, new_awake, cfg, acts)
    if power.maximum > cfg.max_peak_power + POWER_EPS:
        reasons.append(
            ReasonAt(
                t,
                Phase2Reason.PEAK_POWER_EXCEEDED,
                f"total peak draw would reach {power.maximum:.3f} W "
                f"(cap {cfg.max_peak_power:.3f} W)",
            )
        )
    for res, peak in sorted(nondepletable_peaks(tentative, cfg, acts).items()):
        capacity = cfg.nondepletable_capacities[res]
        if peak > capacity + POWER_EPS:
            reasons.append(
                ReasonAt(
                    t,
                    Phase2Reason.PEAK_POWER_EXCEEDED,
                    f"non-depletable resource {res!r} would reach {peak:g} "
                    f"(capacity {capacity:g})",
                )
            )
    if reasons:
        return None, None, reasons
    return placement, new_awake, []


def candidate_starts(
    act: Activity,
    final: IntervalSet,
    partial: Schedule,
    cfg: PlanConfig,
) -> list[int]:
    """Candidate start times: preferred times first (in window order), then
    every event boundary inside the final windows, ascending."""
    ordered: list[int] = []
    seen: set[int] = set()

    def push(t: int) -> None:
        if t not in seen and final.contains(t):
            seen.add(t)
            ordered.append(t)

    for w in act.windows:
        push(w.preferred)

    events: set[int] = {iv.start for iv in final}
    for p in partial.placed:
        events.add(p.end)
    for block in partial.awake:
        events.add(block.start)
        events.add(block.end)
    soc = simulate_soc(partial.placed, partial.awake, cfg, partial.activity_map)
    for bt, _ in soc.breakpoints:
        events.add(math.ceil(bt - 1e-9))
    for t in sorted(events):
        push(t)
    return ordered


def phase2_sweep(
    act: Activity,
    final: IntervalSet,
    partial: Schedule,
    cfg: PlanConfig,
) -> tuple[PlacedActivity | None, tuple[Interval, ...] | None, list[ReasonAt]]:
    """Try candidates in order; return the first acceptance or all reasons."""
    all_reasons: list[ReasonAt] = []
    for t in candidate_starts(act, final, partial, cfg):
        placement, awake, reasons = try_place(act, t, partial, cfg)
        if placement is not None:
            return placement, awake, all_reasons
        all_reasons.extend(reasons)
    return None, None, all_reasons


def schedule_activity(act: Activity, partial: Schedule, cfg: PlanConfig) -> StepRecord:
    """Run both phases for one activity against the partial schedule."""
    step = len(partial.records) + 1
    final, vi_map = final_valid_intervals(act, partial, cfg)
    vi_items = tuple((k, vi_map[k]) for k in ConstraintKind)
    if final.empty:
        return StepRecord(
            step=step,
            activity_id=act.id,
            outcome=OUTCOME_FAILED_PHASE1,
            valid_intervals=vi_items,
            final_intervals=final,
            awake_after=partial.awake,
        )
    placement, new_awake, reasons = phase2_sweep(act, final, partial, cfg)
    if placement is not None:
        assert new_awake is not None
        return StepRecord(
            step=step,
            activity_id=act.id,
            outcome=OUTCOME_SCHEDULED,
            valid_intervals=vi_items,
            final_intervals=final,
            placement=placement,
            awake_after=new_awake,
        )
    return StepRecord(
        step=step,
        activity_id=act.id,
        outcome=OUTCOME_FAILED_PHASE2,
        valid_intervals=vi_items,
        final_intervals=final,
        reasons=tuple(reasons),
        awake_after=partial.awake,
    )


def run_scheduler(activities: Sequence[Activity], cfg: PlanConfig) -> Schedule:
    """Attempt every activity ascending by priority value; deterministic.

    Failed activities are skipped and never retried within the run.
    """
    errors = validate_plan(Plan(cfg, tuple(activities)))
    if errors:
        raise PlanError(errors)
    schedule = empty_schedule(activities, cfg)
    for act in schedule.activities:
        record = schedule_activity(act, schedule, cfg)
        schedule = Schedule(cfg, schedule.activities, schedule.records + (record,))
    return schedule


def run_plan(plan: Plan) -> Schedule:
    return run_scheduler(plan.activities, plan.config)
