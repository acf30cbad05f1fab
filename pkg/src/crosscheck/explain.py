"""Why did an activity fail to schedule?

Given a failed activity this module localizes the earliest scheduling
step at which it fails, identifies the minimal sets of constraint kinds
whose windows cannot be satisfied together (phase-1 failures) or the
plan-wide reasons observed at every candidate start (phase-2 failures),
extracts the concrete resources/states/activities in conflict, and
renders human-readable failure notes with relaxation guidance.

It also answers "where did the energy go": per-activity energy use up to
a time point and the peak-power users at a time point, both in decreasing
order of use.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from typing import Mapping, Sequence

from .intervals import Interval, IntervalSet, intersect
from .model import Activity, ConstraintKind, Plan, PlanConfig
from .profiles import WH_PER_WS, awake_generated
from .scheduler import (
    OUTCOME_FAILED_PHASE1,
    OUTCOME_SCHEDULED,
    Phase2Reason,
    ReasonAt,
    Schedule,
    StepRecord,
    final_valid_intervals,
    phase2_sweep,
    run_scheduler,
)


@dataclass(frozen=True)
class GateResult:
    """Which of a probe activity's plan-dependent constraints are kept."""

    kept_dependencies: tuple[str, ...]
    dropped_dependencies: tuple[str, ...]
    kept_requirements: tuple[tuple[str, str], ...]
    dropped_requirements: tuple[tuple[str, str], ...]


def gate_constraints(
    act: Activity,
    included: set[str],
    activities: Sequence[Activity],
) -> GateResult:
    """Keep only constraints that the included prefix can possibly satisfy.

    A dependency is kept iff its parent is included.  A state requirement
    is kept iff every higher-priority activity whose effect could satisfy
    it is included; otherwise judging the requirement now would be
    premature.
    """
    kept_deps = tuple(sorted(d for d in act.dependencies if d in included))
    dropped_deps = tuple(sorted(d for d in act.dependencies if d not in included))
    kept_reqs: list[tuple[str, str]] = []
    dropped_reqs: list[tuple[str, str]] = []
    for var in sorted(act.state_requirements):
        value = act.state_requirements[var]
        satisfiers = [
            a.id
            for a in activities
            if a.priority < act.priority and a.state_effects.get(var) == value
        ]
        if all(s in included for s in satisfiers):
            kept_reqs.append((var, value))
        else:
            dropped_reqs.append((var, value))
    return GateResult(kept_deps, dropped_deps, tuple(kept_reqs), tuple(dropped_reqs))


def apply_gating(act: Activity, gate: GateResult) -> Activity:
    return replace(
        act,
        dependencies=frozenset(gate.kept_dependencies),
        state_requirements=dict(gate.kept_requirements),
    )


@dataclass(frozen=True)
class FailureStepResult:
    """Earliest step at which the activity fails, plus the probe evidence."""

    activity_id: str
    step: int
    probe_schedule: Schedule  # full probe run including the failed attempt
    gate: GateResult
    record: StepRecord  # the failed activity's record within the probe

    @property
    def partial_before(self) -> Schedule:
        """Partial schedule the failed activity was attempted against."""
        return self.probe_schedule.at_step(len(self.probe_schedule.records) - 1)


def _probe(
    plan: Plan,
    cfg: PlanConfig,
    failed: Activity,
    k: int,
) -> tuple[Schedule, GateResult]:
    """Schedule the k highest-priority activities plus the gated target."""
    prefix = [a for a in plan.ordered if a.id != failed.id][: max(k, 0)]
    included = {a.id for a in prefix if a.priority < failed.priority}
    gate = gate_constraints(failed, included, plan.ordered)
    probe_acts = prefix + [apply_gating(failed, gate)]
    return run_scheduler(probe_acts, cfg), gate


def probe_fails(plan: Plan, cfg: PlanConfig, failed: Activity, k: int) -> bool:
    schedule, _ = _probe(plan, cfg, failed, k)
    return schedule.record_for(failed.id).outcome != OUTCOME_SCHEDULED


def find_failure_step(plan: Plan, cfg: PlanConfig, failed_id: str) -> FailureStepResult:
    """Binary search for the earliest failing step.

    Probe k schedules the k highest-priority activities (excluding the
    target) and then the target with gated constraints; the search keeps
    the invariant that the earliest failing probe lies in [low, high].
    """
    failed = plan.by_id.get(failed_id)
    if failed is None:
        raise KeyError(failed_id)
    full = run_scheduler(plan.activities, cfg)
    if full.record_for(failed_id).outcome == OUTCOME_SCHEDULED:
        raise ValueError(f"{failed_id!r} is not a failed activity")
    low, high = 1, plan.rank_of(failed_id)
    while low < high:
        mid = (low + high) // 2
        if probe_fails(plan, cfg, failed, mid):
            high = mid
        else:
            low = mid + 1
    schedule, gate = _probe(plan, cfg, failed, low)
    return FailureStepResult(
        activity_id=failed_id,
        step=low,
        probe_schedule=schedule,
        gate=gate,
        record=schedule.record_for(failed_id),
    )


def find_failure_step_linear(plan: Plan, cfg: PlanConfig, failed_id: str) -> int:
    """Reference implementation: scan prefixes from the front."""
    failed = plan.by_id[failed_id]
    top = plan.rank_of(failed_id)
    for k in range(1, top + 1):
        if probe_fails(plan, cfg, failed, k):
            return k
    raise ValueError(f"{failed_id!r} does not fail at any step")


# ---------------------------------------------------------------------------
# Minimal failing constraint subsets


@dataclass(frozen=True)
class FailingSubsets:
    """All empty-intersection subsets of the smallest failing size."""

    subsets: tuple[tuple[ConstraintKind, ...], ...]

    @property
    def size(self) -> int:
        return len(self.subsets[0]) if self.subsets else 0


def find_failing_subsets(
    vi_map: Mapping[ConstraintKind, IntervalSet],
    duration: int,
    plan_bounds: Interval,
) -> FailingSubsets:
    """Iterative deepening over subset size, starting at singletons.

    At each size every combination is intersected (in start-window space);
    the first size producing any empty intersection is returned, which
    makes every reported subset minimal: all strictly smaller combinations
    were already seen to intersect non-trivially.

    Intersections are memoized across sizes; this changes cost, not
    output.
    """
    kinds = [k for k in ConstraintKind if k in vi_map]
    seed = IntervalSet((plan_bounds,)).start_windows(duration)
    full = seed
    for k in kinds:
        full = intersect(full, vi_map[k])
    if not full.empty:
        raise ValueError("not a phase-1 failure: final valid intervals are non-empty")

    memo: dict[tuple[int, ...], IntervalSet] = {(): seed}

    def inter(combo: tuple[int, ...]) -> IntervalSet:
        cached = memo.get(combo)
        if cached is None:
            cached = intersect(inter(combo[:-1]), vi_map[kinds[combo[-1]]])
            memo[combo] = cached
        return cached

    for size in range(1, len(kinds) + 1):
        found = [
            tuple(kinds[i] for i in combo)
            for combo in itertools.combinations(range(len(kinds)), size)
            if inter(combo).empty
        ]
        if found:
            return FailingSubsets(tuple(found))
    raise AssertionError("unreachable: full intersection was empty")


def find_failing_subsets_bruteforce(
    vi_map: Mapping[ConstraintKind, IntervalSet],
    duration: int,
    plan_bounds: Interval,
) -> FailingSubsets:
    """Oracle: enumerate all subsets, keep the empty ones of minimum size."""
    kinds = [k for k in ConstraintKind if k in vi_map]
    seed = IntervalSet((plan_bounds,)).start_windows(duration)
    empties: list[tuple[ConstraintKind, ...]] = []
    for size in range(1, len(kinds) + 1):
        for combo in itertools.combinations(kinds, size):
            acc = seed
            for k in combo:
                acc = intersect(acc, vi_map[k])
            if acc.empty:
                empties.append(combo)
        if empties:
            return FailingSubsets(tuple(empties))
    raise ValueError("no empty-intersection subset exists")


def collect_phase2_reasons(
    act: Activity,
    partial: Schedule,
    cfg: PlanConfig,
) -> list[ReasonAt]:
    """Replay the candidate sweep of a phase-2 failure, keeping every
    candidate's reasons in order."""
    final, _ = final_valid_intervals(act, partial, cfg)
    if final.empty:
        raise ValueError("not a phase-2 failure: final valid intervals are empty")
    placement, _, reasons = phase2_sweep(act, final, partial, cfg)
    if placement is not None:
        raise ValueError(f"{act.id!r} schedules against this partial schedule")
    return reasons


def reason_set(reasons: Sequence[ReasonAt]) -> tuple[Phase2Reason, ...]:
    seen = {r.reason for r in reasons}
    return tuple(r for r in Phase2Reason if r in seen)


# ---------------------------------------------------------------------------
# Conflict details


@dataclass(frozen=True)
class ConflictEntity:
    """One concrete thing in conflict: a resource, state, parent or pass."""

    kind: ConstraintKind
    name: str
    activities: tuple[str, ...]


@dataclass(frozen=True)
class ConflictDetail:
    per_subset: tuple[tuple[tuple[ConstraintKind, ...], tuple[ConflictEntity, ...]], ...]


def _entities_for_kind(
    kind: ConstraintKind,
    act: Activity,
    partial: Schedule,
) -> list[ConflictEntity]:
    out: list[ConflictEntity] = []
    placed_acts = [partial.activity_map[p.activity_id] for p in partial.placed]
    if kind is ConstraintKind.DEPENDENCY:
        for dep in sorted(act.dependencies):
            attempted = any(r.activity_id == dep for r in partial.records)
            out.append(ConflictEntity(kind, dep, (dep,) if attempted else ()))
    elif kind is ConstraintKind.UNIT_RESOURCE:
        for res in sorted(act.unit_resources):
            holders = tuple(sorted(a.id for a in placed_acts if res in a.unit_resources))
            if holders:
                out.append(ConflictEntity(kind, res, holders))
    elif kind is ConstraintKind.STATE_REQUIREMENT:
        for var in sorted(act.state_requirements):
            value = act.state_requirements[var]
            satisfiers = tuple(
                sorted(a.id for a in placed_acts if a.state_effects.get(var) == value)
            )
            out.append(ConflictEntity(kind, f"{var}={value}", satisfiers))
    elif kind is ConstraintKind.STATE_EFFECT:
        for var in sorted(act.state_effects):
            value = act.state_effects[var]
            blocked = tuple(
                sorted(
                    a.id
                    for a in placed_acts
                    if var in a.state_requirements and a.state_requirements[var] != value
                )
            )
            if blocked:
                out.append(ConflictEntity(kind, var, blocked))
    elif kind is ConstraintKind.UHF_INTERACTION:
        for rule in act.uhf_interactions:
            passes = tuple(
                sorted(a.id for a in placed_acts if a.uhf_type == rule.uhf_type)
            )
            out.append(ConflictEntity(kind, rule.uhf_type, passes))
    return out


def conflict_details(
    act: Activity,
    subsets: FailingSubsets,
    partial: Schedule,
) -> ConflictDetail:
    """Name the resources, states, parents and passes behind each subset."""
    per_subset = []
    for subset in subsets.subsets:
        entities: list[ConflictEntity] = []
        for kind in subset:
            entities.extend(_entities_for_kind(kind, act, partial))
        per_subset.append((subset, tuple(entities)))
    return ConflictDetail(tuple(per_subset))


# ---------------------------------------------------------------------------
# Resource attribution


def _consumption_spans(schedule: Schedule) -> list[tuple[str, int, int, float]]:
    """(id, start, end, watts) for everything that draws from the battery."""
    cfg = schedule.config
    spans: list[tuple[str, int, int, float]] = []
    for p in schedule.placed:
        act = schedule.activity_map[p.activity_id]
        spans.append((p.activity_id, p.start, p.end, act.energy_rate))
        for g in p.generated:
            spans.append((g.id, g.start, g.end, g.power))
    blocks = sorted(schedule.awake, key=lambda b: b.start)
    for i, g in enumerate(awake_generated(blocks, cfg, schedule.placed)):
        spans.append((f"{g.kind.value}#{_block_index(blocks, g.start) + 1}", g.start, g.end, g.power))
    cursor = cfg.plan_start
    idx = 1
    for b in blocks:
        if b.start > cursor:
            spans.append((f"sleep#{idx}", cursor, b.start, cfg.sleep_power))
            idx += 1
        cursor = max(cursor, b.end)
    if cursor < cfg.plan_end:
        spans.append((f"sleep#{idx}", cursor, cfg.plan_end, cfg.sleep_power))
    return spans


def _block_index(blocks: Sequence[Interval], t: int) -> int:
    for i, b in enumerate(blocks):
        if b.start <= t < b.end:
            return i
    return 0


def energy_consumers(schedule: Schedule, cfg: PlanConfig, t: int) -> list[tuple[str, float]]:
    """Energy drawn by each consumer in [plan_start, t), descending.

    Awake-block idle draw, heater draw and sleep draw appear as
    attributable entries so the list accounts for every watt-hour
    consumed.  Ties break by id ascending.
    """
    entries: list[tuple[str, float]] = []
    for name, s, e, rate in _consumption_spans(schedule):
        overlap = min(e, t) - max(s, cfg.plan_start)
        if overlap > 0 and rate:
            entries.append((name, rate * overlap * WH_PER_WS))
    entries.sort(key=lambda item: (-item[1], item[0]))
    return entries


def peak_power_users(schedule: Schedule, cfg: PlanConfig, t: int) -> list[tuple[str, float]]:
    """Activities (placed and generated) covering `t` with their peak draw."""
    entries: list[tuple[str, float]] = []
    for p in schedule.placed:
        act = schedule.activity_map[p.activity_id]
        if p.start <= t < p.end:
            entries.append((p.activity_id, act.peak_power))
        for g in p.generated:
            if g.start <= t < g.end:
                entries.append((g.id, g.power))
    blocks = sorted(schedule.awake, key=lambda b: b.start)
    for g in awake_generated(blocks, cfg, schedule.placed):
        if g.start <= t < g.end:
            entries.append((f"{g.kind.value}#{_block_index(blocks, g.start) + 1}", g.power))
    entries.sort(key=lambda item: (-item[1], item[0]))
    return entries


# ---------------------------------------------------------------------------
# Full explanation


@dataclass(frozen=True)
class Explanation:
    activity_id: str
    phase: int  # 1 or 2
    failure_step: int
    gate: GateResult
    valid_intervals: tuple[tuple[ConstraintKind, IntervalSet], ...]
    final_intervals: IntervalSet
    failing_subsets: FailingSubsets | None
    conflicts: ConflictDetail | None
    reasons: tuple[ReasonAt, ...]
    notes: tuple[str, ...]
    probe_schedule: Schedule


_KIND_LABEL = {
    ConstraintKind.EXECUTION: "allowed start windows",
    ConstraintKind.DEPENDENCY: "dependency",
    ConstraintKind.UNIT_RESOURCE: "unit resource",
    ConstraintKind.STATE_REQUIREMENT: "state requirement",
    ConstraintKind.STATE_EFFECT: "state effect",
    ConstraintKind.DATA_VOLUME: "data volume",
    ConstraintKind.UHF_INTERACTION: "UHF interaction",
}


def _subset_note(
    subset: tuple[ConstraintKind, ...],
    entities: tuple[ConflictEntity, ...],
    step: int,
) -> str:
    labels = " and ".join(_KIND_LABEL[k] for k in subset)
    note = f"No start time at step {step} satisfies the {labels} constraint"
    note += "s together." if len(subset) > 1 else "."
    mentions = []
    for ent in entities:
        if ent.activities:
            mentions.append(f"{_KIND_LABEL[ent.kind]} {ent.name!r} involves {', '.join(ent.activities)}")
        else:
            mentions.append(f"{_KIND_LABEL[ent.kind]} {ent.name!r} is satisfied by no earlier activity")
    if mentions:
        note += " In conflict: " + "; ".join(mentions) + "."
    note += " " + _relaxation_hint(subset)
    return note


def _relaxation_hint(subset: tuple[ConstraintKind, ...]) -> str:
    kinds = set(subset)
    if ConstraintKind.STATE_REQUIREMENT in kinds and len(kinds) == 1:
        return (
            "Add an earlier activity that sets the required state, or change "
            "the incoming state of the plan."
        )
    if ConstraintKind.UHF_INTERACTION in kinds:
        return (
            "Widening the allowed start windows (or moving the communication "
            "passes) would create an overlap the rule can accept."
        )
    if ConstraintKind.DEPENDENCY in kinds and ConstraintKind.UNIT_RESOURCE in kinds:
        return (
            "Move the occupying activity off the shared unit resource, or alter "
            "the parent activity so it completes while the resource is free."
        )
    if ConstraintKind.DEPENDENCY in kinds:
        return (
            "Widen this activity's allowed start windows, or alter the parent "
            "activity's constraints so it completes earlier."
        )
    if ConstraintKind.UNIT_RESOURCE in kinds:
        return "Shift this activity's windows clear of the occupying activity, or move that activity."
    if ConstraintKind.DATA_VOLUME in kinds:
        return "Free onboard data capacity earlier (move a downlink forward) or reduce the data produced."
    return "Widen this activity's allowed start windows."


_REASON_NOTE = {
    Phase2Reason.INSUFFICIENT_ENERGY: (
        "Placing the activity would pull the battery below the minimum state "
        "of charge at every candidate start. Use the energy drill-down to find "
        "the largest earlier consumers and shift one of them later, when more "
        "energy is available."
    ),
    Phase2Reason.PEAK_POWER_EXCEEDED: (
        "Total concurrent draw would exceed the peak-power cap at every "
        "candidate start. Use the peak-power drill-down to see what else runs "
        "then, and move one of the overlapping activities."
    ),
    Phase2Reason.MIN_SLEEP_VIOLATION: (
        "The awake block this activity needs would leave a sleep gap shorter "
        "than the minimum sleep time. Move the activity nearer an existing "
        "awake block or further from one."
    ),
    Phase2Reason.MIN_AWAKE_VIOLATION: (
        "The awake block this activity needs cannot be scheduled: it would be "
        "shorter than the minimum awake time or extend outside the plan."
    ),
    Phase2Reason.PREHEAT_OUTSIDE_OPERABILITY: (
        "The instrument warm-up would fall outside its operability window at "
        "every candidate start. Alter the activity's allowed start windows so "
        "the warm-up fits inside the operability window."
    ),
    Phase2Reason.PREHEAT_OUTSIDE_PLAN_BOUNDS: (
        "The instrument warm-up would begin before the plan starts. Allow the "
        "activity to start later so the warm-up fits inside the plan."
    ),
}


def explain(plan: Plan, cfg: PlanConfig, schedule: Schedule, failed_id: str) -> Explanation:
    """Compose the full explanation for one failed activity."""
    record = schedule.record_for(failed_id)
    if record.outcome == OUTCOME_SCHEDULED:
        raise ValueError(f"{failed_id!r} scheduled successfully; nothing to explain")
    fsr = find_failure_step(plan, cfg, failed_id)
    probe_record = fsr.record
    gated = apply_gating(plan.by_id[failed_id], fsr.gate)
    if probe_record.outcome == OUTCOME_FAILED_PHASE1:
        present = gated.present_kinds()
        vi_map = {k: v for k, v in probe_record.vi_map().items() if k in present}
        if not vi_map:
            vi_map = dict(probe_record.vi_map())
        subsets = find_failing_subsets(vi_map, gated.duration, cfg.plan_bounds)
        details = conflict_details(gated, subsets, fsr.partial_before)
        notes = tuple(
            _subset_note(subset, entities, fsr.step)
            for subset, entities in details.per_subset
        )
        return Explanation(
            activity_id=failed_id,
            phase=1,
            failure_step=fsr.step,
            gate=fsr.gate,
            valid_intervals=probe_record.valid_intervals,
            final_intervals=probe_record.final_intervals,
            failing_subsets=subsets,
            conflicts=details,
            reasons=(),
            notes=notes,
            probe_schedule=fsr.probe_schedule,
        )
    reasons = tuple(probe_record.reasons)
    notes = tuple(_REASON_NOTE[r] for r in reason_set(reasons))
    return Explanation(
        activity_id=failed_id,
        phase=2,
        failure_step=fsr.step,
        gate=fsr.gate,
        valid_intervals=probe_record.valid_intervals,
        final_intervals=probe_record.final_intervals,
        failing_subsets=None,
        conflicts=None,
        reasons=reasons,
        notes=notes,
        probe_schedule=fsr.probe_schedule,
    )
