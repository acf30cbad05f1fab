"""Battery, peak-power and data-volume profiles over a (partial) schedule.

The battery profile is piecewise linear: draw rates are constant between
event boundaries (activity/heater edges, awake-block edges), so state of
charge moves linearly and is clipped at `soc_max` (excess generation is
discarded; the clip instant becomes an extra breakpoint, possibly at a
fractional time).  Peak power and non-depletable usage are step functions
that change only at integer event times.
"""

from __future__ import annotations

import enum
import math
from bisect import bisect_right
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .intervals import Interval, IntervalSet
from .model import Activity, PlanConfig

WH_PER_WS = 1.0 / 3600.0


class GeneratedKind(str, enum.Enum):
    PREHEAT = "preheat"
    MAINTENANCE = "maintenance"
    AWAKE = "awake"
    WAKEUP = "wakeup"
    SHUTDOWN = "shutdown"


@dataclass(frozen=True)
class GeneratedActivity:
    """Companion task the scheduler creates on behalf of a placed activity."""

    kind: GeneratedKind
    start: int
    end: int
    power: float
    parent: str
    instrument: str | None = None

    @property
    def id(self) -> str:
        if self.instrument is not None:
            return f"{self.kind.value}.{self.instrument}.{self.parent}"
        return f"{self.kind.value}.{self.parent}"

    @property
    def interval(self) -> Interval:
        return Interval(self.start, self.end)


@dataclass(frozen=True)
class PlacedActivity:
    """A committed placement plus the heaters generated for it."""

    activity_id: str
    start: int
    end: int
    generated: tuple[GeneratedActivity, ...] = ()

    @property
    def interval(self) -> Interval:
        return Interval(self.start, self.end)


def awake_generated(
    awake: Sequence[Interval],
    cfg: PlanConfig,
    placed: Sequence[PlacedActivity],
) -> tuple[GeneratedActivity, ...]:
    """Materialize wakeup/awake/shutdown entries for each awake block.

    Blocks are numbered by start order; each is attributed to the
    earliest-starting placed activity it covers.
    """
    out: list[GeneratedActivity] = []
    for i, block in enumerate(sorted(awake, key=lambda b: b.start), start=1):
        parent = ""
        for p in sorted(placed, key=lambda p: (p.start, p.activity_id)):
            if p.start < block.end and block.start < p.end:
                parent = p.activity_id
                break
        wake_end = min(block.start + cfg.wakeup_dur, block.end)
        shut_start = max(block.end - cfg.shutdown_dur, wake_end)
        idle = cfg.awake_idle_power
        if wake_end > block.start:
            out.append(GeneratedActivity(GeneratedKind.WAKEUP, block.start, wake_end, idle, parent or f"block{i}"))
        if shut_start > wake_end:
            out.append(GeneratedActivity(GeneratedKind.AWAKE, wake_end, shut_start, idle, parent or f"block{i}"))
        if block.end > shut_start:
            out.append(GeneratedActivity(GeneratedKind.SHUTDOWN, shut_start, block.end, idle, parent or f"block{i}"))
    return tuple(out)


@dataclass(frozen=True)
class SocProfile:
    """Piecewise-linear battery state of charge in watt-hours.

    Breakpoint times are floats because a clip at `soc_max` can occur at a
    fractional second; all other breakpoints sit on integer event times.
    `clipped_wh` is the generation discarded while the battery was full.
    """

    breakpoints: tuple[tuple[float, float], ...]
    clipped_wh: float = 0.0

    @property
    def minimum(self) -> float:
        return min(v for _, v in self.breakpoints)

    @property
    def final(self) -> float:
        return self.breakpoints[-1][1]

    def value(self, t: float) -> float:
        bps = self.breakpoints
        times = [bt for bt, _ in bps]
        i = bisect_right(times, t) - 1
        if i < 0:
            return bps[0][1]
        if i >= len(bps) - 1:
            return bps[-1][1]
        t0, v0 = bps[i]
        t1, v1 = bps[i + 1]
        if t1 == t0:
            return v1
        return v0 + (v1 - v0) * (t - t0) / (t1 - t0)


@dataclass(frozen=True)
class PowerProfile:
    """Step function of total peak-power draw; levels change at `steps` times."""

    steps: tuple[tuple[int, float], ...]  # (time, level from here on)

    @property
    def maximum(self) -> float:
        if not self.steps:
            return 0.0
        return max(level for _, level in self.steps)

    def at(self, t: int) -> float:
        times = [st for st, _ in self.steps]
        i = bisect_right(times, t) - 1
        if i < 0:
            return 0.0
        return self.steps[i][1]


def _coverage_edges(spans: Iterable[tuple[int, int, float]], bounds: Interval) -> list[int]:
    edges = {bounds.start, bounds.end}
    for s, e, _ in spans:
        if s < bounds.end and e > bounds.start:
            edges.add(max(s, bounds.start))
            edges.add(min(e, bounds.end))
    return sorted(edges)


def _draw_spans(
    placed: Sequence[PlacedActivity],
    activities: Mapping[str, Activity],
) -> list[tuple[int, int, float]]:
    spans: list[tuple[int, int, float]] = []
    for p in placed:
        act = activities[p.activity_id]
        if act.energy_rate:
            spans.append((p.start, p.end, act.energy_rate))
        for g in p.generated:
            if g.power:
                spans.append((g.start, g.end, g.power))
    return spans


def simulate_soc(
    placed: Sequence[PlacedActivity],
    awake: Sequence[Interval],
    cfg: PlanConfig,
    activities: Mapping[str, Activity],
) -> SocProfile:
    """Integrate the battery over the plan.

    Net rate is gen_power minus the sleeping or awake-idle baseline minus
    every concurrent activity and heater draw; the value is clipped at
    soc_max and starts from initial_soc.
    """
    bounds = cfg.plan_bounds
    spans = _draw_spans(placed, activities)
    awake_sorted = sorted(awake, key=lambda b: b.start)
    edges = set(_coverage_edges(spans, bounds))
    for block in awake_sorted:
        edges.add(max(block.start, bounds.start))
        edges.add(min(block.end, bounds.end))
    times = sorted(edges)

    soc = cfg.initial_soc
    clipped = 0.0
    bps: list[tuple[float, float]] = [(float(bounds.start), soc)]
    for t0, t1 in zip(times, times[1:]):
        if t1 <= t0:
            continue
        mid_awake = any(b.start <= t0 and t1 <= b.end for b in awake_sorted)
        draw = cfg.awake_idle_power if mid_awake else cfg.sleep_power
        draw += sum(rate for s, e, rate in spans if s <= t0 and t1 <= e)
        net = cfg.gen_power - draw  # watts
        seg = t1 - t0
        if net > 0 and soc >= cfg.soc_max:
            clipped += net * seg * WH_PER_WS
            bps.append((float(t1), cfg.soc_max))
            soc = cfg.soc_max
            continue
        nxt = soc + net * seg * WH_PER_WS
        if net > 0 and nxt > cfg.soc_max:
            t_clip = t0 + (cfg.soc_max - soc) / (net * WH_PER_WS)
            bps.append((t_clip, cfg.soc_max))
            clipped += net * (t1 - t_clip) * WH_PER_WS
            nxt = cfg.soc_max
        soc = nxt
        bps.append((float(t1), soc))
    return SocProfile(tuple(bps), clipped)


def power_profile(
    placed: Sequence[PlacedActivity],
    awake: Sequence[Interval],
    cfg: PlanConfig,
    activities: Mapping[str, Activity],
) -> PowerProfile:
    """Total instantaneous peak draw of placed and generated activities."""
    bounds = cfg.plan_bounds
    spans: list[tuple[int, int, float]] = []
    for p in placed:
        act = activities[p.activity_id]
        spans.append((p.start, p.end, act.peak_power))
        for g in p.generated:
            spans.append((g.start, g.end, g.power))
    for g in awake_generated(awake, cfg, placed):
        spans.append((g.start, g.end, g.power))
    times = _coverage_edges(spans, bounds)
    steps: list[tuple[int, float]] = []
    for t in times[:-1]:
        level = sum(rate for s, e, rate in spans if s <= t < e)
        if not steps or steps[-1][1] != level:
            steps.append((t, level))
    if not steps:
        steps.append((bounds.start, 0.0))
    return PowerProfile(tuple(steps))


def nondepletable_peaks(
    placed: Sequence[PlacedActivity],
    cfg: PlanConfig,
    activities: Mapping[str, Activity],
) -> dict[str, float]:
    """Maximum concurrent usage of each declared non-depletable resource."""
    peaks: dict[str, float] = {}
    for res in cfg.nondepletable_capacities:
        spans = [
            (p.start, p.end, float(activities[p.activity_id].nondepletable.get(res, 0.0)))
            for p in placed
            if activities[p.activity_id].nondepletable.get(res)
        ]
        worst = 0.0
        for t in {s for s, _, _ in spans}:
            usage = sum(rate for s, e, rate in spans if s <= t < e)
            worst = max(worst, usage)
        peaks[res] = worst
    return peaks


def data_volume_breakpoints(
    placed: Sequence[PlacedActivity],
    cfg: PlanConfig,
    activities: Mapping[str, Activity],
) -> list[tuple[int, float]]:
    """Cumulative onboard data volume (bits) at every event time."""
    bounds = cfg.plan_bounds
    spans = [
        (p.start, p.end, activities[p.activity_id].data_rate)
        for p in placed
        if activities[p.activity_id].data_rate
    ]
    times = _coverage_edges(spans, bounds)
    out: list[tuple[int, float]] = []
    vol = 0.0
    prev = times[0]
    out.append((prev, vol))
    for t in times[1:]:
        rate = sum(r for s, e, r in spans if s <= prev and t <= e)
        vol += rate * (t - prev)
        out.append((t, vol))
        prev = t
    return out


def data_feasible_occupancy(
    new_rate: float,
    new_duration: int,
    placed: Sequence[PlacedActivity],
    cfg: PlanConfig,
    activities: Mapping[str, Activity],
) -> IntervalSet:
    """Times where adding the candidate's full data volume keeps the
    cumulative profile within capacity at every later instant.

    Non-positive rates (and a zero capacity, which disables the check)
    are always feasible because accepted placements never exceed capacity.
    """
    bounds = cfg.plan_bounds
    full = IntervalSet((bounds,))
    if cfg.data_capacity <= 0 or new_rate <= 0:
        return full
    headroom = cfg.data_capacity - new_rate * new_duration
    bps = data_volume_breakpoints(placed, cfg, activities)
    if headroom < 0:
        return IntervalSet(())
    # Walk right to left: find the last instant at which the base profile
    # still exceeds the headroom; feasibility starts just after it.
    last_bad = None  # real-valued supremum of {u : V(u) > headroom}
    for i in range(len(bps) - 1, 0, -1):
        t1, v1 = bps[i]
        t0, v0 = bps[i - 1]
        if v1 > headroom:
            last_bad = float(t1)
            break
        if v0 > headroom:
            # Linear segment descending across the threshold.
            last_bad = t0 + (v0 - headroom) / (v0 - v1) * (t1 - t0)
            break
    if last_bad is None:
        return full
    first_ok = max(bounds.start, math.ceil(last_bad - 1e-9))
    if first_ok >= bounds.end:
        return IntervalSet(())
    return IntervalSet((Interval(first_ok, bounds.end),))
