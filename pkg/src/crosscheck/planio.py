"""Durable JSON formats: `.plan.json`, `.sched.json`, `.explain.json`.

All output goes through one canonical writer (sorted keys, two-space
indent, floats fixed at six decimals) so identical in-memory values always
serialize to identical bytes.  Parsing is strict by default: unknown keys
are rejected so typos in constraint names fail loudly; pass
``tolerant=True`` to ignore them.
"""

from __future__ import annotations

import json
import math
from typing import Any, Mapping, Sequence

from .explain import Explanation
from .intervals import Interval, IntervalSet, from_pairs
from .model import (
    UHF_MODES,
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
from .profiles import awake_generated
from .scheduler import OUTCOME_SCHEDULED, Schedule, StepRecord

FORMAT_VERSION = 1

PLAN_SUFFIX = ".plan.json"
SCHEDULE_SUFFIX = ".sched.json"
EXPLAIN_SUFFIX = ".explain.json"


# ---------------------------------------------------------------------------
# Canonical JSON


def _write_value(value: Any, indent: int, out: list[str]) -> None:
    pad = "  " * indent
    if isinstance(value, Mapping):
        if not value:
            out.append("{}")
            return
        out.append("{\n")
        keys = sorted(value)
        for i, key in enumerate(keys):
            if not isinstance(key, str):
                raise TypeError(f"non-string key {key!r}")
            out.append(f'{pad}  {json.dumps(key)}: ')
            _write_value(value[key], indent + 1, out)
            out.append(",\n" if i < len(keys) - 1 else "\n")
        out.append(pad + "}")
    elif isinstance(value, (list, tuple)):
        if not value:
            out.append("[]")
            return
        out.append("[\n")
        for i, item in enumerate(value):
            out.append(pad + "  ")
            _write_value(item, indent + 1, out)
            out.append(",\n" if i < len(value) - 1 else "\n")
        out.append(pad + "]")
    elif isinstance(value, bool):
        out.append("true" if value else "false")
    elif isinstance(value, int):
        out.append(str(value))
    elif isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite number {value!r}")
        out.append(f"{value:.6f}")
    elif isinstance(value, str):
        out.append(json.dumps(value))
    elif value is None:
        out.append("null")
    else:
        raise TypeError(f"cannot serialize {type(value).__name__}")


def canonical_json(doc: Any) -> str:
    """Deterministic rendering: sorted keys, 6-decimal floats, one trailing
    newline."""
    out: list[str] = []
    _write_value(doc, 0, out)
    out.append("\n")
    return "".join(out)


# ---------------------------------------------------------------------------
# Parsing helpers


class _Reader:
    """Walks a parsed JSON object tracking the path and unknown keys."""

    def __init__(self, tolerant: bool):
        self.tolerant = tolerant
        self.errors: list[str] = []

    def error(self, path: str, message: str) -> None:
        self.errors.append(f"{path}: {message}")

    def check_keys(self, obj: Mapping[str, Any], allowed: set[str], path: str) -> None:
        if self.tolerant:
            return
        for key in sorted(set(obj) - allowed):
            self.error(f"{path}/{key}", "unknown field")

    def get_int(self, obj: Mapping, key: str, path: str, default=None) -> int | None:
        value = obj.get(key, default)
        if value is None:
            self.error(f"{path}/{key}", "required integer is missing")
            return None
        if isinstance(value, bool) or not isinstance(value, int):
            self.error(f"{path}/{key}", f"expected integer, got {type(value).__name__}")
            return None
        return value

    def get_num(self, obj: Mapping, key: str, path: str, default=None) -> float | None:
        value = obj.get(key, default)
        if value is None:
            self.error(f"{path}/{key}", "required number is missing")
            return None
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            self.error(f"{path}/{key}", f"expected number, got {type(value).__name__}")
            return None
        return float(value)

    def get_str(self, obj: Mapping, key: str, path: str, default=None) -> str | None:
        value = obj.get(key, default)
        if value is None:
            self.error(f"{path}/{key}", "required string is missing")
            return None
        if not isinstance(value, str):
            self.error(f"{path}/{key}", f"expected string, got {type(value).__name__}")
            return None
        return value


def _parse_interval_pair(value: Any, path: str, r: _Reader) -> Interval | None:
    if (
        not isinstance(value, list)
        or len(value) != 2
        or any(isinstance(v, bool) or not isinstance(v, int) for v in value)
    ):
        r.error(path, "expected [start, end] integer pair")
        return None
    if value[0] >= value[1]:
        r.error(path, f"expected start < end, got [{value[0]}, {value[1]}]")
        return None
    return Interval(value[0], value[1])


def _parse_interval_list(value: Any, path: str, r: _Reader) -> IntervalSet:
    if not isinstance(value, list):
        r.error(path, "expected a list of [start, end] pairs")
        return IntervalSet(())
    pairs = []
    for i, item in enumerate(value):
        iv = _parse_interval_pair(item, f"{path}/{i}", r)
        if iv is not None:
            pairs.append(iv)
    return from_pairs(pairs)


_CONFIG_KEYS = {
    "plan_bounds",
    "initial_soc",
    "soc_max",
    "min_soc",
    "max_peak_power",
    "min_sleep",
    "min_awake",
    "wakeup_dur",
    "shutdown_dur",
    "gen_power",
    "awake_idle_power",
    "sleep_power",
    "data_capacity",
    "initial_states",
    "nondepletable_capacities",
    "thermal",
    "heaters_require_awake",
}


def _parse_thermal(obj: Any, path: str, r: _Reader) -> ThermalSpec | None:
    if not isinstance(obj, dict):
        r.error(path, "expected an object")
        return None
    errors_before = len(r.errors)
    r.check_keys(obj, {"preheat_bins", "operability", "preheat_power", "maintenance_power"}, path)
    bins_raw = obj.get("preheat_bins")
    bins: list[tuple[Interval, int]] = []
    if not isinstance(bins_raw, list) or not bins_raw:
        r.error(f"{path}/preheat_bins", "expected a non-empty list of [start, end, duration]")
    else:
        for i, row in enumerate(bins_raw):
            bpath = f"{path}/preheat_bins/{i}"
            if (
                not isinstance(row, list)
                or len(row) != 3
                or any(isinstance(v, bool) or not isinstance(v, int) for v in row)
            ):
                r.error(bpath, "expected [bin_start, bin_end, preheat_seconds]")
                continue
            if row[0] >= row[1]:
                r.error(bpath, "bin must have start < end")
                continue
            bins.append((Interval(row[0], row[1]), row[2]))
    operability = _parse_interval_list(obj.get("operability", []), f"{path}/operability", r)
    preheat_power = r.get_num(obj, "preheat_power", path, 0.0)
    maintenance_power = r.get_num(obj, "maintenance_power", path, 0.0)
    if len(r.errors) > errors_before:
        return None
    return ThermalSpec(
        preheat_bins=tuple(bins),
        operability=operability,
        preheat_power=preheat_power or 0.0,
        maintenance_power=maintenance_power or 0.0,
    )


def _parse_config(obj: Any, r: _Reader) -> PlanConfig | None:
    path = "/config"
    if not isinstance(obj, dict):
        r.error(path, "expected an object")
        return None
    r.check_keys(obj, _CONFIG_KEYS, path)
    bounds = _parse_interval_pair(obj.get("plan_bounds"), f"{path}/plan_bounds", r)
    numbers = {
        key: r.get_num(obj, key, path)
        for key in (
            "initial_soc",
            "soc_max",
            "min_soc",
            "max_peak_power",
            "gen_power",
            "awake_idle_power",
            "sleep_power",
        )
    }
    ints = {
        key: r.get_int(obj, key, path, 0)
        for key in ("min_sleep", "min_awake", "wakeup_dur", "shutdown_dur")
    }
    data_capacity = r.get_num(obj, "data_capacity", path, 0.0)

    states_raw = obj.get("initial_states", {})
    states: dict[str, str] = {}
    if not isinstance(states_raw, dict):
        r.error(f"{path}/initial_states", "expected an object of variable: value")
    else:
        for var, value in states_raw.items():
            if not isinstance(value, str):
                r.error(f"{path}/initial_states/{var}", "state values must be strings")
            else:
                states[var] = value

    caps_raw = obj.get("nondepletable_capacities", {})
    caps: dict[str, float] = {}
    if not isinstance(caps_raw, dict):
        r.error(f"{path}/nondepletable_capacities", "expected an object of resource: capacity")
    else:
        for res, value in caps_raw.items():
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                r.error(f"{path}/nondepletable_capacities/{res}", "capacity must be a number")
            else:
                caps[res] = float(value)

    thermal_raw = obj.get("thermal", {})
    thermal: dict[str, ThermalSpec] = {}
    if not isinstance(thermal_raw, dict):
        r.error(f"{path}/thermal", "expected an object of instrument: spec")
    else:
        for inst, spec_obj in thermal_raw.items():
            spec = _parse_thermal(spec_obj, f"{path}/thermal/{inst}", r)
            if spec is not None:
                thermal[inst] = spec

    heaters = obj.get("heaters_require_awake", False)
    if not isinstance(heaters, bool):
        r.error(f"{path}/heaters_require_awake", "expected a boolean")
        heaters = False

    if bounds is None or any(v is None for v in numbers.values()) or any(
        v is None for v in ints.values()
    ):
        return None
    return PlanConfig(
        plan_bounds=bounds,
        initial_soc=numbers["initial_soc"],
        soc_max=numbers["soc_max"],
        min_soc=numbers["min_soc"],
        max_peak_power=numbers["max_peak_power"],
        min_sleep=ints["min_sleep"],
        min_awake=ints["min_awake"],
        wakeup_dur=ints["wakeup_dur"],
        shutdown_dur=ints["shutdown_dur"],
        gen_power=numbers["gen_power"],
        awake_idle_power=numbers["awake_idle_power"],
        sleep_power=numbers["sleep_power"],
        data_capacity=data_capacity or 0.0,
        initial_states=states,
        nondepletable_capacities=caps,
        thermal=thermal,
        heaters_require_awake=heaters,
    )


_ACTIVITY_KEYS = {
    "id",
    "priority",
    "duration",
    "windows",
    "unit_resources",
    "energy_rate",
    "data_rate",
    "peak_power",
    "nondepletable",
    "dependencies",
    "state_requirements",
    "state_effects",
    "uhf",
    "uhf_type",
    "thermal",
}


def _parse_str_list(value: Any, path: str, r: _Reader) -> tuple[str, ...]:
    if not isinstance(value, list) or any(not isinstance(v, str) for v in value):
        r.error(path, "expected a list of strings")
        return ()
    return tuple(value)


def _parse_str_map(value: Any, path: str, r: _Reader) -> dict[str, str]:
    if not isinstance(value, dict) or any(not isinstance(v, str) for v in value.values()):
        r.error(path, "expected an object of string: string")
        return {}
    return dict(value)


def _parse_activity(obj: Any, idx: int, r: _Reader) -> Activity | None:
    path = f"/activities/{idx}"
    if not isinstance(obj, dict):
        r.error(path, "expected an object")
        return None
    r.check_keys(obj, _ACTIVITY_KEYS, path)
    act_id = r.get_str(obj, "id", path)
    priority = r.get_int(obj, "priority", path)
    duration = r.get_int(obj, "duration", path)

    windows: list[Window] = []
    windows_raw = obj.get("windows", [])
    if not isinstance(windows_raw, list):
        r.error(f"{path}/windows", "expected a list")
    else:
        for widx, row in enumerate(windows_raw):
            wpath = f"{path}/windows/{widx}"
            if (
                not isinstance(row, list)
                or len(row) not in (2, 3)
                or any(isinstance(v, bool) or not isinstance(v, int) for v in row)
            ):
                r.error(wpath, "expected [start, end] or [start, preferred, end]")
                continue
            if len(row) == 2:
                windows.append(Window(row[0], row[0], row[1]))
            else:
                windows.append(Window(row[0], row[1], row[2]))

    uhf_rules: list[UhfRule] = []
    uhf_raw = obj.get("uhf", [])
    if not isinstance(uhf_raw, list):
        r.error(f"{path}/uhf", "expected a list")
    else:
        for uidx, row in enumerate(uhf_raw):
            upath = f"{path}/uhf/{uidx}"
            if not isinstance(row, list) or len(row) != 2 or any(not isinstance(v, str) for v in row):
                r.error(upath, "expected [uhf_type, mode]")
                continue
            if row[1] not in UHF_MODES:
                r.error(upath, f"unknown mode {row[1]!r} (expected one of {', '.join(UHF_MODES)})")
                continue
            uhf_rules.append(UhfRule(row[0], row[1]))

    uhf_type = obj.get("uhf_type")
    if uhf_type is not None and not isinstance(uhf_type, str):
        r.error(f"{path}/uhf_type", "expected a string or null")
        uhf_type = None

    nondepletable_raw = obj.get("nondepletable", {})
    nondepletable: dict[str, float] = {}
    if not isinstance(nondepletable_raw, dict):
        r.error(f"{path}/nondepletable", "expected an object of resource: amount")
    else:
        for res, value in nondepletable_raw.items():
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                r.error(f"{path}/nondepletable/{res}", "amount must be a number")
            else:
                nondepletable[res] = float(value)

    if act_id is None or priority is None or duration is None:
        return None
    return Activity(
        id=act_id,
        priority=priority,
        duration=duration,
        windows=tuple(windows),
        unit_resources=frozenset(_parse_str_list(obj.get("unit_resources", []), f"{path}/unit_resources", r)),
        energy_rate=r.get_num(obj, "energy_rate", path, 0.0) or 0.0,
        data_rate=r.get_num(obj, "data_rate", path, 0.0) or 0.0,
        peak_power=r.get_num(obj, "peak_power", path, 0.0) or 0.0,
        nondepletable=nondepletable,
        dependencies=frozenset(_parse_str_list(obj.get("dependencies", []), f"{path}/dependencies", r)),
        state_requirements=_parse_str_map(obj.get("state_requirements", {}), f"{path}/state_requirements", r),
        state_effects=_parse_str_map(obj.get("state_effects", {}), f"{path}/state_effects", r),
        uhf_interactions=tuple(uhf_rules),
        uhf_type=uhf_type,
        thermal=_parse_str_list(obj.get("thermal", []), f"{path}/thermal", r),
    )


def parse_plan(data: bytes | str, tolerant: bool = False) -> Plan:
    """Parse and fully validate a plan document.

    Raises :class:`PlanError` carrying every problem found, each prefixed
    with its JSON path.
    """
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise PlanError([f"/: invalid JSON ({exc.msg} at line {exc.lineno})"]) from exc
    r = _Reader(tolerant)
    if not isinstance(doc, dict):
        raise PlanError(["/: expected a JSON object"])
    r.check_keys(doc, {"format_version", "config", "activities"}, "")
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        r.error("/format_version", f"expected {FORMAT_VERSION}, got {version!r}")
    cfg = _parse_config(doc.get("config"), r)
    activities: list[Activity] = []
    acts_raw = doc.get("activities")
    if not isinstance(acts_raw, list):
        r.error("/activities", "expected a list")
    else:
        for idx, obj in enumerate(acts_raw):
            act = _parse_activity(obj, idx, r)
            if act is not None:
                activities.append(act)
    if r.errors or cfg is None:
        raise PlanError(r.errors or ["/config: invalid configuration"])
    plan = Plan(cfg, tuple(activities))
    errors = validate_plan(plan)
    if errors:
        raise PlanError(errors)
    return plan


# ---------------------------------------------------------------------------
# Serialization


def config_doc(cfg: PlanConfig) -> dict:
    return {
        "plan_bounds": cfg.plan_bounds.pair(),
        "initial_soc": float(cfg.initial_soc),
        "soc_max": float(cfg.soc_max),
        "min_soc": float(cfg.min_soc),
        "max_peak_power": float(cfg.max_peak_power),
        "min_sleep": cfg.min_sleep,
        "min_awake": cfg.min_awake,
        "wakeup_dur": cfg.wakeup_dur,
        "shutdown_dur": cfg.shutdown_dur,
        "gen_power": float(cfg.gen_power),
        "awake_idle_power": float(cfg.awake_idle_power),
        "sleep_power": float(cfg.sleep_power),
        "data_capacity": float(cfg.data_capacity),
        "initial_states": dict(cfg.initial_states),
        "nondepletable_capacities": {k: float(v) for k, v in cfg.nondepletable_capacities.items()},
        "thermal": {
            inst: {
                "preheat_bins": [[b.start, b.end, dur] for b, dur in spec.preheat_bins],
                "operability": spec.operability.pairs(),
                "preheat_power": float(spec.preheat_power),
                "maintenance_power": float(spec.maintenance_power),
            }
            for inst, spec in cfg.thermal.items()
        },
        "heaters_require_awake": cfg.heaters_require_awake,
    }


def activity_doc(act: Activity) -> dict:
    return {
        "id": act.id,
        "priority": act.priority,
        "duration": act.duration,
        "windows": [[w.start, w.preferred, w.end] for w in act.windows],
        "unit_resources": sorted(act.unit_resources),
        "energy_rate": float(act.energy_rate),
        "data_rate": float(act.data_rate),
        "peak_power": float(act.peak_power),
        "nondepletable": {k: float(v) for k, v in act.nondepletable.items()},
        "dependencies": sorted(act.dependencies),
        "state_requirements": dict(act.state_requirements),
        "state_effects": dict(act.state_effects),
        "uhf": [[rule.uhf_type, rule.mode] for rule in act.uhf_interactions],
        "uhf_type": act.uhf_type,
        "thermal": list(act.thermal),
    }


def plan_doc(plan: Plan) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "config": config_doc(plan.config),
        "activities": [activity_doc(a) for a in plan.activities],
    }


def serialize_plan(plan: Plan) -> str:
    return canonical_json(plan_doc(plan))


def _reason_doc(reason) -> dict:
    return {"time": reason.time, "reason": reason.reason.value, "detail": reason.detail}


def _step_doc(record: StepRecord) -> dict:
    doc: dict[str, Any] = {
        "step": record.step,
        "activity": record.activity_id,
        "outcome": record.outcome,
    }
    if record.placement is not None:
        doc["start"] = record.placement.start
    if record.reasons:
        doc["reasons"] = sorted({r.reason.value for r in record.reasons})
    return doc


def _placed_doc(schedule: Schedule) -> list[dict]:
    out = []
    for p in schedule.placed:
        out.append(
            {
                "activity": p.activity_id,
                "start": p.start,
                "end": p.end,
                "generated": [
                    {
                        "id": g.id,
                        "kind": g.kind.value,
                        "start": g.start,
                        "end": g.end,
                        "power": float(g.power),
                        "instrument": g.instrument,
                        "parent": g.parent,
                    }
                    for g in p.generated
                ],
            }
        )
    return out


def schedule_doc(schedule: Schedule) -> dict:
    cfg = schedule.config
    soc = schedule.soc_profile()
    power = schedule.power_profile()
    blocks = sorted(schedule.awake, key=lambda b: b.start)
    return {
        "format_version": FORMAT_VERSION,
        "plan_bounds": cfg.plan_bounds.pair(),
        "steps": [_step_doc(r) for r in schedule.records],
        "placed": _placed_doc(schedule),
        "awake": [b.pair() for b in blocks],
        "awake_generated": [
            {
                "kind": g.kind.value,
                "start": g.start,
                "end": g.end,
                "power": float(g.power),
                "parent": g.parent,
            }
            for g in awake_generated(blocks, cfg, schedule.placed)
        ],
        "scheduled": list(schedule.scheduled_ids),
        "failed": list(schedule.failed_ids),
        "soc_profile": [[float(t), float(v)] for t, v in soc.breakpoints],
        "soc_clipped_wh": float(soc.clipped_wh),
        "power_profile": [[t, float(v)] for t, v in power.steps],
    }


def serialize_schedule(schedule: Schedule) -> str:
    return canonical_json(schedule_doc(schedule))


def _vi_doc(valid_intervals: Sequence[tuple[ConstraintKind, IntervalSet]]) -> dict:
    return {kind.value: vi.pairs() for kind, vi in valid_intervals}


def _partial_doc(schedule: Schedule) -> dict:
    """Compact view of a probe's partial schedule for the report."""
    return {
        "placed": [
            {"activity": p.activity_id, "start": p.start, "end": p.end}
            for p in schedule.placed
        ],
        "failed": list(schedule.failed_ids),
        "awake": [b.pair() for b in sorted(schedule.awake, key=lambda b: b.start)],
    }


def explanation_doc(explanation: Explanation) -> dict:
    doc: dict[str, Any] = {
        "activity": explanation.activity_id,
        "phase": explanation.phase,
        "failure_step": explanation.failure_step,
        "gated": {
            "dependencies_kept": list(explanation.gate.kept_dependencies),
            "dependencies_dropped": list(explanation.gate.dropped_dependencies),
            "state_requirements_kept": [list(p) for p in explanation.gate.kept_requirements],
            "state_requirements_dropped": [list(p) for p in explanation.gate.dropped_requirements],
        },
        "valid_intervals": _vi_doc(explanation.valid_intervals),
        "final_intervals": explanation.final_intervals.pairs(),
        "partial_schedule": _partial_doc(explanation.probe_schedule.at_step(
            len(explanation.probe_schedule.records) - 1
        )),
        "notes": list(explanation.notes),
    }
    if explanation.phase == 1:
        assert explanation.failing_subsets is not None and explanation.conflicts is not None
        doc["failing_subsets"] = [
            [k.value for k in subset] for subset in explanation.failing_subsets.subsets
        ]
        doc["conflicts"] = [
            {
                "subset": [k.value for k in subset],
                "entities": [
                    {
                        "kind": ent.kind.value,
                        "name": ent.name,
                        "activities": list(ent.activities),
                    }
                    for ent in entities
                ],
            }
            for subset, entities in explanation.conflicts.per_subset
        ]
        doc["reasons"] = []
        doc["reason_set"] = []
    else:
        doc["failing_subsets"] = []
        doc["conflicts"] = []
        doc["reasons"] = [_reason_doc(r) for r in explanation.reasons]
        doc["reason_set"] = sorted({r.reason.value for r in explanation.reasons})
    return doc


def explanation_report_doc(
    plan: Plan,
    schedule: Schedule,
    explanations: Sequence[Explanation],
) -> dict:
    soc = schedule.soc_profile()
    power = schedule.power_profile()
    return {
        "format_version": FORMAT_VERSION,
        "plan_bounds": plan.config.plan_bounds.pair(),
        "steps": [_step_doc(r) for r in schedule.records],
        "profiles": {
            "soc_min": float(soc.minimum),
            "soc_final": float(soc.final),
            "soc_clipped_wh": float(soc.clipped_wh),
            "peak_power_max": float(power.maximum),
        },
        "explanations": [explanation_doc(e) for e in explanations],
    }


def serialize_explanation(report: dict) -> str:
    return canonical_json(report)


def output_basename(plan_path: str) -> str:
    """`x.plan.json` -> `x`; otherwise strip the last extension."""
    name = plan_path
    if name.endswith(PLAN_SUFFIX):
        return name[: -len(PLAN_SUFFIX)]
    if name.endswith(".json"):
        return name[: -len(".json")]
    return name
