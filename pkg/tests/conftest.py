"""Shared builders: a permissive base config, activity shorthand, and the
randomized plan generator used by the invariant and failure-step suites."""

import random

import pytest

from crosscheck.intervals import Interval, from_pairs
from crosscheck.model import Activity, Plan, PlanConfig, ThermalSpec, UhfRule, Window


def make_config(**overrides) -> PlanConfig:
    """A roomy config: energy and power rarely bind unless a test tightens
    them."""
    defaults = dict(
        plan_bounds=Interval(0, 10000),
        initial_soc=1000.0,
        soc_max=1200.0,
        min_soc=100.0,
        max_peak_power=1000.0,
        min_sleep=60,
        min_awake=60,
        wakeup_dur=60,
        shutdown_dur=60,
        gen_power=100.0,
        awake_idle_power=300.0,
        sleep_power=20.0,
        data_capacity=0.0,
        initial_states={},
        nondepletable_capacities={},
        thermal={},
    )
    defaults.update(overrides)
    return PlanConfig(**defaults)


def make_activity(act_id, priority, duration, windows=(), **overrides) -> Activity:
    wins = tuple(
        Window(w[0], w[1], w[2]) if len(w) == 3 else Window(w[0], w[0], w[1])
        for w in windows
    )
    fields = dict(id=act_id, priority=priority, duration=duration, windows=wins)
    if "unit_resources" in overrides:
        overrides["unit_resources"] = frozenset(overrides["unit_resources"])
    if "dependencies" in overrides:
        overrides["dependencies"] = frozenset(overrides["dependencies"])
    if "uhf" in overrides:
        overrides["uhf_interactions"] = tuple(
            UhfRule(t, m) for t, m in overrides.pop("uhf")
        )
    fields.update(overrides)
    return Activity(**fields)


def drill_thermal(preheat=600, operability=((0, 10000),), preheat_power=30.0,
                  maintenance_power=10.0) -> ThermalSpec:
    return ThermalSpec(
        preheat_bins=((Interval(0, 86400), preheat),),
        operability=from_pairs(operability),
        preheat_power=preheat_power,
        maintenance_power=maintenance_power,
    )


@pytest.fixture
def base_config():
    return make_config()


def make_plan(cfg, *activities) -> Plan:
    return Plan(cfg, tuple(activities))


def random_plan(seed: int, max_activities: int = 20, monotone: bool = False) -> Plan:
    """A valid random plan with contention: shared unit resources, tight
    windows, dependencies, gated state requirements, forbidden-concurrency
    rules, heaters and occasional data pressure.

    Communication passes only carry `uhf_type`; rules referencing them are
    always forbidden_concurrent (a required-concurrency rule fails every
    prefix that lacks the pass, which pins the failure step at 1).

    With `monotone=True` the plan avoids the three mechanisms where a
    longer prefix can rescue a failing activity (an awake block filling a
    too-short sleep gap, a downlink freeing data capacity, and a new event
    boundary giving a heater a start whose warm-up fits operability), so
    probe outcomes are monotone and the failure-step binary search matches
    a linear scan.
    """
    rng = random.Random(seed)
    horizon = rng.choice([8000, 12000, 16000])
    wakeup = rng.choice([0, 60])
    cfg = make_config(
        plan_bounds=Interval(0, horizon),
        initial_soc=rng.choice([500.0, 800.0, 1000.0]),
        soc_max=1200.0,
        min_soc=rng.choice([100.0, 300.0]),
        max_peak_power=rng.choice([500.0, 800.0]),
        min_sleep=0 if monotone else rng.choice([0, 120, 300]),
        min_awake=rng.choice([0, 60]),
        wakeup_dur=wakeup,
        shutdown_dur=wakeup,
        gen_power=140.0,
        awake_idle_power=200.0,
        sleep_power=20.0,
        data_capacity=rng.choice([0.0, 400000.0]),
        initial_states={"mode": "idle", "arm": "stowed"},
        nondepletable_capacities={"engines": 2.0},
        thermal={
            "drill": ThermalSpec(
                preheat_bins=((Interval(0, 86400), rng.choice([300, 600])),),
                operability=from_pairs([(1000, horizon - 1000)]),
                preheat_power=30.0,
                maintenance_power=10.0,
            )
        },
    )
    n = rng.randrange(4, max_activities + 1)
    resources = ["arm", "mast", "mobility"]
    state_values = {"mode": ["idle", "science", "comm"], "arm": ["stowed", "deployed"]}
    activities = []
    for i in range(1, n + 1):
        aid = f"act{i:02d}"
        duration = rng.randrange(200, 1500)
        lo = wakeup + 10
        hi = horizon - duration - wakeup - 10
        ws = rng.randrange(lo, max(lo + 1, hi - 1))
        we = min(ws + rng.randrange(0, 3000), hi)
        preferred = rng.randrange(ws, we + 1) if rng.random() < 0.4 else ws
        data_rates = [0, 0, 0, 150, 400] if monotone else [0, 0, 0, 150, 400, -300]
        fields: dict = {
            "energy_rate": float(rng.choice([0, 30, 80, 150, 250])),
            "peak_power": float(rng.choice([0, 50, 150, 300])),
            "data_rate": float(rng.choice(data_rates)),
        }
        if rng.random() < 0.45:
            fields["unit_resources"] = {rng.choice(resources)}
        if i > 1 and rng.random() < 0.3:
            fields["dependencies"] = {f"act{rng.randrange(1, i):02d}"}
        if rng.random() < 0.25:
            var = rng.choice(list(state_values))
            fields["state_requirements"] = {var: rng.choice(state_values[var])}
        if rng.random() < 0.3:
            var = rng.choice(list(state_values))
            fields["state_effects"] = {var: rng.choice(state_values[var])}
        if rng.random() < 0.15:
            fields["uhf_type"] = "downlink"
        elif rng.random() < 0.2:
            fields["uhf"] = [("downlink", "forbidden_concurrent")]
        if rng.random() < 0.15 and not monotone:
            fields["thermal"] = ("drill",)
        if rng.random() < 0.2:
            fields["nondepletable"] = {"engines": 1}
        activities.append(
            make_activity(aid, i, duration, [(ws, preferred, we)], **fields)
        )
    return Plan(cfg, tuple(activities))
