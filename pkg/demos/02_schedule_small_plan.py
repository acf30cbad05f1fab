"""Schedule a small plan built with the Python API and draw the result.

Three activities compete for one arm and a shared power budget; the
scheduler walks them in priority order, generates the awake blocks, and
commits each placement without ever revisiting it.
"""

from crosscheck import Activity, Interval, PlanConfig, Window, run_scheduler

cfg = PlanConfig(
    plan_bounds=Interval(0, 8000),
    initial_soc=900.0,
    soc_max=1000.0,
    min_soc=300.0,
    max_peak_power=600.0,
    min_sleep=120,
    min_awake=60,
    wakeup_dur=60,
    shutdown_dur=60,
    gen_power=140.0,
    awake_idle_power=200.0,
    sleep_power=20.0,
)

activities = [
    Activity(
        id="scoop",
        priority=1,
        duration=900,
        windows=(Window(1000, 1200, 2500),),
        unit_resources=frozenset({"arm"}),
        energy_rate=120.0,
        peak_power=200.0,
    ),
    Activity(
        id="sieve",
        priority=2,
        duration=600,
        windows=(Window(1500, 1500, 4000),),
        unit_resources=frozenset({"arm"}),
        dependencies=frozenset({"scoop"}),
        energy_rate=80.0,
        peak_power=150.0,
    ),
    Activity(
        id="image_tray",
        priority=3,
        duration=400,
        windows=(Window(2000, 2000, 6000),),
        energy_rate=60.0,
        peak_power=120.0,
    ),
]

schedule = run_scheduler(activities, cfg)

WIDTH = 72


def lane(name, spans):
    cells = [" "] * WIDTH
    for s, e in spans:
        a = s * WIDTH // 8000
        b = max(a + 1, e * WIDTH // 8000)
        for i in range(a, min(b, WIDTH)):
            cells[i] = "#"
    print(f"{name:12s}|{''.join(cells)}|")


print("priority-order placements:")
for record in schedule.records:
    print(f"  step {record.step}: {record.activity_id:12s} {record.outcome:10s}"
          f" start={record.start}")

print()
for record in schedule.records:
    if record.placement:
        lane(record.activity_id, [(record.placement.start, record.placement.end)])
lane("awake", [(b.start, b.end) for b in schedule.awake])

soc = schedule.soc_profile()
print(f"\nbattery: start {cfg.initial_soc:.0f} Wh, min {soc.minimum:.1f} Wh, "
      f"final {soc.final:.1f} Wh")
print(f"peak draw: {schedule.power_profile().maximum:.0f} W "
      f"(cap {cfg.max_peak_power:.0f} W)")

# The sieve waited for the scoop: dependency windows start at the parent's end.
scoop = schedule.placement_of("scoop")
sieve = schedule.placement_of("sieve")
assert sieve.start >= scoop.end
