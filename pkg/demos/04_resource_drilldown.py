"""Where did the energy go?  Who is drawing peak power right now?

After a failure like "insufficient energy", the useful next question is
which earlier activities consumed the margin.  This drills into the desk
plan's profiles the same way the timeline UI does: cumulative energy
users up to a chosen time, and instantaneous peak-power users at it.
"""

import pathlib

from crosscheck import energy_consumers, parse_plan, peak_power_users, run_scheduler

plan_path = pathlib.Path(__file__).parent / "plans" / "desk.plan.json"
plan = parse_plan(plan_path.read_bytes())
cfg = plan.config
schedule = run_scheduler(plan.activities, cfg)

t = 9000  # mid-sol, after the drill has run
print(f"energy consumed in [0, {t}), largest first:")
for name, wh in energy_consumers(schedule, cfg, t):
    print(f"  {name:28s} {wh:8.2f} Wh")

total = sum(wh for _, wh in energy_consumers(schedule, cfg, t))
gen = cfg.gen_power * t / 3600.0
print(f"  {'(total drawn)':28s} {total:8.2f} Wh   vs {gen:.2f} Wh generated so far")

t2 = 8500  # during the drill's maintenance heating
print(f"\npeak-power users at t={t2}:")
for name, watts in peak_power_users(schedule, cfg, t2):
    print(f"  {name:28s} {watts:8.1f} W")

t3 = 10500  # everything asleep
print(f"\npeak-power users at t={t3}: {peak_power_users(schedule, cfg, t3) or 'none (asleep)'}")
