"""Explain every failure in the bundled desk plan.

The desk plan has twelve activities; two cannot be scheduled.  For each
failure this walks the full analysis: earliest failing step, the minimal
constraint sets (or plan-wide reasons), the concrete entities in
conflict, and the rendered notes a planner would read.
"""

import pathlib

from crosscheck import explain, parse_plan, run_scheduler

plan_path = pathlib.Path(__file__).parent / "plans" / "desk.plan.json"
plan = parse_plan(plan_path.read_bytes())
schedule = run_scheduler(plan.activities, plan.config)

print(f"{len(schedule.scheduled_ids)} scheduled, {len(schedule.failed_ids)} failed\n")

for failed_id in schedule.failed_ids:
    result = explain(plan, plan.config, schedule, failed_id)
    print(f"=== {failed_id} (phase {result.phase}, earliest failure step "
          f"{result.failure_step}) ===")
    if result.phase == 1:
        for subset, entities in result.conflicts.per_subset:
            kinds = " + ".join(k.value for k in subset)
            print(f"  unsatisfiable together: {kinds}")
            for ent in entities:
                who = ", ".join(ent.activities) if ent.activities else "nobody"
                print(f"    {ent.kind.value} {ent.name!r} involving {who}")
    else:
        seen = set()
        for r in result.reasons:
            if r.reason not in seen:
                seen.add(r.reason)
                print(f"  {r.reason.value} (first at t={r.time}): {r.detail}")
    for note in result.notes:
        print(f"  note: {note}")
    print()
