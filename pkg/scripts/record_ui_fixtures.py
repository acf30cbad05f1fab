"""Record service payloads for the frontend contract tests.

Runs the six scenario plans through the HTTP service in-process and
freezes every payload the UI consumes into frontend/tests/fixtures/.
Re-run after changing the service formats:

    python3 scripts/record_ui_fixtures.py
"""

import json
import pathlib
import sys

from fastapi.testclient import TestClient

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from crosscheck.service import create_app  # noqa: E402

ROOT = pathlib.Path(__file__).resolve().parents[1]
GOLDENS = ROOT / "tests" / "goldens"
OUT = ROOT / "frontend" / "tests" / "fixtures"

SCENARIOS = {
    "fig4a_execution_uhf": {"failed": "sun_survey", "power_t": 4500},
    "fig4b_dependency_two_subsets": {"failed": "arm_survey", "power_t": 7500},
    "fig4c_state_requirement": {"failed": "stow_check", "power_t": 600},
    "fig5a_insufficient_energy": {"failed": "ir_scan", "power_t": 1000},
    "fig5b_peak_power": {"failed": "spectro", "power_t": 4000},
    "fig5c_preheat_operability": {"failed": "cold_sample", "power_t": 1100},
}


def record_scenario(client: TestClient, name: str, spec: dict) -> dict:
    plan = (GOLDENS / f"{name}.plan.json").read_bytes()
    created = client.post("/sessions", content=plan)
    assert created.status_code == 201, created.text
    sid = created.json()["session_id"]
    failed = spec["failed"]
    explanation = client.get(f"/sessions/{sid}/activities/{failed}/explanation").json()
    failure_step = explanation["failure_step"]
    plan_end = json.loads(plan)["config"]["plan_bounds"][1]
    return {
        "plan": json.loads(plan),
        "create": created.json(),
        "schedule": client.get(f"/sessions/{sid}/schedule").json(),
        "step_view": client.get(
            f"/sessions/{sid}/schedule", params={"step": failure_step}
        ).json(),
        "final_step_view": client.get(
            f"/sessions/{sid}/schedule",
            params={"step": len(created.json()["scheduled"]) + len(created.json()["failed"])},
        ).json(),
        "activity": client.get(f"/sessions/{sid}/activities/{failed}").json(),
        "explanation": explanation,
        "energy": client.get(f"/sessions/{sid}/energy", params={"t": plan_end}).json(),
        "power": client.get(
            f"/sessions/{sid}/power", params={"t": spec["power_t"]}
        ).json(),
    }


def record_fig4a_edit(client: TestClient) -> dict:
    plan = (GOLDENS / "fig4a_execution_uhf.plan.json").read_bytes()
    created = client.post("/sessions", content=plan)
    sid = created.json()["session_id"]
    before = created.json()
    patched = client.patch(
        f"/sessions/{sid}/activities/sun_survey",
        content=json.dumps({"revision": 0, "windows": [[4100, 4100, 7000]]}),
    )
    assert patched.status_code == 200, patched.text
    after_view = client.get(f"/sessions/{sid}/schedule", params={"step": 2}).json()
    noop = client.patch(
        f"/sessions/{sid}/activities/sun_survey",
        content=json.dumps({"revision": 1}),
    )
    invalid = client.patch(
        f"/sessions/{sid}/activities/sun_survey",
        content=json.dumps({"windows": [[9000, 9000, 100]]}),
    )
    return {
        "before": before,
        "edit": {"revision": 0, "windows": [[4100, 4100, 7000]]},
        "patch": patched.json(),
        "after_step_view": after_view,
        "noop_patch": noop.json(),
        "invalid_patch": {"status": invalid.status_code, "body": invalid.json()},
    }


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    client = TestClient(create_app())
    for name, spec in SCENARIOS.items():
        payloads = record_scenario(client, name, spec)
        path = OUT / f"{name}.json"
        path.write_text(json.dumps(payloads, indent=2, sort_keys=True) + "\n")
        print(f"wrote {path.relative_to(ROOT)}")
    edit = record_fig4a_edit(client)
    path = OUT / "fig4a_edit.json"
    path.write_text(json.dumps(edit, indent=2, sort_keys=True) + "\n")
    print(f"wrote {path.relative_to(ROOT)}")


if __name__ == "__main__":
    main()
