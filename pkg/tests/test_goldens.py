"""Six desk scenarios reproduce their failure classes byte-for-byte.

Each scenario's `.explain.json` was generated once from an oracle-verified
run and committed; the CLI must keep producing identical bytes.
"""

import json
import pathlib

import pytest

from crosscheck.cli import main

GOLDEN_DIR = pathlib.Path(__file__).parent / "goldens"

SCENARIOS = {
    "fig4a_execution_uhf": {
        "failed": "sun_survey",
        "phase": 1,
        "subsets": [["execution", "uhf_interaction"]],
        "reasons": [],
    },
    "fig4b_dependency_two_subsets": {
        "failed": "arm_survey",
        "phase": 1,
        "subsets": [["execution", "dependency"], ["dependency", "unit_resource"]],
        "reasons": [],
    },
    "fig4c_state_requirement": {
        "failed": "stow_check",
        "phase": 1,
        "subsets": [["state_requirement"]],
        "reasons": [],
    },
    "fig5a_insufficient_energy": {
        "failed": "ir_scan",
        "phase": 2,
        "subsets": [],
        "reasons": ["insufficient_energy"],
    },
    "fig5b_peak_power": {
        "failed": "spectro",
        "phase": 2,
        "subsets": [],
        "reasons": ["peak_power_exceeded"],
    },
    "fig5c_preheat_operability": {
        "failed": "cold_sample",
        "phase": 2,
        "subsets": [],
        "reasons": ["preheat_outside_operability"],
    },
}


@pytest.mark.parametrize("name", sorted(SCENARIOS))
def test_scenario_golden(name, tmp_path):
    expect = SCENARIOS[name]
    plan_path = GOLDEN_DIR / f"{name}.plan.json"
    code = main(["run", str(plan_path), "--out", str(tmp_path)])
    assert code == 2  # failures present, explanations written

    got = (tmp_path / f"{name}.explain.json").read_bytes()
    golden = (GOLDEN_DIR / f"{name}.explain.json").read_bytes()
    assert got == golden, f"{name}: explanation differs from committed golden"

    doc = json.loads(got)
    entry = doc["explanations"][0]
    assert entry["activity"] == expect["failed"]
    assert entry["phase"] == expect["phase"]
    assert entry["failing_subsets"] == expect["subsets"]
    assert entry["reason_set"] == expect["reasons"]
    assert entry["notes"], "every failure carries at least one note"


@pytest.mark.parametrize("name", sorted(SCENARIOS))
def test_scenario_schedule_golden(name, tmp_path):
    plan_path = GOLDEN_DIR / f"{name}.plan.json"
    main(["run", str(plan_path), "--out", str(tmp_path)])
    got = (tmp_path / f"{name}.sched.json").read_bytes()
    golden = (GOLDEN_DIR / f"{name}.sched.json").read_bytes()
    assert got == golden


def test_fig4c_names_the_state_variable():
    doc = json.loads((GOLDEN_DIR / "fig4c_state_requirement.explain.json").read_text())
    entry = doc["explanations"][0]
    conflict = entry["conflicts"][0]["entities"][0]
    assert conflict["name"] == "drill=stowed"
    assert conflict["activities"] == []
    assert "drill=stowed" in entry["notes"][0]


def test_fig5c_note_mentions_operability():
    doc = json.loads((GOLDEN_DIR / "fig5c_preheat_operability.explain.json").read_text())
    entry = doc["explanations"][0]
    assert any("operability window" in note for note in entry["notes"])
