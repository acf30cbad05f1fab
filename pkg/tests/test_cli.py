"""CLI: exit codes, output files, step dump, explain subcommand."""

import json
import pathlib
import shutil

import pytest

from crosscheck.cli import main

DATA = pathlib.Path(__file__).parent / "data"
GOLDENS = pathlib.Path(__file__).parent / "goldens"


@pytest.fixture
def desk_plan(tmp_path):
    dst = tmp_path / "desk.plan.json"
    shutil.copy(DATA / "desk.plan.json", dst)
    return dst


def fully_schedulable_plan(tmp_path):
    doc = {
        "format_version": 1,
        "config": {
            "plan_bounds": [0, 10000],
            "initial_soc": 1000.0,
            "soc_max": 1200.0,
            "min_soc": 100.0,
            "max_peak_power": 1000.0,
            "gen_power": 100.0,
            "awake_idle_power": 300.0,
            "sleep_power": 20.0,
            "wakeup_dur": 60,
            "shutdown_dur": 60,
        },
        "activities": [
            {"id": "a", "priority": 1, "duration": 300, "windows": [[500, 500, 900]]},
            {"id": "b", "priority": 2, "duration": 300, "windows": [[4000, 4000, 4500]]},
        ],
    }
    path = tmp_path / "ok.plan.json"
    path.write_text(json.dumps(doc))
    return path


def test_run_exit_zero_when_all_scheduled(tmp_path, capsys):
    path = fully_schedulable_plan(tmp_path)
    assert main(["run", str(path)]) == 0
    out = capsys.readouterr().out
    assert "all 2 activities scheduled" in out
    assert (tmp_path / "ok.sched.json").exists()
    assert (tmp_path / "ok.explain.json").exists()
    report = json.loads((tmp_path / "ok.explain.json").read_text())
    assert report["explanations"] == []


def test_run_exit_two_on_failures(desk_plan):
    assert main(["run", str(desk_plan)]) == 2
    report = json.loads(desk_plan.with_name("desk.explain.json").read_text())
    assert {e["activity"] for e in report["explanations"]} == {
        "hi_res_mosaic",
        "night_ir_scan",
    }


def test_run_exit_one_on_missing_file(tmp_path, capsys):
    assert main(["run", str(tmp_path / "nope.plan.json")]) == 1
    assert "cannot read" in capsys.readouterr().err


def test_run_exit_one_on_invalid_plan(tmp_path, capsys):
    path = tmp_path / "bad.plan.json"
    path.write_text('{"format_version": 1, "config": {}, "activities": []}')
    assert main(["run", str(path)]) == 1
    assert "/config" in capsys.readouterr().err


def test_run_activity_filter(desk_plan):
    assert main(["run", str(desk_plan), "--activity", "hi_res_mosaic"]) == 2
    report = json.loads(desk_plan.with_name("desk.explain.json").read_text())
    assert [e["activity"] for e in report["explanations"]] == ["hi_res_mosaic"]


def test_run_step_dump(desk_plan, capsys):
    assert main(["run", str(desk_plan), "--step", "3"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert len(doc["steps"]) == 3
    assert doc["scheduled"] == ["wake_checkout", "uhf_pass_am", "pano_imaging"]


def test_run_step_out_of_range(desk_plan, capsys):
    assert main(["run", str(desk_plan), "--step", "99"]) == 1


def test_explain_prints_entry(desk_plan, capsys):
    assert main(["explain", str(desk_plan), "--activity", "hi_res_mosaic"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["activity"] == "hi_res_mosaic"
    assert doc["failing_subsets"] == [["execution", "unit_resource"]]


def test_explain_scheduled_activity_errors(desk_plan, capsys):
    assert main(["explain", str(desk_plan), "--activity", "wake_checkout"]) == 1
    assert "scheduled successfully" in capsys.readouterr().err


def test_explain_unknown_activity_errors(desk_plan, capsys):
    assert main(["explain", str(desk_plan), "--activity", "ghost"]) == 1
    assert "unknown activity" in capsys.readouterr().err


def test_run_twice_byte_identical(desk_plan, tmp_path):
    out1 = tmp_path / "r1"
    out2 = tmp_path / "r2"
    main(["run", str(desk_plan), "--out", str(out1)])
    main(["run", str(desk_plan), "--out", str(out2)])
    assert (out1 / "desk.sched.json").read_bytes() == (out2 / "desk.sched.json").read_bytes()
    assert (out1 / "desk.explain.json").read_bytes() == (out2 / "desk.explain.json").read_bytes()
