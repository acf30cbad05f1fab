"""Command-line entry points.

    crosscheck run <plan> [--out DIR] [--activity ID] [--step K]
    crosscheck explain <plan> --activity <id>
    crosscheck serve [--host H] [--port P] [--persist DIR] [--ui DIR]

`run` writes `<stem>.sched.json` and `<stem>.explain.json` beside the
input (or under --out) and exits 0 if everything scheduled, 2 if any
activity failed (explanations are still written), 1 on input errors.
Set CROSSCHECK_LOG=debug|info|warning to control verbosity.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

from .explain import explain
from .model import PlanError
from .planio import (
    EXPLAIN_SUFFIX,
    SCHEDULE_SUFFIX,
    canonical_json,
    explanation_doc,
    explanation_report_doc,
    output_basename,
    parse_plan,
    schedule_doc,
    serialize_explanation,
    serialize_schedule,
)
from .scheduler import run_scheduler

log = logging.getLogger("crosscheck")


def _setup_logging() -> None:
    level = os.environ.get("CROSSCHECK_LOG", "warning").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")


def _load_plan(path: str):
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        print(f"error: cannot read {path}: {exc.strerror}", file=sys.stderr)
        return None
    try:
        return parse_plan(data)
    except PlanError as exc:
        for err in exc.errors:
            print(f"error: {err}", file=sys.stderr)
        return None


def cmd_run(args: argparse.Namespace) -> int:
    plan = _load_plan(args.plan)
    if plan is None:
        return 1
    schedule = run_scheduler(plan.activities, plan.config)

    if args.step is not None:
        if not 0 <= args.step <= len(schedule.records):
            print(
                f"error: --step must be in 0..{len(schedule.records)}", file=sys.stderr
            )
            return 1
        sys.stdout.write(canonical_json(schedule_doc(schedule.at_step(args.step))))
        return 0

    failed = list(schedule.failed_ids)
    targets = failed
    if args.activity is not None:
        if args.activity not in {a.id for a in plan.activities}:
            print(f"error: unknown activity {args.activity!r}", file=sys.stderr)
            return 1
        targets = [args.activity] if args.activity in failed else []

    explanations = [explain(plan, plan.config, schedule, aid) for aid in targets]
    report = explanation_report_doc(plan, schedule, explanations)

    base = output_basename(os.path.basename(args.plan))
    out_dir = args.out or os.path.dirname(args.plan) or "."
    os.makedirs(out_dir, exist_ok=True)
    sched_path = os.path.join(out_dir, base + SCHEDULE_SUFFIX)
    explain_path = os.path.join(out_dir, base + EXPLAIN_SUFFIX)
    with open(sched_path, "w") as fh:
        fh.write(serialize_schedule(schedule))
    with open(explain_path, "w") as fh:
        fh.write(serialize_explanation(report))
    log.info("wrote %s and %s", sched_path, explain_path)

    if failed:
        print(f"{len(failed)} of {len(schedule.records)} activities failed: "
              + ", ".join(failed))
        return 2
    print(f"all {len(schedule.records)} activities scheduled")
    return 0


def cmd_explain(args: argparse.Namespace) -> int:
    plan = _load_plan(args.plan)
    if plan is None:
        return 1
    schedule = run_scheduler(plan.activities, plan.config)
    try:
        result = explain(plan, plan.config, schedule, args.activity)
    except KeyError:
        print(f"error: unknown activity {args.activity!r}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    sys.stdout.write(canonical_json(explanation_doc(result)))
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(persist_dir=args.persist, ui_dir=args.ui)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="crosscheck",
        description="Schedule a plan and explain every activity that failed.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="schedule a plan and write outputs")
    p_run.add_argument("plan", help="path to a .plan.json file")
    p_run.add_argument("--out", help="output directory (default: beside the input)")
    p_run.add_argument("--activity", help="limit the explanation to one activity")
    p_run.add_argument(
        "--step", type=int, help="print the partial schedule after step K and exit"
    )
    p_run.set_defaults(func=cmd_run)

    p_explain = sub.add_parser("explain", help="print one activity's explanation")
    p_explain.add_argument("plan", help="path to a .plan.json file")
    p_explain.add_argument("--activity", required=True)
    p_explain.set_defaults(func=cmd_explain)

    p_serve = sub.add_parser("serve", help="start the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8191)
    p_serve.add_argument("--persist", help="directory for plan revision snapshots")
    p_serve.add_argument("--ui", help="directory of static UI assets to serve at /ui")
    p_serve.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
