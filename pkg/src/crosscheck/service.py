"""HTTP service driving the interactive timeline UI.

Sessions are in-memory; each holds one plan revision plus everything
derived from it (schedule, lazily computed explanations).  A PATCH that
edits an activity re-validates and re-schedules the whole plan under the
session's writer lock, bumps the revision and clears the caches, so a
PATCH is always equivalent to a fresh upload of the edited plan.

Every response body is rendered by the canonical JSON writer, so payloads
here are byte-identical to the CLI's files for the same plan revision.
"""

from __future__ import annotations

import itertools
import json
import logging
import os
import threading
from dataclasses import dataclass, field

from fastapi import FastAPI, Request, Response
from starlette.concurrency import run_in_threadpool

from .explain import Explanation, energy_consumers, explain, peak_power_users
from .model import Plan, PlanError
from .planio import (
    activity_doc,
    canonical_json,
    explanation_doc,
    explanation_report_doc,
    parse_plan,
    plan_doc,
    schedule_doc,
    serialize_plan,
)
from .scheduler import OUTCOME_SCHEDULED, Schedule, run_scheduler

log = logging.getLogger("crosscheck.service")


@dataclass
class SessionState:
    plan: Plan
    revision: int
    schedule: Schedule
    explanations: dict[str, Explanation] = field(default_factory=dict)


class Session:
    def __init__(self, session_id: str, plan: Plan):
        self.id = session_id
        self.lock = threading.Lock()
        self.state = SessionState(plan, 0, run_scheduler(plan.activities, plan.config))

    def replace_plan(self, plan: Plan) -> SessionState:
        new_state = SessionState(
            plan, self.state.revision + 1, run_scheduler(plan.activities, plan.config)
        )
        self.state = new_state
        return new_state


class SessionStore:
    def __init__(self, persist_dir: str | None = None):
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()
        self._counter = itertools.count(1)
        self.persist_dir = persist_dir

    def create(self, plan: Plan) -> Session:
        with self._lock:
            session = Session(f"s{next(self._counter)}", plan)
            self._sessions[session.id] = session
        self._persist(session)
        return session

    def get(self, session_id: str) -> Session | None:
        return self._sessions.get(session_id)

    def _persist(self, session: Session) -> None:
        if not self.persist_dir:
            return
        os.makedirs(self.persist_dir, exist_ok=True)
        state = session.state
        path = os.path.join(
            self.persist_dir, f"{session.id}-rev{state.revision}.plan.json"
        )
        with open(path, "w") as fh:
            fh.write(serialize_plan(state.plan))


def _json_response(doc, status: int = 200) -> Response:
    return Response(
        content=canonical_json(doc), status_code=status, media_type="application/json"
    )


def _error(status: int, message: str, errors: list[str] | None = None) -> Response:
    doc = {"error": message}
    if errors:
        doc["errors"] = errors
    return _json_response(doc, status)


def _explanation_for(state: SessionState, activity_id: str) -> Explanation:
    cached = state.explanations.get(activity_id)
    if cached is None:
        cached = explain(state.plan, state.plan.config, state.schedule, activity_id)
        state.explanations.setdefault(activity_id, cached)
    return cached


def _step_view(state: SessionState, step: int) -> dict:
    schedule = state.schedule
    partial = schedule.at_step(step)
    placed_ids = set(partial.scheduled_ids)
    failed_ids = set(partial.failed_ids)
    attempted = {r.activity_id for r in partial.records}
    doc = schedule_doc(partial)
    return {
        "revision": state.revision,
        "plan_bounds": doc["plan_bounds"],
        "step": step,
        "total_steps": len(schedule.records),
        "output_schedule": [
            entry for entry in doc["placed"] if entry["activity"] in placed_ids
        ],
        "failed": sorted(failed_ids),
        "yet_to_schedule": [
            a.id for a in state.plan.ordered if a.id not in attempted
        ],
        "awake": doc["awake"],
        "soc_profile": doc["soc_profile"],
        "power_profile": doc["power_profile"],
    }


def create_app(persist_dir: str | None = None, ui_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="crosscheck", version="0.1.0")
    store = SessionStore(persist_dir)
    app.state.store = store

    @app.post("/sessions")
    async def create_session(request: Request) -> Response:
        body = await request.body()
        try:
            plan = await run_in_threadpool(parse_plan, body)
            session = await run_in_threadpool(store.create, plan)
        except PlanError as exc:
            return _error(422, "invalid plan", exc.errors)
        state = session.state
        return _json_response(
            {
                "session_id": session.id,
                "revision": state.revision,
                "scheduled": list(state.schedule.scheduled_ids),
                "failed": list(state.schedule.failed_ids),
            },
            status=201,
        )

    @app.get("/sessions/{session_id}/schedule")
    async def get_schedule(session_id: str, step: int | None = None) -> Response:
        session = store.get(session_id)
        if session is None:
            return _error(404, f"unknown session {session_id!r}")
        state = session.state
        if step is None:
            doc = await run_in_threadpool(schedule_doc, state.schedule)
            return _json_response(doc)
        if not 0 <= step <= len(state.schedule.records):
            return _error(422, f"step must be in 0..{len(state.schedule.records)}")
        view = await run_in_threadpool(_step_view, state, step)
        return _json_response(view)

    @app.get("/sessions/{session_id}/activities/{activity_id}")
    async def get_activity(session_id: str, activity_id: str) -> Response:
        session = store.get(session_id)
        if session is None:
            return _error(404, f"unknown session {session_id!r}")
        state = session.state
        act = state.plan.by_id.get(activity_id)
        if act is None:
            return _error(404, f"unknown activity {activity_id!r}")
        record = state.schedule.record_for(activity_id)
        return _json_response(
            {
                "revision": state.revision,
                "activity": activity_doc(act),
                "step": record.step,
                "outcome": record.outcome,
                "start": record.start,
                "valid_intervals": {
                    kind.value: vi.pairs() for kind, vi in record.valid_intervals
                },
                "final_intervals": record.final_intervals.pairs(),
            }
        )

    @app.get("/sessions/{session_id}/activities/{activity_id}/explanation")
    async def get_explanation(session_id: str, activity_id: str) -> Response:
        session = store.get(session_id)
        if session is None:
            return _error(404, f"unknown session {session_id!r}")
        state = session.state
        if activity_id not in state.plan.by_id:
            return _error(404, f"unknown activity {activity_id!r}")
        record = state.schedule.record_for(activity_id)
        if record.outcome == OUTCOME_SCHEDULED:
            return _error(409, f"{activity_id!r} scheduled successfully; nothing to explain")
        result = await run_in_threadpool(_explanation_for, state, activity_id)
        return _json_response(explanation_doc(result))

    @app.get("/sessions/{session_id}/report")
    async def get_report(session_id: str) -> Response:
        session = store.get(session_id)
        if session is None:
            return _error(404, f"unknown session {session_id!r}")
        state = session.state

        def build() -> dict:
            explanations = [
                _explanation_for(state, aid) for aid in state.schedule.failed_ids
            ]
            return explanation_report_doc(state.plan, state.schedule, explanations)

        return _json_response(await run_in_threadpool(build))

    @app.get("/sessions/{session_id}/energy")
    async def get_energy(session_id: str, t: int) -> Response:
        session = store.get(session_id)
        if session is None:
            return _error(404, f"unknown session {session_id!r}")
        state = session.state
        cfg = state.plan.config
        if not cfg.plan_bounds.start <= t <= cfg.plan_bounds.end:
            return _error(422, "t outside plan bounds")
        entries = await run_in_threadpool(energy_consumers, state.schedule, cfg, t)
        return _json_response(
            {
                "revision": state.revision,
                "t": t,
                "consumers": [
                    {"id": name, "watt_hours": value} for name, value in entries
                ],
            }
        )

    @app.get("/sessions/{session_id}/power")
    async def get_power(session_id: str, t: int) -> Response:
        session = store.get(session_id)
        if session is None:
            return _error(404, f"unknown session {session_id!r}")
        state = session.state
        cfg = state.plan.config
        if not cfg.plan_bounds.start <= t < cfg.plan_bounds.end:
            return _error(422, "t outside plan bounds")
        entries = await run_in_threadpool(peak_power_users, state.schedule, cfg, t)
        return _json_response(
            {
                "revision": state.revision,
                "t": t,
                "users": [{"id": name, "watts": value} for name, value in entries],
            }
        )

    @app.patch("/sessions/{session_id}/activities/{activity_id}")
    async def patch_activity(session_id: str, activity_id: str, request: Request) -> Response:
        session = store.get(session_id)
        if session is None:
            return _error(404, f"unknown session {session_id!r}")
        try:
            edits = json.loads(await request.body())
        except json.JSONDecodeError:
            return _error(422, "body must be a JSON object of field edits")
        if not isinstance(edits, dict):
            return _error(422, "body must be a JSON object of field edits")
        expected_revision = edits.pop("revision", None)

        def apply() -> Response:
            with session.lock:
                state = session.state
                if expected_revision is not None and expected_revision != state.revision:
                    return _error(
                        409,
                        f"stale revision {expected_revision} (current {state.revision})",
                    )
                if activity_id not in state.plan.by_id:
                    return _error(404, f"unknown activity {activity_id!r}")
                doc = plan_doc(state.plan)
                for entry in doc["activities"]:
                    if entry["id"] == activity_id:
                        if "id" in edits and edits["id"] != activity_id:
                            return _error(422, "activity id cannot be changed")
                        entry.update(edits)
                        break
                try:
                    plan = parse_plan(canonical_json(doc))
                except PlanError as exc:
                    return _error(422, "invalid edit", exc.errors)
                new_state = session.replace_plan(plan)
                store._persist(session)
                record = new_state.schedule.record_for(activity_id)
                return _json_response(
                    {
                        "session_id": session.id,
                        "revision": new_state.revision,
                        "activity": activity_id,
                        "outcome": record.outcome,
                        "start": record.start,
                        "scheduled": list(new_state.schedule.scheduled_ids),
                        "failed": list(new_state.schedule.failed_ids),
                    }
                )

        return await run_in_threadpool(apply)

    @app.get("/")
    async def index() -> Response:
        return _json_response(
            {
                "service": "crosscheck",
                "version": "0.1.0",
                "endpoints": [
                    "POST /sessions",
                    "GET /sessions/{id}/schedule?step=k",
                    "GET /sessions/{id}/activities/{aid}",
                    "GET /sessions/{id}/activities/{aid}/explanation",
                    "GET /sessions/{id}/report",
                    "GET /sessions/{id}/energy?t=",
                    "GET /sessions/{id}/power?t=",
                    "PATCH /sessions/{id}/activities/{aid}",
                ],
            }
        )

    if ui_dir and os.path.isdir(ui_dir):
        from starlette.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")
        log.info("serving UI assets from %s", ui_dir)

    return app
