/**
 * Contract tests against recorded service payloads.
 *
 * The UI must hold no scheduling logic: everything it shows is traceable
 * to a payload field.  These tests replay the six desk scenarios (plus
 * the fig4a edit flow) recorded from the real service by
 * scripts/record_ui_fixtures.py.
 */

import assert from "node:assert/strict";
import { readFileSync } from "node:fs";
import { test } from "node:test";

import { Api, ServiceError } from "../src/api.js";
import { applyEdit, diffStatuses } from "../src/edit.js";
import { buildInspector, renderInspector } from "../src/inspector.js";
import { buildEnergyPanel, buildPowerPanel, renderPanel } from "../src/profiles.js";
import { buildTimeline, escapeHtml, renderTimeline } from "../src/timeline.js";

const SCENARIOS = [
  "fig4a_execution_uhf",
  "fig4b_dependency_two_subsets",
  "fig4c_state_requirement",
  "fig5a_insufficient_energy",
  "fig5b_peak_power",
  "fig5c_preheat_operability",
];

function fixture(name: string): any {
  const url = new URL(`../../tests/fixtures/${name}.json`, import.meta.url);
  return JSON.parse(readFileSync(url, "utf8"));
}

for (const name of SCENARIOS) {
  const fx = fixture(name);

  test(`${name}: failure notes render verbatim`, () => {
    const model = buildInspector(fx.activity, fx.explanation);
    assert.deepEqual(model.notes, fx.explanation.notes);
    assert.ok(model.notes.length >= 1, "a failed activity always has a note");
    const html = renderInspector(model, fx.schedule.plan_bounds);
    for (const note of fx.explanation.notes) {
      assert.ok(html.includes(escapeHtml(note)), "note text must appear unchanged");
    }
  });

  test(`${name}: slider at the failure step shows the explanation's partial schedule`, () => {
    assert.equal(fx.step_view.step, fx.explanation.failure_step);
    const vm = buildTimeline(fx.step_view);
    const lane = vm.outputLane
      .filter((item) => item.kind === "activity")
      .map((item) => ({ activity: item.id, start: item.start, end: item.end }));
    assert.deepEqual(lane, fx.explanation.partial_schedule.placed);
  });

  test(`${name}: timeline numbers are payload fields only`, () => {
    const vm = buildTimeline(fx.step_view);
    const placedById = new Map<string, any>(
      fx.step_view.output_schedule.map((p: any) => [p.activity, p]),
    );
    for (const item of vm.outputLane) {
      if (item.kind === "activity") {
        const src = placedById.get(item.id);
        assert.ok(src, `lane item ${item.id} missing from payload`);
        assert.equal(item.start, src.start);
        assert.equal(item.end, src.end);
      }
    }
    assert.deepEqual(vm.socSeries, fx.step_view.soc_profile);
    assert.deepEqual(vm.powerSeries, fx.step_view.power_profile);
    assert.deepEqual(vm.failedLane, fx.step_view.failed);
    assert.deepEqual(vm.yetLane, fx.step_view.yet_to_schedule);
  });

  test(`${name}: re-rendering a cached step is pure`, () => {
    const first = renderTimeline(buildTimeline(fx.step_view));
    const second = renderTimeline(buildTimeline(fx.step_view));
    assert.equal(first, second);
  });

  test(`${name}: consumer panels pass payload rows through in order`, () => {
    const energy = buildEnergyPanel(fx.energy);
    assert.deepEqual(
      energy.rows,
      fx.energy.consumers.map((c: any) => ({ id: c.id, value: c.watt_hours })),
    );
    const power = buildPowerPanel(fx.power);
    assert.deepEqual(
      power.rows,
      fx.power.users.map((u: any) => ({ id: u.id, value: u.watts })),
    );
    const html = renderPanel(energy);
    for (const row of energy.rows.slice(0, 3)) {
      assert.ok(html.includes(escapeHtml(row.id)));
    }
  });
}

function fakeFetch(routes: Record<string, { status: number; body: unknown }>) {
  const calls: { url: string; init?: RequestInit }[] = [];
  const fetchFn = async (url: string, init?: RequestInit): Promise<Response> => {
    calls.push({ url, init });
    const route = routes[`${init?.method ?? "GET"} ${url}`];
    if (!route) throw new Error(`unexpected request: ${init?.method} ${url}`);
    return new Response(JSON.stringify(route.body), { status: route.status });
  };
  return { fetchFn, calls };
}

test("fig4a: widening the window flips the activity to scheduled", async () => {
  const fx = fixture("fig4a_edit");
  const { fetchFn, calls } = fakeFetch({
    "PATCH /sessions/s1/activities/sun_survey": { status: 200, body: fx.patch },
  });
  const api = new Api("", fetchFn);
  const before = { scheduled: fx.before.scheduled, failed: fx.before.failed };
  const result = await applyEdit(api, "s1", "sun_survey", { windows: fx.edit.windows }, 0, before);

  assert.equal(result.patch.outcome, "scheduled");
  assert.deepEqual(result.changes, [
    { id: "sun_survey", from: "failed", to: "scheduled" },
  ]);
  const sent = JSON.parse(String(calls[0]!.init!.body));
  assert.equal(sent.revision, 0);

  // The re-rendered timeline shows it in the output lane, not failed.
  const vm = buildTimeline(fx.after_step_view);
  assert.ok(vm.outputLane.some((item) => item.id === "sun_survey"));
  assert.ok(!vm.failedLane.includes("sun_survey"));
});

test("fig4a: a no-op edit bumps the revision without status changes", async () => {
  const fx = fixture("fig4a_edit");
  assert.equal(fx.noop_patch.revision, 2);
  const changes = diffStatuses(
    { scheduled: fx.patch.scheduled, failed: fx.patch.failed },
    { scheduled: fx.noop_patch.scheduled, failed: fx.noop_patch.failed },
  );
  assert.deepEqual(changes, []);
});

test("fig4a: an illegal window edit surfaces the validation error", async () => {
  const fx = fixture("fig4a_edit");
  const { fetchFn } = fakeFetch({
    "PATCH /sessions/s1/activities/sun_survey": {
      status: fx.invalid_patch.status,
      body: fx.invalid_patch.body,
    },
  });
  const api = new Api("", fetchFn);
  await assert.rejects(
    applyEdit(api, "s1", "sun_survey", { windows: [[9000, 9000, 100]] }, 2, {
      scheduled: [],
      failed: [],
    }),
    (error: unknown) => {
      assert.ok(error instanceof ServiceError);
      assert.equal(error.status, 422);
      assert.ok(error.details.some((d) => d.includes("start <= preferred <= end")));
      return true;
    },
  );
});

test("step 0 view renders only the yet-to-schedule lane", () => {
  const fx = fixture("fig4a_execution_uhf");
  // Synthesize the step-0 shape from the recorded full view: the service
  // serves it with empty lanes; emulate with the recorded fields zeroed.
  const view = {
    ...fx.step_view,
    step: 0,
    output_schedule: [],
    failed: [],
    yet_to_schedule: fx.schedule.steps.map((s: any) => s.activity),
    awake: [],
  };
  const vm = buildTimeline(view);
  assert.equal(vm.outputLane.length, 0);
  assert.equal(vm.failedLane.length, 0);
  assert.equal(vm.yetLane.length, fx.schedule.steps.length);
});
