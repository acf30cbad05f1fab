/**
 * Browser wiring: glue between DOM events and the pure view builders.
 *
 * State is one session id plus cached step payloads per revision; the
 * step slider re-renders from cache, every edit invalidates it.
 */

import { Api, ServiceError } from "./api.js";
import { applyEdit } from "./edit.js";
import { buildInspector, renderInspector } from "./inspector.js";
import { buildEnergyPanel, buildPowerPanel, renderPanel } from "./profiles.js";
import { buildTimeline, renderTimeline } from "./timeline.js";
import type { IntervalPair, SessionCreated, StepView } from "./types.js";

const api = new Api("");

interface UiState {
  sid: string | null;
  revision: number;
  totalSteps: number;
  step: number;
  bounds: IntervalPair;
  session: SessionCreated | null;
  stepCache: Map<number, StepView & { plan_bounds: IntervalPair }>;
  editing: boolean;
}

const state: UiState = {
  sid: null,
  revision: 0,
  totalSteps: 0,
  step: 0,
  bounds: [0, 1],
  session: null,
  stepCache: new Map(),
  editing: false,
};

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function banner(message: string, isError = true): void {
  const box = el<HTMLDivElement>("banner");
  box.textContent = message;
  box.className = isError ? "banner banner-error" : "banner banner-info";
  box.hidden = !message;
}

async function loadStep(step: number): Promise<void> {
  if (!state.sid) return;
  let view = state.stepCache.get(step);
  if (!view) {
    view = (await api.stepView(state.sid, step)) as StepView & {
      plan_bounds: IntervalPair;
    };
    state.stepCache.set(step, view);
  }
  state.step = step;
  state.bounds = view.plan_bounds;
  const vm = buildTimeline(view);
  el("timeline-host").innerHTML = renderTimeline(vm);
  el<HTMLInputElement>("step-slider").value = String(step);
  el("step-readout").textContent = `step ${step} / ${state.totalSteps}`;
  bindTimelineClicks();
}

function bindTimelineClicks(): void {
  for (const node of document.querySelectorAll<HTMLElement>("[data-activity]")) {
    node.onclick = (event: MouseEvent) => {
      event.preventDefault();
      void inspect(node.dataset.activity!);
    };
  }
  for (const node of document.querySelectorAll<SVGElement>("[data-profile]")) {
    node.addEventListener("click", (event: MouseEvent) => {
      const rect = node.getBoundingClientRect();
      const frac = (event.clientX - rect.left) / rect.width;
      const t = Math.round(state.bounds[0] + frac * (state.bounds[1] - state.bounds[0]));
      void openPanel(node.getAttribute("data-profile") as "energy" | "power", t);
    });
  }
}

async function inspect(activityId: string): Promise<void> {
  if (!state.sid) return;
  try {
    const activity = await api.activity(state.sid, activityId);
    let explanation = null;
    if (activity.outcome !== "scheduled") {
      explanation = await api.explanation(state.sid, activityId);
    }
    const model = buildInspector(activity, explanation);
    el("inspector-host").innerHTML = renderInspector(model, state.bounds);
    renderEditor(activityId);
    if (explanation) {
      // Clicking a failed activity jumps the slider to its failure step.
      await loadStep(explanation.failure_step);
    }
  } catch (error) {
    banner(error instanceof ServiceError ? error.message : String(error));
  }
}

async function openPanel(kind: "energy" | "power", t: number): Promise<void> {
  if (!state.sid) return;
  const panel =
    kind === "energy"
      ? buildEnergyPanel(await api.energy(state.sid, t))
      : buildPowerPanel(await api.power(state.sid, t));
  el("panel-host").innerHTML = renderPanel(panel);
}

function renderEditor(activityId: string): void {
  el("editor-host").innerHTML = `
    <h4>edit ${activityId}</h4>
    <textarea id="edit-json" rows="4" spellcheck="false">{"windows": [[0, 0, 0]]}</textarea>
    <button id="edit-apply" ${state.editing ? "disabled" : ""}>apply &amp; re-schedule</button>
    <div id="edit-feedback"></div>`;
  el<HTMLButtonElement>("edit-apply").onclick = () => void submitEdit(activityId);
}

async function submitEdit(activityId: string): Promise<void> {
  if (!state.sid || !state.session || state.editing) return;
  state.editing = true;
  try {
    const edits = JSON.parse(el<HTMLTextAreaElement>("edit-json").value);
    const before = { scheduled: state.session.scheduled, failed: state.session.failed };
    const result = await applyEdit(api, state.sid, activityId, edits, state.revision, before);
    state.revision = result.patch.revision;
    state.session = { ...state.session, scheduled: result.patch.scheduled, failed: result.patch.failed };
    state.stepCache.clear();
    const badges = result.changes
      .map((c) => `<span class="badge badge-${c.to}">${c.id}: ${c.from} &rarr; ${c.to}</span>`)
      .join(" ");
    el("edit-feedback").innerHTML = badges || "<span class='badge'>no status changes</span>";
    banner(`revision ${state.revision}: ${result.patch.activity} now ${result.patch.outcome}`, false);
    await loadStep(state.totalSteps);
  } catch (error) {
    if (error instanceof ServiceError) {
      el("edit-feedback").innerHTML = [error.message, ...error.details]
        .map((m) => `<div class="edit-error">${m}</div>`)
        .join("");
    } else {
      banner(String(error));
    }
  } finally {
    state.editing = false;
  }
}

async function uploadPlan(text: string): Promise<void> {
  try {
    const session = await api.createSession(text);
    state.sid = session.session_id;
    state.session = session;
    state.revision = session.revision;
    state.stepCache.clear();
    const schedule = await api.schedule(state.sid);
    state.totalSteps = schedule.steps.length;
    const slider = el<HTMLInputElement>("step-slider");
    slider.max = String(state.totalSteps);
    slider.disabled = false;
    banner(
      `session ${state.sid}: ${session.scheduled.length} scheduled, ${session.failed.length} failed`,
      false,
    );
    await loadStep(state.totalSteps);
  } catch (error) {
    banner(error instanceof ServiceError ? `${error.message}: ${error.details.join("; ")}` : String(error));
  }
}

export function start(): void {
  el<HTMLInputElement>("plan-file").onchange = async (event) => {
    const input = event.target as HTMLInputElement;
    const file = input.files?.[0];
    if (file) await uploadPlan(await file.text());
  };
  el<HTMLInputElement>("step-slider").oninput = (event) => {
    const step = Number((event.target as HTMLInputElement).value);
    void loadStep(step);
  };
}

if (typeof document !== "undefined") {
  document.addEventListener("DOMContentLoaded", start);
}
