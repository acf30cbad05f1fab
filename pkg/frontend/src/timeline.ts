/**
 * Timeline view: five stacked lanes driven entirely by one step payload.
 *
 * Lane content is copied verbatim from the service response; the only
 * arithmetic here is mapping times onto percentages of the plan span for
 * CSS positioning.
 */

import type { IntervalPair, StepView } from "./types.js";

export interface LaneItem {
  id: string;
  start: number;
  end: number;
  kind: string; // activity | preheat | maintenance | ...
}

export interface TimelineViewModel {
  step: number;
  totalSteps: number;
  bounds: IntervalPair;
  outputLane: LaneItem[];
  yetLane: string[];
  failedLane: string[];
  awake: IntervalPair[];
  socSeries: [number, number][];
  powerSeries: [number, number][];
}

export function buildTimeline(view: StepView & { plan_bounds: IntervalPair }): TimelineViewModel {
  const outputLane: LaneItem[] = [];
  for (const placed of view.output_schedule) {
    outputLane.push({
      id: placed.activity,
      start: placed.start,
      end: placed.end,
      kind: "activity",
    });
    for (const gen of placed.generated) {
      outputLane.push({ id: gen.id, start: gen.start, end: gen.end, kind: gen.kind });
    }
  }
  return {
    step: view.step,
    totalSteps: view.total_steps,
    bounds: view.plan_bounds,
    outputLane,
    yetLane: [...view.yet_to_schedule],
    failedLane: [...view.failed],
    awake: [...view.awake],
    socSeries: [...view.soc_profile],
    powerSeries: [...view.power_profile],
  };
}

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function pct(t: number, bounds: IntervalPair): number {
  const span = bounds[1] - bounds[0];
  return ((t - bounds[0]) / span) * 100;
}

function bar(item: LaneItem, bounds: IntervalPair): string {
  const left = pct(item.start, bounds).toFixed(3);
  const width = Math.max(pct(item.end, bounds) - pct(item.start, bounds), 0.15).toFixed(3);
  const id = escapeHtml(item.id);
  return (
    `<div class="bar bar-${escapeHtml(item.kind)}" data-activity="${id}" ` +
    `style="left:${left}%;width:${width}%" title="${id} [${item.start}, ${item.end})">` +
    `<span>${id}</span></div>`
  );
}

function polyline(series: [number, number][], bounds: IntervalPair, height: number): string {
  if (series.length === 0) return "";
  const values = series.map(([, v]) => v);
  const vmax = Math.max(...values, 1e-9);
  const vmin = Math.min(...values, 0);
  const scale = (v: number) => height - ((v - vmin) / (vmax - vmin || 1)) * (height - 2) - 1;
  const points = series
    .map(([t, v]) => `${pct(t, bounds).toFixed(2)},${scale(v).toFixed(2)}`)
    .join(" ");
  return points;
}

function stepPath(series: [number, number][], bounds: IntervalPair, height: number): string {
  // Step function: hold each level until the next time.
  if (series.length === 0) return "";
  const expanded: [number, number][] = [];
  for (let i = 0; i < series.length; i++) {
    const [t, v] = series[i]!;
    expanded.push([t, v]);
    const next = series[i + 1];
    if (next) expanded.push([next[0], v]);
  }
  expanded.push([bounds[1], series[series.length - 1]![1]]);
  return polyline(expanded, bounds, height);
}

export function renderTimeline(vm: TimelineViewModel): string {
  const bounds = vm.bounds;
  const chips = (ids: string[], css: string) =>
    ids
      .map(
        (id) =>
          `<span class="chip ${css}" data-activity="${escapeHtml(id)}">${escapeHtml(id)}</span>`,
      )
      .join("");
  const awakeShade = vm.awake
    .map(([s, e]) => {
      const left = pct(s, bounds).toFixed(3);
      const width = (pct(e, bounds) - pct(s, bounds)).toFixed(3);
      return `<div class="awake-shade" style="left:${left}%;width:${width}%"></div>`;
    })
    .join("");
  return `
<div class="timeline" data-step="${vm.step}">
  <div class="lane-label">output schedule (step ${vm.step}/${vm.totalSteps})</div>
  <div class="lane lane-output">${awakeShade}${vm.outputLane.map((i) => bar(i, bounds)).join("")}</div>
  <div class="lane-label">yet to be scheduled</div>
  <div class="lane lane-chips">${chips(vm.yetLane, "chip-yet")}</div>
  <div class="lane-label">failed to schedule</div>
  <div class="lane lane-chips">${chips(vm.failedLane, "chip-failed")}</div>
  <div class="lane-label">battery (Wh)</div>
  <svg class="lane lane-profile" viewBox="0 0 100 34" preserveAspectRatio="none" data-profile="energy">
    <polyline points="${polyline(vm.socSeries, bounds, 34)}" />
  </svg>
  <div class="lane-label">peak power (W)</div>
  <svg class="lane lane-profile" viewBox="0 0 100 34" preserveAspectRatio="none" data-profile="power">
    <polyline points="${stepPath(vm.powerSeries, bounds, 34)}" />
  </svg>
</div>`;
}
