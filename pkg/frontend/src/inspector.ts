/**
 * Activity inspector: per-constraint valid-window tracks, the final
 * track, and (for failures) the notes and conflict entities.
 *
 * Failure notes are rendered verbatim from the explanation payload so the
 * UI and the command line never disagree on wording.
 */

import { escapeHtml } from "./timeline.js";
import type { ActivityView, ExplanationDoc, IntervalPair } from "./types.js";

export interface InspectorModel {
  activityId: string;
  outcome: string;
  start: number | null;
  step: number;
  failureStep: number | null;
  tracks: { kind: string; windows: IntervalPair[] }[];
  finalTrack: IntervalPair[];
  notes: string[];
  conflictLinks: { label: string; activities: string[] }[];
  partial: ExplanationDoc["partial_schedule"] | null;
}

export function buildInspector(
  activity: ActivityView,
  explanation: ExplanationDoc | null,
): InspectorModel {
  const source = explanation ?? activity;
  const tracks = Object.entries(source.valid_intervals).map(([kind, windows]) => ({
    kind,
    windows,
  }));
  const conflictLinks: InspectorModel["conflictLinks"] = [];
  if (explanation) {
    for (const conflict of explanation.conflicts) {
      for (const entity of conflict.entities) {
        conflictLinks.push({
          label: `${entity.kind}: ${entity.name}`,
          activities: entity.activities,
        });
      }
    }
  }
  return {
    activityId: activity.activity.id,
    outcome: activity.outcome,
    start: activity.start,
    step: activity.step,
    failureStep: explanation ? explanation.failure_step : null,
    tracks,
    finalTrack: source.final_intervals,
    notes: explanation ? [...explanation.notes] : [],
    conflictLinks,
    partial: explanation ? explanation.partial_schedule : null,
  };
}

function track(kind: string, windows: IntervalPair[], bounds: IntervalPair): string {
  const span = bounds[1] - bounds[0];
  const bars = windows
    .map(([s, e]) => {
      const left = (((s - bounds[0]) / span) * 100).toFixed(3);
      const width = Math.max(((e - s) / span) * 100, 0.15).toFixed(3);
      return `<div class="track-bar" style="left:${left}%;width:${width}%" title="[${s}, ${e})"></div>`;
    })
    .join("");
  return `
  <div class="track-label">${escapeHtml(kind)}</div>
  <div class="track">${bars || '<div class="track-empty">empty</div>'}</div>`;
}

export function renderInspector(model: InspectorModel, bounds: IntervalPair): string {
  const header =
    model.outcome === "scheduled"
      ? `scheduled at ${model.start} (step ${model.step})`
      : `${model.outcome.replace("_", " ")} — earliest failure step ${model.failureStep ?? "?"}`;
  const notes = model.notes
    .map((note) => `<p class="failure-note">${escapeHtml(note)}</p>`)
    .join("");
  const links = model.conflictLinks
    .map((link) => {
      const refs = link.activities
        .map(
          (aid) =>
            `<a href="#" class="conflict-link" data-activity="${escapeHtml(aid)}">${escapeHtml(aid)}</a>`,
        )
        .join(", ");
      return `<li>${escapeHtml(link.label)}${refs ? ` &mdash; ${refs}` : ""}</li>`;
    })
    .join("");
  return `
<div class="inspector" data-activity="${escapeHtml(model.activityId)}">
  <h3>${escapeHtml(model.activityId)}</h3>
  <p class="outcome outcome-${escapeHtml(model.outcome)}">${escapeHtml(header)}</p>
  ${notes}
  ${links ? `<ul class="conflicts">${links}</ul>` : ""}
  ${model.tracks.map((t) => track(t.kind, t.windows, bounds)).join("")}
  ${track("final", model.finalTrack, bounds)}
</div>`;
}
