/**
 * Constraint editing with live re-schedule.
 *
 * A PATCH re-runs the whole plan server-side; the result carries the new
 * scheduled/failed sets, from which the diff badges (who changed status)
 * are computed.
 */

import type { Api } from "./api.js";
import type { PatchResult } from "./types.js";

export interface StatusChange {
  id: string;
  from: "scheduled" | "failed";
  to: "scheduled" | "failed";
}

export interface EditResult {
  patch: PatchResult;
  changes: StatusChange[];
}

export function diffStatuses(
  before: { scheduled: string[]; failed: string[] },
  after: { scheduled: string[]; failed: string[] },
): StatusChange[] {
  const changes: StatusChange[] = [];
  const afterScheduled = new Set(after.scheduled);
  const afterFailed = new Set(after.failed);
  for (const id of before.failed) {
    if (afterScheduled.has(id)) changes.push({ id, from: "failed", to: "scheduled" });
  }
  for (const id of before.scheduled) {
    if (afterFailed.has(id)) changes.push({ id, from: "scheduled", to: "failed" });
  }
  // Stable order for rendering.
  changes.sort((a, b) => a.id.localeCompare(b.id));
  return changes;
}

export async function applyEdit(
  api: Api,
  sid: string,
  activityId: string,
  edits: Record<string, unknown>,
  revision: number,
  before: { scheduled: string[]; failed: string[] },
): Promise<EditResult> {
  const patch = await api.patchActivity(sid, activityId, edits, revision);
  return { patch, changes: diffStatuses(before, patch) };
}
