/**
 * Consumer panels behind clicks on the battery / peak-power profiles.
 *
 * The service already sorts descending; rows are passed through in
 * payload order, values untouched.
 */

import { escapeHtml } from "./timeline.js";
import type { EnergyView, PowerView } from "./types.js";

export interface ConsumerPanel {
  kind: "energy" | "power";
  t: number;
  unit: string;
  rows: { id: string; value: number }[];
}

export function buildEnergyPanel(view: EnergyView): ConsumerPanel {
  return {
    kind: "energy",
    t: view.t,
    unit: "Wh",
    rows: view.consumers.map((c) => ({ id: c.id, value: c.watt_hours })),
  };
}

export function buildPowerPanel(view: PowerView): ConsumerPanel {
  return {
    kind: "power",
    t: view.t,
    unit: "W",
    rows: view.users.map((u) => ({ id: u.id, value: u.watts })),
  };
}

export function renderPanel(panel: ConsumerPanel): string {
  const title =
    panel.kind === "energy"
      ? `energy consumed before t=${panel.t}`
      : `peak power users at t=${panel.t}`;
  const rows = panel.rows
    .map(
      (row) =>
        `<tr><td>${escapeHtml(row.id)}</td>` +
        `<td class="num">${row.value.toFixed(2)} ${panel.unit}</td></tr>`,
    )
    .join("");
  return `
<div class="consumer-panel" data-kind="${panel.kind}">
  <h4>${escapeHtml(title)}</h4>
  <table>${rows || "<tr><td>nothing running</td></tr>"}</table>
</div>`;
}
