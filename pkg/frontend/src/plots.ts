/**
 * Figure builders: traffic and relocation timelines from per-epoch CSVs,
 * and a slowdown summary from a comparison CSV.
 */

import { EpochTable, SummaryRow } from "./csv.js";
import { Series, buildBarChart, buildLineChart } from "./svg.js";

export type PlotKind = "traffic" | "relocations" | "summary";

export const PLOT_KINDS: PlotKind[] = ["traffic", "relocations", "summary"];

const PALETTE = ["#4361ee", "#e63946", "#2d6a4f", "#f4a261", "#9d4edd", "#555"];

/** One line per (tier, direction): bytes moved per epoch over simulated time. */
export function trafficPlot(table: EpochTable, label = ""): string {
  const x = table.rows.map((r) => r.cumulativeTimeNs / 1e6);
  const series: Series[] = [];
  table.tierNames.forEach((tier, ti) => {
    series.push({
      label: `${tier} read`,
      color: PALETTE[(2 * ti) % PALETTE.length],
      values: table.rows.map((r) => r.tiers[tier].read_bytes),
    });
    series.push({
      label: `${tier} writeback`,
      color: PALETTE[(2 * ti + 1) % PALETTE.length],
      dash: "5,3",
      values: table.rows.map((r) => r.tiers[tier].writeback_bytes),
    });
  });
  return buildLineChart({
    title: label ? `Memory traffic per epoch — ${label}` : "Memory traffic per epoch",
    xLabel: "simulated time (ms)",
    yLabel: "bytes per epoch",
    x,
    series,
  });
}

/** Page relocations applied per epoch, as bars. */
export function relocationsPlot(table: EpochTable, label = ""): string {
  return buildBarChart({
    title: label ? `Page relocations per epoch — ${label}` : "Page relocations per epoch",
    xLabel: "epoch",
    yLabel: "relocated pairs",
    labels: table.rows.map((r) => String(r.epoch)),
    values: table.rows.map((r) => r.relocations),
    color: "#2d6a4f",
  });
}

/** Slowdown relative to the baseline run, one bar per run. */
export function summaryPlot(rows: SummaryRow[]): string {
  return buildBarChart({
    title: "Total elapsed time relative to baseline",
    xLabel: "run",
    yLabel: "slowdown (x)",
    labels: rows.map((r) => r.label),
    values: rows.map((r) => r.slowdown),
  });
}
