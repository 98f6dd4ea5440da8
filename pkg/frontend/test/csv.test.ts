import { readFileSync } from "node:fs";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { SchemaError, parseEpochCsv, parseSummaryCsv, trafficTotals } from "../src/csv.js";

const FIXTURES = join(__dirname, "fixtures");
const staticText = readFileSync(join(FIXTURES, "epochs_static.csv"), "utf-8");

describe("parseEpochCsv", () => {
  it("discovers tiers and parses every row", () => {
    const table = parseEpochCsv(staticText);
    expect(table.tierNames).toEqual(["dram", "dcpmm"]);
    expect(table.rows).toHaveLength(24);
    const first = table.rows[0];
    expect(first.epoch).toBe(0);
    expect(first.cumulativeTimeNs).toBeCloseTo(first.simulatedTimeNs);
    expect(first.tiers.dcpmm.read_bytes).toBeGreaterThan(0);
    expect(first.tiers.dram.migration_bytes).toBe(0);
  });

  it("accepts a header-only file as zero rows", () => {
    const header = staticText.split("\n")[0];
    const table = parseEpochCsv(header + "\n");
    expect(table.rows).toHaveLength(0);
    expect(table.tierNames).toEqual(["dram", "dcpmm"]);
  });

  it("names the missing column on schema mismatch", () => {
    const broken = staticText
      .split("\n")
      .map((l) => l.split(",").slice(0, -1).join(","))
      .join("\n"); // drop the last column (dcpmm_migration_bytes)
    expect(() => parseEpochCsv(broken)).toThrowError(SchemaError);
    expect(() => parseEpochCsv(broken)).toThrowError(/missing column: dcpmm_migration_bytes/);
    expect(() => parseEpochCsv("a,b,c\n1,2,3\n")).toThrowError(/missing column: epoch/);
  });

  it("rejects non-numeric cells", () => {
    const lines = staticText.split("\n");
    lines[1] = lines[1].replace(/^0,/, "zero,");
    expect(() => parseEpochCsv(lines.join("\n"))).toThrowError(/line 2/);
  });
});

describe("parseSummaryCsv", () => {
  it("parses the comparison summary", () => {
    const rows = parseSummaryCsv(readFileSync(join(FIXTURES, "summary.csv"), "utf-8"));
    expect(rows.map((r) => r.label)).toEqual([
      "all-fast",
      "remap-1pct",
      "static-1pct",
      "all-slow",
    ]);
    expect(rows[0].slowdown).toBe(1.0); // the baseline against itself
    expect(rows[3].slowdown).toBeGreaterThan(rows[1].slowdown);
  });

  it("names missing columns", () => {
    expect(() => parseSummaryCsv("label,total_time_ns\nx,1\n")).toThrowError(
      /missing column: slowdown/,
    );
  });
});

describe("trafficTotals", () => {
  it("keeps a static 1% mapping dominated by the slow tier", () => {
    // figure-level sanity: with no remapping nearly all traffic stays on the
    // slow tier, so its series must visually dominate
    const totals = trafficTotals(parseEpochCsv(staticText));
    const slow = totals["dcpmm read"] + totals["dcpmm writeback"];
    const fast = totals["dram read"] + totals["dram writeback"];
    expect(slow).toBeGreaterThan(10 * fast);
  });
});
