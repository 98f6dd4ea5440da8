/**
 * Parsers for the simulator's CSV outputs.
 *
 * Per-epoch files carry four fixed columns (epoch, simulated_time_ns,
 * cumulative_time_ns, relocations) followed by five counters per tier,
 * named `<tier>_<counter>`.  Tier names are discovered from the header.
 */

export const TIER_COUNTERS = [
  "read_misses",
  "writebacks",
  "read_bytes",
  "writeback_bytes",
  "migration_bytes",
] as const;

export type TierCounter = (typeof TIER_COUNTERS)[number];

const FIXED_COLUMNS = [
  "epoch",
  "simulated_time_ns",
  "cumulative_time_ns",
  "relocations",
] as const;

export interface EpochRow {
  epoch: number;
  simulatedTimeNs: number;
  cumulativeTimeNs: number;
  relocations: number;
  tiers: Record<string, Record<TierCounter, number>>;
}

export interface EpochTable {
  tierNames: string[];
  rows: EpochRow[];
}

export interface SummaryRow {
  label: string;
  totalTimeNs: number;
  slowdown: number;
}

/** Raised when a CSV header does not match the documented schema. */
export class SchemaError extends Error {}

function splitLines(text: string): string[] {
  return text
    .split(/\r?\n/)
    .map((l) => l.trim())
    .filter((l) => l.length > 0);
}

function num(field: string, lineno: number, raw: string): number {
  const v = Number(raw);
  if (raw === "" || Number.isNaN(v)) {
    throw new SchemaError(`line ${lineno}: bad value ${JSON.stringify(raw)} for ${field}`);
  }
  return v;
}

export function parseEpochCsv(text: string): EpochTable {
  const lines = splitLines(text);
  if (lines.length === 0) throw new SchemaError("empty file: missing header");
  const header = lines[0].split(",");
  const index = new Map(header.map((h, i) => [h, i]));

  for (const col of FIXED_COLUMNS) {
    if (!index.has(col)) throw new SchemaError(`missing column: ${col}`);
  }

  // every `<tier>_read_misses` column announces a tier; that tier must then
  // carry all five counters
  const tierNames: string[] = [];
  for (const h of header) {
    if (h.endsWith("_read_misses")) tierNames.push(h.slice(0, -"_read_misses".length));
  }
  if (tierNames.length === 0) throw new SchemaError("missing column: <tier>_read_misses");
  for (const tier of tierNames) {
    for (const counter of TIER_COUNTERS) {
      if (!index.has(`${tier}_${counter}`)) {
        throw new SchemaError(`missing column: ${tier}_${counter}`);
      }
    }
  }

  const rows: EpochRow[] = lines.slice(1).map((line, i) => {
    const parts = line.split(",");
    if (parts.length !== header.length) {
      throw new SchemaError(`line ${i + 2}: expected ${header.length} fields, got ${parts.length}`);
    }
    const get = (col: string) => num(col, i + 2, parts[index.get(col)!]);
    const tiers: EpochRow["tiers"] = {};
    for (const tier of tierNames) {
      tiers[tier] = Object.fromEntries(
        TIER_COUNTERS.map((c) => [c, get(`${tier}_${c}`)]),
      ) as Record<TierCounter, number>;
    }
    return {
      epoch: get("epoch"),
      simulatedTimeNs: get("simulated_time_ns"),
      cumulativeTimeNs: get("cumulative_time_ns"),
      relocations: get("relocations"),
      tiers,
    };
  });

  return { tierNames, rows };
}

export function parseSummaryCsv(text: string): SummaryRow[] {
  const lines = splitLines(text);
  if (lines.length === 0) throw new SchemaError("empty file: missing header");
  const header = lines[0].split(",");
  const index = new Map(header.map((h, i) => [h, i]));
  for (const col of ["label", "total_time_ns", "slowdown"]) {
    if (!index.has(col)) throw new SchemaError(`missing column: ${col}`);
  }
  return lines.slice(1).map((line, i) => {
    const parts = line.split(",");
    return {
      label: parts[index.get("label")!],
      totalTimeNs: num("total_time_ns", i + 2, parts[index.get("total_time_ns")!]),
      slowdown: num("slowdown", i + 2, parts[index.get("slowdown")!]),
    };
  });
}

/** Total bytes moved per (tier, direction) over a whole run — the numbers a
 * traffic figure draws.  Keys look like `dram read` / `dcpmm writeback`. */
export function trafficTotals(table: EpochTable): Record<string, number> {
  const totals: Record<string, number> = {};
  for (const tier of table.tierNames) {
    totals[`${tier} read`] = 0;
    totals[`${tier} writeback`] = 0;
  }
  for (const row of table.rows) {
    for (const tier of table.tierNames) {
      totals[`${tier} read`] += row.tiers[tier].read_bytes;
      totals[`${tier} writeback`] += row.tiers[tier].writeback_bytes;
    }
  }
  return totals;
}
