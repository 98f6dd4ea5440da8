#!/usr/bin/env node
/**
 * tiersim-plot — render simulator CSV outputs as SVG figures.
 *
 * Usage:
 *   tiersim-plot --kind traffic     --in runs/static-1pct/epochs.csv --out traffic.svg
 *   tiersim-plot --kind relocations --in runs/remap-1pct/epochs.csv  --out relocations.svg
 *   tiersim-plot --kind summary     --in runs/summary.csv            --out summary.svg
 *
 * `traffic` and `relocations` accept several --in files and emit one figure
 * per input, suffixing the output name (`traffic-1.svg`, ...) past the first.
 */

import { readFileSync, writeFileSync } from "node:fs";
import { basename } from "node:path";

import { parseEpochCsv, parseSummaryCsv } from "./csv.js";
import { PLOT_KINDS, PlotKind, relocationsPlot, summaryPlot, trafficPlot } from "./plots.js";

interface Args {
  kind: PlotKind;
  inputs: string[];
  out: string;
}

function usage(): never {
  console.error(
    "usage: tiersim-plot --kind traffic|relocations|summary --in CSV [CSV...] --out IMG",
  );
  process.exit(2);
}

export function parseArgs(argv: string[]): Args {
  let kind: string | undefined;
  const inputs: string[] = [];
  let out: string | undefined;
  for (let i = 0; i < argv.length; i++) {
    const a = argv[i];
    if (a === "--kind") kind = argv[++i];
    else if (a === "--out") out = argv[++i];
    else if (a === "--in") {
      while (i + 1 < argv.length && !argv[i + 1].startsWith("--")) inputs.push(argv[++i]);
    } else usage();
  }
  if (!kind || !out || inputs.length === 0) usage();
  if (!PLOT_KINDS.includes(kind as PlotKind)) {
    console.error(`error: unknown plot kind ${JSON.stringify(kind)}`);
    process.exit(2);
  }
  return { kind: kind as PlotKind, inputs, out };
}

function outPath(base: string, index: number): string {
  if (index === 0) return base;
  const dot = base.lastIndexOf(".");
  return dot < 0 ? `${base}-${index}` : `${base.slice(0, dot)}-${index}${base.slice(dot)}`;
}

function runLabel(path: string): string {
  // runs/<label>/epochs.csv -> <label>; otherwise the file stem
  const parts = path.split(/[\\/]/).filter(Boolean);
  if (parts.length >= 2 && basename(path).startsWith("epochs")) {
    return parts[parts.length - 2];
  }
  return basename(path).replace(/\.[^.]*$/, "");
}

export function main(argv: string[]): number {
  const args = parseArgs(argv);
  try {
    if (args.kind === "summary") {
      const rows = parseSummaryCsv(readFileSync(args.inputs[0], "utf-8"));
      writeFileSync(args.out, summaryPlot(rows));
      console.log(`wrote ${args.out}`);
      return 0;
    }
    args.inputs.forEach((input, i) => {
      const table = parseEpochCsv(readFileSync(input, "utf-8"));
      const svg =
        args.kind === "traffic"
          ? trafficPlot(table, runLabel(input))
          : relocationsPlot(table, runLabel(input));
      const path = outPath(args.out, i);
      writeFileSync(path, svg);
      console.log(`wrote ${path}`);
    });
    return 0;
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : err}`);
    return 1;
  }
}

// run only when invoked directly, not when imported by tests
if (process.argv[1] && /cli\.(js|ts)$/.test(process.argv[1])) {
  process.exit(main(process.argv.slice(2)));
}
