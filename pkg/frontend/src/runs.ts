/** Loading one cadam run directory (the harness's file contract). */

import { readFileSync, existsSync } from "fs";
import { join, basename } from "path";

import { parseCsv, requireColumns, Table } from "./csv.js";

export const TRACE_COLUMNS = [
  "t", "loss", "avg_regret", "x0", "psi_min", "lambda_min", "lambda_max",
  "grad_inf", "lr_eff_min", "lr_eff_max",
];

export interface RunDir {
  path: string;
  label: string;
  manifest: Record<string, unknown>;
  summary: Record<string, unknown>;
  trace: Table;
  valTrace: Table | null;
  points: Table | null;
}

export function loadRun(path: string): RunDir {
  const manifest = JSON.parse(readFileSync(join(path, "manifest.json"), "utf8"));
  const summary = JSON.parse(readFileSync(join(path, "summary.json"), "utf8"));
  const trace = parseCsv(readFileSync(join(path, "trace.csv"), "utf8"));
  requireColumns(trace, TRACE_COLUMNS, join(path, "trace.csv"));

  let valTrace: Table | null = null;
  const valPath = join(path, "val_trace.csv");
  if (existsSync(valPath)) {
    valTrace = parseCsv(readFileSync(valPath, "utf8"));
    requireColumns(valTrace, ["t", "val_loss", "val_accuracy"], valPath);
  }
  let points: Table | null = null;
  const ptsPath = join(path, "points.csv");
  if (existsSync(ptsPath)) {
    points = parseCsv(readFileSync(ptsPath, "utf8"));
    requireColumns(points, ["x1", "x2", "label"], ptsPath);
  }
  const label = typeof manifest.optimizer === "string"
    ? (manifest.optimizer as string)
    : basename(path);
  return { path, label, manifest, summary, trace, valTrace, points };
}

/** Labels must be unique in a figure legend; suffix duplicates. */
export function uniqueLabels(runs: RunDir[]): string[] {
  const seen = new Map<string, number>();
  return runs.map((r) => {
    const n = (seen.get(r.label) ?? 0) + 1;
    seen.set(r.label, n);
    return n === 1 ? r.label : `${r.label}_${n}`;
  });
}
