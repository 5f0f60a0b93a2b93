/** The five figure kinds, all rendered from run-directory files only.
 *
 * These scripts never recompute losses, regret or boundaries; they plot
 * exactly what the harness wrote.  Optional smoothing is a display-only
 * moving average, off by default and labelled on the axis when on.
 */

import { numericColumn, SchemaMismatch } from "./csv.js";
import { RunDir, uniqueLabels } from "./runs.js";
import { boundaryChart, lineChart, PALETTE, Series } from "./svg.js";

export const KINDS = ["trajectory", "regret", "train-loss", "val-loss", "boundary"] as const;
export type Kind = (typeof KINDS)[number];

function movingAverage(values: number[], window: number): number[] {
  if (window <= 1) return values;
  const out: number[] = [];
  let acc = 0;
  const queue: number[] = [];
  for (const v of values) {
    queue.push(v);
    acc += v;
    if (queue.length > window) acc -= queue.shift()!;
    out.push(acc / queue.length);
  }
  return out;
}

function traceSeries(runs: RunDir[], column: string, smooth: number): Series[] {
  const labels = uniqueLabels(runs);
  return runs.map((run, i) => {
    const y = numericColumn(run.trace, column);
    if (y.every((v) => Number.isNaN(v))) {
      throw new SchemaMismatch(column, `${run.path}/trace.csv (column is empty)`);
    }
    return {
      label: labels[i],
      x: numericColumn(run.trace, "t"),
      y: movingAverage(y, smooth),
      color: PALETTE[i % PALETTE.length],
    };
  });
}

function valSeries(runs: RunDir[], smooth: number): Series[] {
  const labels = uniqueLabels(runs);
  return runs.map((run, i) => {
    if (!run.valTrace) {
      throw new SchemaMismatch("val_loss", `${run.path} (no val_trace.csv)`);
    }
    return {
      label: labels[i],
      x: numericColumn(run.valTrace, "t"),
      y: movingAverage(numericColumn(run.valTrace, "val_loss"), smooth),
      color: PALETTE[i % PALETTE.length],
    };
  });
}

/** Intersection of w1*x + w2*y + b = 0 with the [-1,1] square. */
function clipBoundary(w1: number, w2: number, b: number): [number[], number[]] {
  const pts: [number, number][] = [];
  for (const x of [-1, 1]) {
    if (w2 !== 0) {
      const y = -(b + w1 * x) / w2;
      if (y >= -1 && y <= 1) pts.push([x, y]);
    }
  }
  for (const y of [-1, 1]) {
    if (w1 !== 0) {
      const x = -(b + w2 * y) / w1;
      if (x >= -1 && x <= 1) pts.push([x, y]);
    }
  }
  const distinct: [number, number][] = [];
  for (const p of pts) {
    if (!distinct.some((q) => Math.abs(q[0] - p[0]) + Math.abs(q[1] - p[1]) < 1e-9)) {
      distinct.push(p);
    }
  }
  if (distinct.length < 2) return [[0, 0], [0, 0]];
  return [[distinct[0][0], distinct[1][0]], [distinct[0][1], distinct[1][1]]];
}

export function render(kind: Kind, runs: RunDir[], smooth = 1): string {
  const suffix = smooth > 1 ? ` (moving avg ${smooth})` : "";
  switch (kind) {
    case "trajectory":
      return lineChart(traceSeries(runs, "x0", smooth), "iteration",
                       `x${suffix}`, "iterate versus iterations");
    case "regret":
      return lineChart(traceSeries(runs, "avg_regret", smooth), "iteration",
                       `average regret${suffix}`, "average regret versus iterations");
    case "train-loss":
      return lineChart(traceSeries(runs, "loss", smooth), "iteration",
                       `training loss${suffix}`, "training loss versus iterations");
    case "val-loss":
      return lineChart(valSeries(runs, smooth), "iteration",
                       `validation loss${suffix}`, "validation loss versus iterations");
    case "boundary": {
      const base = runs[0];
      if (!base.points) {
        throw new SchemaMismatch("x1", `${base.path} (no points.csv)`);
      }
      const x1 = numericColumn(base.points, "x1");
      const x2 = numericColumn(base.points, "x2");
      const label = numericColumn(base.points, "label");
      const cls = (want: number) => ({
        x: x1.filter((_, i) => label[i] === want),
        y: x2.filter((_, i) => label[i] === want),
      });
      const truth = base.summary.true_boundary as number[];
      const [tx, ty] = clipBoundary(truth[0], truth[1], truth[2]);
      const labels = uniqueLabels(runs);
      const lines: Series[] = [
        { label: "true boundary", x: tx, y: ty, color: "#000000", dashed: true },
      ];
      runs.forEach((run, i) => {
        const learned = run.summary.learned_boundary as number[] | undefined;
        if (!learned) {
          throw new SchemaMismatch("learned_boundary", `${run.path}/summary.json`);
        }
        const [lx, ly] = clipBoundary(learned[0], learned[1], learned[2]);
        lines.push({ label: `${labels[i]} boundary`, x: lx, y: ly,
                     color: PALETTE[i % PALETTE.length] });
      });
      return boundaryChart(
        [{ label: "class 0", ...cls(0), color: "#2ca02c" },
         { label: "class 1", ...cls(1), color: "#1f77b4" }],
        lines, "data, true boundary and learned boundaries");
    }
  }
}
