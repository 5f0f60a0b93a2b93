/** Minimal deterministic SVG chart primitives.
 *
 * Every coordinate goes through one fixed-precision formatter and the
 * output carries no timestamps or environment state, so a figure's bytes
 * depend only on its inputs.
 */

export const WIDTH = 720;
export const HEIGHT = 440;
export const MARGIN = { left: 64, right: 16, top: 28, bottom: 44 };

export const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

export const fmt = (x: number): string => {
  const s = x.toFixed(2);
  return s === "-0.00" ? "0.00" : s;
};

export interface Scale {
  (value: number): number;
  domain: [number, number];
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  let [d0, d1] = domain;
  if (d0 === d1) {
    d0 -= 1;
    d1 += 1;
  }
  const f = ((value: number) =>
    range[0] + ((value - d0) / (d1 - d0)) * (range[1] - range[0])) as Scale;
  f.domain = [d0, d1];
  return f;
}

export function extent(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (Number.isFinite(v)) {
      if (v < lo) lo = v;
      if (v > hi) hi = v;
    }
  }
  if (lo === Infinity) return [0, 1];
  return [lo, hi];
}

export function ticks(domain: [number, number], count = 5): number[] {
  const span = domain[1] - domain[0];
  const step = Math.pow(10, Math.floor(Math.log10(span / count)));
  const err = (count * step) / span;
  const mult = err <= 0.15 ? 10 : err <= 0.35 ? 5 : err <= 0.75 ? 2 : 1;
  const s = step * mult;
  const start = Math.ceil(domain[0] / s) * s;
  const out: number[] = [];
  for (let v = start; v <= domain[1] + s * 1e-9; v += s) out.push(v);
  return out;
}

/** One formatter per axis, chosen from the largest tick magnitude. */
const tickFormatter = (values: number[]): ((v: number) => string) => {
  const biggest = Math.max(...values.map((v) => Math.abs(v)), 0);
  if (biggest !== 0 && (biggest >= 1e5 || biggest < 1e-3)) {
    return (v) => (v === 0 ? "0" : v.toExponential(1).replace("e+", "e"));
  }
  return (v) => String(Number(v.toPrecision(6)));
};

export interface Series {
  label: string;
  x: number[];
  y: number[];
  color: string;
  dashed?: boolean;
}

function axes(xs: Scale, ys: Scale, xLabel: string, yLabel: string, title: string): string[] {
  const out: string[] = [];
  const x0 = MARGIN.left;
  const x1 = WIDTH - MARGIN.right;
  const y0 = HEIGHT - MARGIN.bottom;
  const y1 = MARGIN.top;
  out.push(`<text x="${fmt(WIDTH / 2)}" y="18" text-anchor="middle" class="title">${title}</text>`);
  out.push(`<line x1="${fmt(x0)}" y1="${fmt(y0)}" x2="${fmt(x1)}" y2="${fmt(y0)}" class="axis"/>`);
  out.push(`<line x1="${fmt(x0)}" y1="${fmt(y0)}" x2="${fmt(x0)}" y2="${fmt(y1)}" class="axis"/>`);
  const xTicks = ticks(xs.domain);
  const xLabelOf = tickFormatter(xTicks);
  for (const t of xTicks) {
    const px = xs(t);
    out.push(`<line x1="${fmt(px)}" y1="${fmt(y0)}" x2="${fmt(px)}" y2="${fmt(y0 + 5)}" class="axis"/>`);
    out.push(`<text x="${fmt(px)}" y="${fmt(y0 + 18)}" text-anchor="middle" class="tick">${xLabelOf(t)}</text>`);
  }
  const yTicks = ticks(ys.domain);
  const yLabelOf = tickFormatter(yTicks);
  for (const t of yTicks) {
    const py = ys(t);
    out.push(`<line x1="${fmt(x0 - 5)}" y1="${fmt(py)}" x2="${fmt(x0)}" y2="${fmt(py)}" class="axis"/>`);
    out.push(`<text x="${fmt(x0 - 8)}" y="${fmt(py + 3.5)}" text-anchor="end" class="tick">${yLabelOf(t)}</text>`);
  }
  out.push(`<text x="${fmt((x0 + x1) / 2)}" y="${fmt(HEIGHT - 8)}" text-anchor="middle" class="label">${xLabel}</text>`);
  out.push(`<text x="14" y="${fmt((y0 + y1) / 2)}" text-anchor="middle" class="label" transform="rotate(-90 14 ${fmt((y0 + y1) / 2)})">${yLabel}</text>`);
  return out;
}

function legend(entries: { label: string; color: string; dashed?: boolean }[]): string[] {
  const out: string[] = [];
  entries.forEach((e, i) => {
    const y = MARGIN.top + 10 + i * 16;
    const x = WIDTH - MARGIN.right - 150;
    const dash = e.dashed ? ' stroke-dasharray="6 3"' : "";
    out.push(`<line x1="${fmt(x)}" y1="${fmt(y)}" x2="${fmt(x + 22)}" y2="${fmt(y)}" stroke="${e.color}" stroke-width="2"${dash}/>`);
    out.push(`<text x="${fmt(x + 28)}" y="${fmt(y + 3.5)}" class="tick">${e.label}</text>`);
  });
  return out;
}

const STYLE = `<style>
.title{font:14px sans-serif}.label{font:12px sans-serif}
.tick{font:10px sans-serif}.axis{stroke:#333;stroke-width:1}
</style>`;

export function document(body: string[]): string {
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}">`,
    STYLE,
    `<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`,
    ...body,
    "</svg>",
    "",
  ].join("\n");
}

export function lineChart(series: Series[], xLabel: string, yLabel: string,
                          title: string): string {
  const xs = linearScale(extent(series.flatMap((s) => s.x)),
                         [MARGIN.left, WIDTH - MARGIN.right]);
  const ys = linearScale(extent(series.flatMap((s) => s.y)),
                         [HEIGHT - MARGIN.bottom, MARGIN.top]);
  const body = axes(xs, ys, xLabel, yLabel, title);
  for (const s of series) {
    const pts: string[] = [];
    for (let i = 0; i < s.x.length; i++) {
      if (Number.isFinite(s.x[i]) && Number.isFinite(s.y[i])) {
        pts.push(`${fmt(xs(s.x[i]))},${fmt(ys(s.y[i]))}`);
      }
    }
    const dash = s.dashed ? ' stroke-dasharray="6 3"' : "";
    body.push(`<polyline points="${pts.join(" ")}" fill="none" stroke="${s.color}" stroke-width="1.5"${dash}/>`);
  }
  body.push(...legend(series));
  return document(body);
}

export interface ScatterClass {
  label: string;
  x: number[];
  y: number[];
  color: string;
}

/** Scatter over [-1,1]^2 plus boundary line segments clipped to the square. */
export function boundaryChart(classes: ScatterClass[],
                              lines: Series[], title: string): string {
  const xs = linearScale([-1.05, 1.05], [MARGIN.left, WIDTH - MARGIN.right]);
  const ys = linearScale([-1.05, 1.05], [HEIGHT - MARGIN.bottom, MARGIN.top]);
  const body = axes(xs, ys, "x1", "x2", title);
  for (const c of classes) {
    const dots: string[] = [];
    for (let i = 0; i < c.x.length; i++) {
      dots.push(`<circle cx="${fmt(xs(c.x[i]))}" cy="${fmt(ys(c.y[i]))}" r="1.2" fill="${c.color}" fill-opacity="0.45"/>`);
    }
    body.push(dots.join(""));
  }
  for (const l of lines) {
    const dash = l.dashed ? ' stroke-dasharray="6 3"' : "";
    body.push(`<line x1="${fmt(xs(l.x[0]))}" y1="${fmt(ys(l.y[0]))}" x2="${fmt(xs(l.x[1]))}" y2="${fmt(ys(l.y[1]))}" stroke="${l.color}" stroke-width="2"${dash}/>`);
  }
  body.push(...legend([
    ...classes.map((c) => ({ label: c.label, color: c.color })),
    ...lines.map((l) => ({ label: l.label, color: l.color, dashed: l.dashed })),
  ]));
  return document(body);
}
