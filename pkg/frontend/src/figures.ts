/**
 * Figure renderers, one per figure class:
 *
 *   surface        loss-surface heatmap with the grid-minimum marked
 *   trace          objective value per optimizer iteration (data passthrough)
 *   field2d        scalar field on the unit square as a heatmap
 *   field1dFamily  beam deflection mean +/- spread vs the data-generating one
 *   barDiscrepancy constraint-force magnitude per measurement point
 *
 * Every renderer consumes a parsed table and returns the SVG text; rendering
 * is pure, so a re-render of the same inputs is byte-identical.
 */

import {
  band,
  colorbar,
  colormap,
  document,
  extent,
  fmt,
  frame,
  MARGIN,
  polyline,
  WIDTH,
  HEIGHT,
} from "./svg.js";
import { column, expectHeader, expectHeaderPrefix, SchemaError, Table } from "./csv.js";

function uniqueSorted(values: number[]): number[] {
  return [...new Set(values)].sort((a, b) => a - b);
}

/** Heatmap over an (x1, x2, value) long-form grid. */
function heatmap(table: Table, file: string, title: string,
                 cols: [string, string, string], mark?: "min"): string {
  expectHeader(table, cols, file);
  const xs = column(table, cols[0]);
  const ys = column(table, cols[1]);
  const vs = column(table, cols[2]);
  const gx = uniqueSorted(xs);
  const gy = uniqueSorted(ys);
  if (gx.length * gy.length !== table.rows.length) {
    throw new SchemaError(`${file}: rows do not form a full ${gx.length}x${gy.length} grid`);
  }
  const [lo, hi] = extent(vs);
  const f = frame({
    title,
    xLabel: cols[0],
    yLabel: cols[1],
    xDomain: extent(gx),
    yDomain: extent(gy),
  });
  const cw = (WIDTH - MARGIN.left - MARGIN.right) / gx.length;
  const ch = (HEIGHT - MARGIN.top - MARGIN.bottom) / gy.length;
  const cells: string[] = [];
  let best = 0;
  for (let i = 0; i < vs.length; i++) {
    if (vs[i] < vs[best]) best = i;
    const t = hi > lo ? (vs[i] - lo) / (hi - lo) : 0.5;
    const px = f.x(xs[i]) - cw / 2;
    const py = f.y(ys[i]) - ch / 2;
    cells.push(`<rect x="${fmt(px)}" y="${fmt(py)}" width="${fmt(cw + 0.5)}" ` +
               `height="${fmt(ch + 0.5)}" fill="${colormap(t)}"/>`);
  }
  const body = [f.body[0], ...cells, ...f.body.slice(1), colorbar(lo, hi, "value")];
  if (mark === "min") {
    body.push(`<circle cx="${fmt(f.x(xs[best]))}" cy="${fmt(f.y(ys[best]))}" r="6" ` +
              `fill="none" stroke="white" stroke-width="2"/>`);
    body.push(`<circle cx="${fmt(f.x(xs[best]))}" cy="${fmt(f.y(ys[best]))}" r="2" fill="white"/>`);
  }
  return document(body);
}

export function renderSurface(table: Table, file: string, title: string): string {
  return heatmap(table, file, title, ["eps1", "eps2", "objective"], "min");
}

export function renderField2d(table: Table, file: string, title: string): string {
  return heatmap(table, file, title, ["x1", "x2", "value"]);
}

export function renderTrace(table: Table, file: string, title: string): string {
  if (table.header.length !== 2 || table.header[1] !== "objective") {
    throw new SchemaError(`${file}: expected a two-column trace with an "objective" column`);
  }
  const steps = table.rows.map((r) => r[0]);
  const values = column(table, "objective");
  const f = frame({
    title,
    xLabel: table.header[0],
    yLabel: "objective",
    xDomain: extent(steps),
    yDomain: extent(values),
  });
  f.body.push(polyline(steps.map(f.x), values.map(f.y), "#2455a4", 1.8));
  return document(f.body);
}

export function renderFieldFamily(table: Table, file: string, title: string): string {
  expectHeader(table, ["x", "mean", "std", "truth_mean", "truth_std"], file);
  const x = column(table, "x");
  const mean = column(table, "mean");
  const std = column(table, "std");
  const tMean = column(table, "truth_mean");
  const tStd = column(table, "truth_std");
  const hiBand = mean.map((m, i) => m + std[i]);
  const loBand = mean.map((m, i) => m - std[i]);
  const yDomain = extent([
    ...loBand, ...hiBand,
    ...tMean.map((m, i) => m - tStd[i]),
    ...tMean.map((m, i) => m + tStd[i]),
  ]);
  const f = frame({ title, xLabel: "x", yLabel: "deflection", xDomain: extent(x), yDomain });
  const px = x.map(f.x);
  f.body.push(band(px, loBand.map(f.y), hiBand.map(f.y), "#2455a4"));
  f.body.push(polyline(px, mean.map(f.y), "#2455a4", 2));
  f.body.push(polyline(px, tMean.map((m, i) => f.y(m + tStd[i])), "#c23b22", 1, "5,3"));
  f.body.push(polyline(px, tMean.map((m, i) => f.y(m - tStd[i])), "#c23b22", 1, "5,3"));
  f.body.push(polyline(px, tMean.map(f.y), "#c23b22", 2, "5,3"));
  f.body.push(`<text x="${WIDTH - MARGIN.right - 6}" y="${MARGIN.top + 14}" text-anchor="end" ` +
              `font-size="11" font-family="sans-serif" fill="#2455a4">recovered mean +/- std</text>`);
  f.body.push(`<text x="${WIDTH - MARGIN.right - 6}" y="${MARGIN.top + 28}" text-anchor="end" ` +
              `font-size="11" font-family="sans-serif" fill="#c23b22">data-generating</text>`);
  return document(f.body);
}

export function renderBars(table: Table, file: string, title: string): string {
  // per-point constraint forces: beam files carry (x, lambda), dynamic files
  // carry (t, lambda1..lambdaC) and the final row is plotted
  let labels: number[];
  let values: number[];
  if (table.header.length === 2 && table.header[1] === "lambda") {
    expectHeader(table, ["x", "lambda"], file);
    labels = column(table, "x");
    values = column(table, "lambda");
  } else if (table.header[0] === "t") {
    expectHeaderPrefix(table, ["t"], file);
    const last = table.rows[table.rows.length - 1];
    labels = table.header.slice(1).map((_, i) => i + 1);
    values = last.slice(1);
  } else {
    expectHeader(table, ["x1", "x2", "lambda"], file);
    labels = table.rows.map((_, i) => i + 1);
    values = column(table, "lambda");
  }
  const yDomain = extent([0, ...values]);
  const f = frame({
    title,
    xLabel: table.header[0] === "t" ? "measurement point" : table.header[0],
    yLabel: "force magnitude",
    xDomain: extent(labels),
    yDomain,
  });
  const bw = Math.max(1, (WIDTH - MARGIN.left - MARGIN.right) / (values.length * 1.6));
  const zero = f.y(0);
  values.forEach((v, i) => {
    const px = f.x(labels[i]) - bw / 2;
    const py = f.y(v);
    const top = Math.min(py, zero);
    const h = Math.abs(zero - py);
    f.body.push(`<rect x="${fmt(px)}" y="${fmt(top)}" width="${fmt(bw)}" ` +
                `height="${fmt(h)}" fill="#2455a4"/>`);
  });
  f.body.push(polyline([MARGIN.left, WIDTH - MARGIN.right], [zero, zero], "#333", 1));
  return document(f.body);
}
