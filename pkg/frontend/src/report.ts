/**
 * Report-directory discovery: map the files a solver run writes to the
 * figures they feed, validating each against its expected schema before
 * rendering anything.
 */

import { readdirSync, readFileSync } from "fs";
import { join } from "path";
import { parseCsv, SchemaError, Table } from "./csv.js";
import {
  renderBars,
  renderField2d,
  renderFieldFamily,
  renderSurface,
  renderTrace,
} from "./figures.js";

export type FigureKind = "surface" | "trace" | "field2d" | "field1dFamily" | "barDiscrepancy";

export interface FigureSpec {
  kind: FigureKind;
  source: string; // CSV path
  title: string;
  outName: string; // file name of the SVG
}

export interface ReportInfo {
  experiment: string;
  recoveredParams: number[];
}

const FIELD_FILES: Record<string, string> = {
  "field_truth.csv": "data-generating field",
  "field_recovered.csv": "recovered field",
  "source_truth.csv": "true source term",
  "source_recovered.csv": "recovered source term",
  "force_field.csv": "constraint-force distribution",
  "source_sum.csv": "recovered source + constraint forces",
};

export function readReport(dir: string): ReportInfo | null {
  let text: string;
  try {
    text = readFileSync(join(dir, "report.json"), "utf-8");
  } catch {
    return null;
  }
  const payload = JSON.parse(text);
  for (const key of ["experiment", "recovered_params", "objective_trace", "error_metrics"]) {
    if (!(key in payload)) {
      throw new SchemaError(`report.json: missing required key "${key}"`);
    }
  }
  return { experiment: payload.experiment, recoveredParams: payload.recovered_params };
}

/** Plan the figure set for one run directory based on the files present. */
export function planFigures(dir: string): FigureSpec[] {
  const files = new Set(readdirSync(dir));
  const report = readReport(dir);
  const label = report ? report.experiment : "run";
  const specs: FigureSpec[] = [];
  if (files.has("surface.csv")) {
    specs.push({ kind: "surface", source: join(dir, "surface.csv"),
                 title: `${label}: loss surface`, outName: "surface.svg" });
  }
  if (files.has("trace.csv")) {
    specs.push({ kind: "trace", source: join(dir, "trace.csv"),
                 title: `${label}: objective trace`, outName: "trace.svg" });
  }
  for (const [file, caption] of Object.entries(FIELD_FILES)) {
    if (files.has(file)) {
      specs.push({ kind: "field2d", source: join(dir, file),
                   title: `${label}: ${caption}`,
                   outName: file.replace(".csv", ".svg") });
    }
  }
  if (files.has("field_family.csv")) {
    specs.push({ kind: "field1dFamily", source: join(dir, "field_family.csv"),
                 title: `${label}: deflection family`, outName: "field_family.svg" });
  }
  if (files.has("forces.csv")) {
    specs.push({ kind: "barDiscrepancy", source: join(dir, "forces.csv"),
                 title: `${label}: constraint forces`, outName: "forces.svg" });
  }
  return specs;
}

export function render(spec: FigureSpec): string {
  const table: Table = parseCsv(readFileSync(spec.source, "utf-8"));
  switch (spec.kind) {
    case "surface":
      return renderSurface(table, spec.source, spec.title);
    case "trace":
      return renderTrace(table, spec.source, spec.title);
    case "field2d":
      return renderField2d(table, spec.source, spec.title);
    case "field1dFamily":
      return renderFieldFamily(table, spec.source, spec.title);
    case "barDiscrepancy":
      return renderBars(table, spec.source, spec.title);
  }
}
