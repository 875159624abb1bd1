import { mkdtempSync, mkdirSync, readFileSync, writeFileSync, existsSync } from "fs";
import { tmpdir } from "os";
import { join } from "path";
import { describe, expect, it } from "vitest";

import { parseCsv, SchemaError } from "../src/csv.js";
import {
  renderBars,
  renderField2d,
  renderFieldFamily,
  renderSurface,
  renderTrace,
} from "../src/figures.js";
import { planFigures, render } from "../src/report.js";
import { main } from "../src/cli.js";

function surfaceCsv(): string {
  const lines = ["eps1,eps2,objective"];
  for (const e1 of [1.0, 1.5, 2.0]) {
    for (const e2 of [0.5, 1.0, 1.5]) {
      const v = (e1 - 1.5) ** 2 + 2 * (e2 - 1.0) ** 2;
      lines.push(`${e1},${e2},${v}`);
    }
  }
  return lines.join("\n") + "\n";
}

function fieldCsv(n = 5): string {
  const lines = ["x1,x2,value"];
  for (let i = 0; i < n; i++) {
    for (let j = 0; j < n; j++) {
      const x = i / (n - 1);
      const y = j / (n - 1);
      lines.push(`${x},${y},${Math.sin(Math.PI * x) * Math.sin(Math.PI * y)}`);
    }
  }
  return lines.join("\n") + "\n";
}

describe("csv parsing", () => {
  it("parses a numeric table", () => {
    const t = parseCsv("a,b\r\n1,2\r\n3.5,-4e-2\r\n");
    expect(t.header).toEqual(["a", "b"]);
    expect(t.rows).toEqual([[1, 2], [3.5, -0.04]]);
  });

  it("rejects ragged rows and non-numeric cells", () => {
    expect(() => parseCsv("a,b\n1\n")).toThrow(SchemaError);
    expect(() => parseCsv("a,b\n1,zap\n")).toThrow(SchemaError);
  });
});

describe("surface", () => {
  it("marks the grid minimum", () => {
    const svg = renderSurface(parseCsv(surfaceCsv()), "surface.csv", "t");
    // minimum sits at (1.5, 1.0), the center of both axes: the marker circle
    // lands at the midpoint of the plotting area
    expect(svg).toContain("<circle");
    const match = svg.match(/<circle cx="([\d.]+)" cy="([\d.]+)" r="6"/);
    expect(match).not.toBeNull();
    const cx = Number(match![1]);
    expect(Math.abs(cx - (64 + (640 - 64 - 88) / 2))).toBeLessThan(1.0);
  });

  it("rejects incomplete grids", () => {
    const rows = surfaceCsv().trim().split("\n");
    rows.pop();
    expect(() => renderSurface(parseCsv(rows.join("\n")), "surface.csv", "t"))
      .toThrow(SchemaError);
  });
});

describe("trace", () => {
  it("passes the series through monotonically", () => {
    const values = [5.0, 2.5, 1.2, 0.6, 0.3];
    const csv = "epoch,objective\n" + values.map((v, i) => `${i},${v}`).join("\n");
    const svg = renderTrace(parseCsv(csv), "trace.csv", "t");
    const match = svg.match(/<polyline points="([^"]+)"/);
    expect(match).not.toBeNull();
    const ys = match![1].split(" ").map((p) => Number(p.split(",")[1]));
    for (let i = 1; i < ys.length; i++) {
      expect(ys[i]).toBeGreaterThan(ys[i - 1]); // screen y grows as objective falls
    }
  });

  it("rejects wrong column names", () => {
    expect(() => renderTrace(parseCsv("epoch,loss\n0,1\n"), "trace.csv", "t"))
      .toThrow(SchemaError);
  });
});

describe("2d fields", () => {
  it("renders a full grid with one cell per sample", () => {
    const svg = renderField2d(parseCsv(fieldCsv()), "field.csv", "t");
    const cells = svg.match(/<rect/g) ?? [];
    expect(cells.length).toBeGreaterThanOrEqual(25);
  });
});

describe("field family", () => {
  it("draws the band and both mean curves", () => {
    const lines = ["x,mean,std,truth_mean,truth_std"];
    for (let i = 0; i <= 10; i++) {
      const x = i / 10;
      lines.push(`${x},${Math.sin(x)},0.1,${Math.sin(x) + 0.02},0.12`);
    }
    const svg = renderFieldFamily(parseCsv(lines.join("\n")), "field_family.csv", "t");
    expect(svg).toContain("<polygon");
    expect((svg.match(/<polyline/g) ?? []).length).toBeGreaterThanOrEqual(3);
    expect(() => renderFieldFamily(parseCsv("x,mean\n0,1\n"), "f.csv", "t"))
      .toThrow(SchemaError);
  });
});

describe("force bars", () => {
  it("renders beam-style (x, lambda) bars", () => {
    const svg = renderBars(parseCsv("x,lambda\n0.2,0.5\n0.4,-0.25\n0.6,0.1\n"), "forces.csv", "t");
    expect((svg.match(/<rect/g) ?? []).length).toBeGreaterThanOrEqual(4);
  });

  it("renders the final row of dynamic force series", () => {
    const csv = "t,lambda1,lambda2\n0,0,0\n0.5,0.3,-0.2\n1.0,0.6,-0.4\n";
    const svg = renderBars(parseCsv(csv), "forces.csv", "t");
    expect((svg.match(/<rect/g) ?? []).length).toBeGreaterThanOrEqual(3);
  });
});

describe("determinism", () => {
  it("re-render is byte-stable", () => {
    const table = parseCsv(surfaceCsv());
    const a = renderSurface(table, "surface.csv", "t");
    const b = renderSurface(table, "surface.csv", "t");
    expect(a).toBe(b);
  });
});

function fixtureRun(dir: string): void {
  mkdirSync(dir, { recursive: true });
  writeFileSync(join(dir, "report.json"), JSON.stringify({
    experiment: "KppEcfm",
    recovered_params: [1.0, 2.0],
    objective_trace: [3.0, 1.0],
    final_constraint_forces: [0.1],
    error_metrics: { objective: 1.0 },
  }));
  writeFileSync(join(dir, "trace.csv"), "iteration,objective\n0,3.0\n1,1.0\n");
  writeFileSync(join(dir, "field_recovered.csv"), fieldCsv());
  writeFileSync(join(dir, "source_sum.csv"), fieldCsv());
  writeFileSync(join(dir, "force_field.csv"), fieldCsv());
  writeFileSync(join(dir, "forces.csv"), "x1,x2,lambda\n0.25,0.25,0.5\n0.75,0.75,-0.2\n");
}

describe("command line", () => {
  it("renders every figure a run supports and exits zero", () => {
    const root = mkdtempSync(join(tmpdir(), "figs-"));
    const run = join(root, "KppEcfm", "20240101T000000Z");
    fixtureRun(run);
    writeFileSync(join(root, "surfdir-note.txt"), "not a run");
    const out = join(root, "figures");
    const code = main(["node", "ecfm-figs", root, "--out", out]);
    expect(code).toBe(0);
    const target = join(out, "20240101T000000Z");
    for (const name of ["trace.svg", "field_recovered.svg", "source_sum.svg",
                        "force_field.svg", "forces.svg"]) {
      expect(existsSync(join(target, name))).toBe(true);
      expect(readFileSync(join(target, name), "utf-8")).toContain("<svg");
    }
  });

  it("fails with a schema error on malformed inputs", () => {
    const root = mkdtempSync(join(tmpdir(), "figs-bad-"));
    const run = join(root, "run");
    fixtureRun(run);
    writeFileSync(join(run, "trace.csv"), "epoch,objective\n0,not-a-number\n");
    const code = main(["node", "ecfm-figs", run, "--out", join(root, "figs")]);
    expect(code).toBe(1);
  });

  it("reports missing directories", () => {
    expect(main(["node", "ecfm-figs", "/definitely/not/here", "--out", "x"])).toBe(2);
  });

  it("plans the documented figure classes", () => {
    const root = mkdtempSync(join(tmpdir(), "figs-plan-"));
    const run = join(root, "run");
    fixtureRun(run);
    writeFileSync(join(run, "surface.csv"), surfaceCsv());
    const kinds = planFigures(run).map((s) => s.kind);
    expect(kinds).toContain("surface");
    expect(kinds).toContain("trace");
    expect(kinds).toContain("field2d");
    expect(kinds).toContain("barDiscrepancy");
    for (const spec of planFigures(run)) {
      expect(render(spec)).toContain("</svg>");
    }
  });
});
