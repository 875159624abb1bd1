#!/usr/bin/env node
/**
 * ecfm-figs <report-dir> --out <dir>
 *
 * Renders one SVG per figure the given run directory supports.  The report
 * dir is either a single run (contains report.json / CSV files) or a parent
 * whose subdirectories are runs; every discovered run is processed.
 */

import { existsSync, mkdirSync, readdirSync, statSync, writeFileSync } from "fs";
import { basename, join } from "path";
import { SchemaError } from "./csv.js";
import { planFigures, render } from "./report.js";

function findRunDirs(root: string): string[] {
  const specsHere = planFigures(root);
  if (specsHere.length > 0) {
    return [root];
  }
  const runs: string[] = [];
  const walk = (dir: string, depth: number) => {
    if (depth > 3) return;
    for (const name of readdirSync(dir)) {
      const path = join(dir, name);
      if (!statSync(path).isDirectory()) continue;
      if (planFigures(path).length > 0) {
        runs.push(path);
      } else {
        walk(path, depth + 1);
      }
    }
  };
  walk(root, 0);
  return runs.sort();
}

export function main(argv: string[]): number {
  const args = argv.slice(2);
  let outDir = "figures";
  const positional: string[] = [];
  for (let i = 0; i < args.length; i++) {
    if (args[i] === "--out") {
      outDir = args[++i];
    } else {
      positional.push(args[i]);
    }
  }
  if (positional.length !== 1) {
    console.error("usage: ecfm-figs <report-dir> --out <dir>");
    return 2;
  }
  const root = positional[0];
  if (!existsSync(root)) {
    console.error(`report dir does not exist: ${root}`);
    return 2;
  }
  let runs: string[];
  try {
    runs = findRunDirs(root);
  } catch (err) {
    console.error(String(err));
    return 1;
  }
  if (runs.length === 0) {
    console.error(`no renderable runs found under ${root}`);
    return 1;
  }
  let total = 0;
  for (const run of runs) {
    const target = run === root ? outDir : join(outDir, basename(run));
    mkdirSync(target, { recursive: true });
    for (const spec of planFigures(run)) {
      try {
        const svg = render(spec);
        const outPath = join(target, spec.outName);
        writeFileSync(outPath, svg);
        console.log(`wrote ${outPath}`);
        total += 1;
      } catch (err) {
        if (err instanceof SchemaError) {
          console.error(`schema error in ${spec.source}: ${err.message}`);
          return 1;
        }
        throw err;
      }
    }
  }
  console.log(`${total} figure(s) rendered from ${runs.length} run(s)`);
  return 0;
}

const isDirectRun = process.argv[1] !== undefined &&
  import.meta.url.endsWith(basename(process.argv[1]));
if (isDirectRun) {
  process.exit(main(process.argv));
}
