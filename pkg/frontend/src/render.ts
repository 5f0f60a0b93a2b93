/** CLI: render one figure kind from one or more run directories.
 *
 *   node dist/render.js --runs RUN_DIR [RUN_DIR...] --kind trajectory \
 *                       --out figure.svg [--smooth N]
 */

import { writeFileSync } from "fs";

import { SchemaMismatch } from "./csv.js";
import { KINDS, Kind, render } from "./figures.js";
import { loadRun } from "./runs.js";

interface Args {
  runs: string[];
  kind: Kind;
  out: string;
  smooth: number;
}

export function parseArgs(argv: string[]): Args {
  const runs: string[] = [];
  let kind: string | null = null;
  let out: string | null = null;
  let smooth = 1;
  for (let i = 0; i < argv.length; i++) {
    switch (argv[i]) {
      case "--runs":
        while (i + 1 < argv.length && !argv[i + 1].startsWith("--")) {
          runs.push(argv[++i]);
        }
        break;
      case "--kind":
        kind = argv[++i];
        break;
      case "--out":
        out = argv[++i];
        break;
      case "--smooth":
        smooth = Number(argv[++i]);
        break;
      default:
        throw new Error(`unknown argument ${argv[i]}`);
    }
  }
  if (runs.length === 0) throw new Error("--runs requires at least one run directory");
  if (!kind || !(KINDS as readonly string[]).includes(kind)) {
    throw new Error(`--kind must be one of ${KINDS.join(", ")}`);
  }
  if (!out) throw new Error("--out is required");
  if (!Number.isInteger(smooth) || smooth < 1) {
    throw new Error("--smooth must be a positive integer");
  }
  return { runs, kind: kind as Kind, out, smooth };
}

export function main(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error(`usage error: ${(err as Error).message}`);
    return 1;
  }
  try {
    const runs = args.runs.map(loadRun);
    writeFileSync(args.out, render(args.kind, runs, args.smooth));
    console.log(`wrote ${args.out}`);
    return 0;
  } catch (err) {
    if (err instanceof SchemaMismatch) {
      console.error(`schema mismatch: ${err.message}`);
      return 3;
    }
    console.error(`error: ${(err as Error).message}`);
    return 2;
  }
}

if (process.argv[1] && process.argv[1].endsWith("render.js")) {
  process.exit(main(process.argv.slice(2)));
}
