/**
 * render --manifest <path> --kind <kind> --out <file.svg>
 *
 * Reads a pairweb run through its manifest and writes one deterministic SVG
 * figure; rendering the same inputs twice gives identical bytes.
 * Exit codes: 0 success, 2 schema/usage problems, 1 I/O failures.
 */

import { mkdirSync, writeFileSync } from "fs";
import * as path from "path";
import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { loadRun, SchemaError } from "./data.js";
import { buildFigure, Kind, KINDS } from "./figures.js";

export function render(manifest: string, kind: Kind, out: string): void {
  const run = loadRun(manifest);
  const svg = buildFigure(kind, run);
  mkdirSync(path.dirname(out), { recursive: true });
  writeFileSync(out, svg);
}

export function main(argv: string[]): number {
  const args = yargs(argv)
    .option("manifest", { type: "string", demandOption: true,
                          describe: "run manifest.json" })
    .option("kind", { type: "string", demandOption: true,
                      choices: [...KINDS], describe: "figure kind" })
    .option("out", { type: "string", demandOption: true,
                     describe: "output .svg path" })
    .strict()
    .exitProcess(false)
    .parseSync();
  try {
    render(args.manifest, args.kind as Kind, args.out);
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`schema error: ${err.message}`);
      return 2;
    }
    console.error(`error: ${err}`);
    return 1;
  }
  console.log(`wrote ${args.out}`);
  return 0;
}

const invoked = process.argv[1] ?? "";
if (invoked.endsWith("render.js")) {
  process.exit(main(hideBin(process.argv)));
}
