/**
 * Manifest loading and CSV parsing for pairweb run directories.
 *
 * A run directory holds manifest.json (file list with hashes), config.json,
 * data.csv and summary.json; see docs/schemas.md in the repository root.
 * Inputs are read only, never mutated.
 */

import { readFileSync } from "fs";
import * as path from "path";

export class SchemaError extends Error {}

export interface RunData {
  command: string;
  rows: Record<string, string>[];
  summary: Record<string, unknown>;
  config: Record<string, unknown>;
}

/** Parse a float serialised by the producer ("inf"/"nan" literals allowed). */
export function num(value: string): number {
  if (value === "inf") return Infinity;
  if (value === "-inf") return -Infinity;
  if (value === "nan") return NaN;
  const x = Number(value);
  if (Number.isNaN(x) && value !== "nan") {
    throw new SchemaError(`not a number: ${JSON.stringify(value)}`);
  }
  return x;
}

/** Plain comma CSV with a header row; the producer never quotes fields. */
export function parseCsv(text: string): Record<string, string>[] {
  const lines = text.split("\n").filter((l) => l.length > 0);
  if (lines.length === 0) throw new SchemaError("empty CSV");
  const header = lines[0].split(",");
  return lines.slice(1).map((line) => {
    const cells = line.split(",");
    const row: Record<string, string> = {};
    header.forEach((name, k) => (row[name] = cells[k] ?? ""));
    return row;
  });
}

export function requireColumns(rows: Record<string, string>[],
                               columns: string[], what: string): void {
  if (rows.length === 0) {
    throw new SchemaError(`${what}: no data rows`);
  }
  for (const c of columns) {
    if (!(c in rows[0])) {
      throw new SchemaError(`${what}: missing column ${JSON.stringify(c)}`);
    }
  }
}

/** Load a run through its manifest; file names come from the manifest list. */
export function loadRun(manifestPath: string): RunData {
  let manifest: { command?: string; files?: { name: string }[] };
  try {
    manifest = JSON.parse(readFileSync(manifestPath, "utf-8"));
  } catch (err) {
    throw new SchemaError(`cannot read manifest ${manifestPath}: ${err}`);
  }
  if (!manifest.files || !manifest.command) {
    throw new SchemaError("manifest needs command and files entries");
  }
  const dir = path.dirname(manifestPath);
  const names = manifest.files.map((f) => f.name);
  const read = (name: string): string => {
    if (!names.includes(name)) {
      throw new SchemaError(`manifest lists no ${name}`);
    }
    return readFileSync(path.join(dir, name), "utf-8");
  };
  const rows = names.includes("data.csv") ? parseCsv(read("data.csv")) : [];
  const summary = names.includes("summary.json")
    ? JSON.parse(read("summary.json")) : {};
  const config = JSON.parse(read("config.json"));
  return { command: manifest.command, rows, summary, config };
}

export function median(values: number[]): number {
  const xs = values.filter((v) => Number.isFinite(v)).sort((a, b) => a - b);
  if (xs.length === 0) return NaN;
  const mid = Math.floor(xs.length / 2);
  return xs.length % 2 ? xs[mid] : 0.5 * (xs[mid - 1] + xs[mid]);
}

export function quantile(values: number[], q: number): number {
  const xs = values.filter((v) => Number.isFinite(v)).sort((a, b) => a - b);
  if (xs.length === 0) return NaN;
  const pos = q * (xs.length - 1);
  const lo = Math.floor(pos);
  const hi = Math.min(lo + 1, xs.length - 1);
  return xs[lo] + (pos - lo) * (xs[hi] - xs[lo]);
}
