import { mkdtempSync, readFileSync, writeFileSync } from "fs";
import { tmpdir } from "os";
import * as path from "path";
import { describe, expect, it } from "vitest";

import { loadRun, median, num, parseCsv, quantile, SchemaError } from "../src/data.js";
import { buildFigure, Kind, logLogFit } from "../src/figures.js";
import { render } from "../src/render.js";

const FIXTURES = path.join(__dirname, "fixtures");
const CASES: [Kind, string][] = [
  ["convergence", "converge"],
  ["persistence", "persistence"],
  ["weights", "silo"],
  ["diagnostics", "diagnose"],
];

describe("data layer", () => {
  it("parses producer floats including inf and nan", () => {
    expect(num("0.5")).toBe(0.5);
    expect(num("inf")).toBe(Infinity);
    expect(num("-inf")).toBe(-Infinity);
    expect(Number.isNaN(num("nan"))).toBe(true);
    expect(() => num("wat")).toThrow(SchemaError);
  });

  it("parses csv into keyed rows", () => {
    const rows = parseCsv("a,b\n1,2\n3,4\n");
    expect(rows).toEqual([{ a: "1", b: "2" }, { a: "3", b: "4" }]);
  });

  it("median and quantile skip non-finite values", () => {
    expect(median([1, 2, Infinity, 3])).toBe(2);
    expect(quantile([0, 1, 2, 3, 4], 0.5)).toBe(2);
  });

  it("rejects manifests without required entries", () => {
    const dir = mkdtempSync(path.join(tmpdir(), "plots-"));
    const manifest = path.join(dir, "manifest.json");
    writeFileSync(manifest, JSON.stringify({ files: [] }));
    expect(() => loadRun(manifest)).toThrow(SchemaError);
  });
});

describe("figures", () => {
  it.each(CASES)("renders %s from the checked-in manifest", (kind, dir) => {
    const run = loadRun(path.join(FIXTURES, dir, "manifest.json"));
    const svg = buildFigure(kind, run);
    expect(svg.startsWith("<svg")).toBe(true);
    expect(svg).toContain("</svg>");
  });

  it("is byte-identical across re-renders", () => {
    const out = mkdtempSync(path.join(tmpdir(), "plots-"));
    for (const [kind, dir] of CASES) {
      const manifest = path.join(FIXTURES, dir, "manifest.json");
      const a = path.join(out, `${kind}-a.svg`);
      const b = path.join(out, `${kind}-b.svg`);
      render(manifest, kind, a);
      render(manifest, kind, b);
      expect(readFileSync(a, "utf-8")).toBe(readFileSync(b, "utf-8"));
    }
  });

  it("annotates the persistence figure with the fitted slope", () => {
    const run = loadRun(path.join(FIXTURES, "persistence", "manifest.json"));
    const svg = buildFigure("persistence", run);
    expect(svg).toContain("fitted log-log slope");
  });

  it("fits a clean power law exactly", () => {
    const alpha = [0.1, 0.2, 0.4, 0.8];
    const p = alpha.map((a) => 2.0 * Math.pow(a, 0.375));
    const [slope, se] = logLogFit(alpha, p);
    expect(slope).toBeCloseTo(0.375, 10);
    expect(se).toBeLessThan(1e-10);
  });

  it("raises a schema error on missing columns", () => {
    const run = loadRun(path.join(FIXTURES, "silo", "manifest.json"));
    const broken = { ...run, rows: run.rows.map(({ mass, ...rest }) => rest) };
    expect(() => buildFigure("weights", broken)).toThrow(SchemaError);
  });

  it("raises a schema error on empty data", () => {
    const run = loadRun(path.join(FIXTURES, "converge", "manifest.json"));
    expect(() => buildFigure("convergence", { ...run, rows: [] }))
      .toThrow(SchemaError);
  });

  it("never mutates its inputs", () => {
    const run = loadRun(path.join(FIXTURES, "diagnose", "manifest.json"));
    const before = JSON.stringify(run.rows);
    buildFigure("diagnostics", run);
    expect(JSON.stringify(run.rows)).toBe(before);
  });
});
