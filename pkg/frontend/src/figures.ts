/**
 * The four figure kinds, each a pure function of a loaded run.
 *
 * convergence  - per-delta medians of each recorded statistic
 * persistence  - forward/dual probability vs window fraction, log-log,
 *                with the fitted slope and its standard error
 * weights      - histogram of the bead-count measure atoms
 * diagnostics  - corridor-diameter quantiles against the budget^(1/3) line
 */

import { median, num, quantile, requireColumns, RunData, SchemaError } from "./data.js";
import { Chart, COLORS, fmt, linearScale, logScale } from "./svg.js";

export const KINDS = ["convergence", "persistence", "weights",
                      "diagnostics"] as const;
export type Kind = (typeof KINDS)[number];

export function buildFigure(kind: Kind, run: RunData): string {
  switch (kind) {
    case "convergence": return convergence(run);
    case "persistence": return persistence(run);
    case "weights": return weights(run);
    case "diagnostics": return diagnostics(run);
    default:
      throw new SchemaError(`unknown figure kind ${JSON.stringify(kind)}`);
  }
}

function groupBy(rows: Record<string, string>[],
                 key: string): Map<string, Record<string, string>[]> {
  const out = new Map<string, Record<string, string>[]>();
  for (const row of rows) {
    const k = row[key];
    if (!out.has(k)) out.set(k, []);
    out.get(k)!.push(row);
  }
  return out;
}

function convergence(run: RunData): string {
  const stats = ["d_h", "s_discrete", "s_brownian", "mu_cos_integral"];
  requireColumns(run.rows, ["delta", ...stats], "convergence data");
  const groups = [...groupBy(run.rows, "delta").entries()]
    .sort((a, b) => num(b[0]) - num(a[0]));
  const deltas = groups.map(([d]) => num(d));
  const series = stats.map((s) =>
    groups.map(([, rows]) => median(rows.map((r) => num(r[s])))));
  const finite = series.flat().filter(Number.isFinite);
  const lo = Math.min(0, ...finite);
  const hi = Math.max(...finite);
  const chart = new Chart("per-scale medians across the delta ladder");
  const xs = linearScale(Math.min(...deltas), Math.max(...deltas),
                         chart.x0, chart.x1);
  const ys = linearScale(lo, hi, chart.y0, chart.y1);
  chart.axes(xs, ys, "delta", "median statistic");
  stats.forEach((name, k) => {
    const pts = deltas.map((d, i) => [xs(d), ys(series[k][i])] as [number, number])
      .filter(([, y]) => Number.isFinite(y));
    chart.line(pts, COLORS[k]);
    chart.dots(pts, COLORS[k]);
  });
  chart.legend(stats.map((s, k) => [s, COLORS[k]]));
  return chart.render();
}

/** Least squares on log-log points; returns slope and its standard error. */
export function logLogFit(alpha: number[], p: number[]): [number, number] {
  const pts = alpha.map((a, i) => [Math.log(a), Math.log(p[i])])
    .filter(([x, y]) => Number.isFinite(x) && Number.isFinite(y));
  const n = pts.length;
  if (n < 3) throw new SchemaError("log-log fit needs at least 3 points");
  const mx = pts.reduce((s, [x]) => s + x, 0) / n;
  const my = pts.reduce((s, [, y]) => s + y, 0) / n;
  const sxx = pts.reduce((s, [x]) => s + (x - mx) ** 2, 0);
  const sxy = pts.reduce((s, [x, y]) => s + (x - mx) * (y - my), 0);
  const slope = sxy / sxx;
  const intercept = my - slope * mx;
  const ss = pts.reduce(
    (s, [x, y]) => s + (y - slope * x - intercept) ** 2, 0);
  const se = Math.sqrt(ss / (n - 2) / sxx);
  return [slope, se];
}

function persistence(run: RunData): string {
  requireColumns(run.rows, ["alpha", "forward_p", "dual_p"], "persistence data");
  const rows = [...run.rows].sort((a, b) => num(a.alpha) - num(b.alpha));
  const alpha = rows.map((r) => num(r.alpha));
  const fwd = rows.map((r) => num(r.forward_p));
  const dual = rows.map((r) => num(r.dual_p));
  const positive = [...fwd, ...dual].filter((p) => p > 0);
  if (positive.length === 0) throw new SchemaError("no positive probabilities");
  const chart = new Chart("persistence probability vs window fraction");
  const xs = logScale(Math.min(...alpha), Math.max(...alpha), chart.x0, chart.x1);
  const ys = logScale(Math.min(...positive), 1.0, chart.y0, chart.y1);
  chart.axes(xs, ys, "alpha (log)", "probability (log)");
  const mk = (p: number[]) => alpha
    .map((a, i) => [xs(a), ys(p[i])] as [number, number])
    .filter(([, y]) => Number.isFinite(y));
  chart.line(mk(fwd), COLORS[0]);
  chart.dots(mk(fwd), COLORS[0]);
  chart.line(mk(dual), COLORS[1], "5 3");
  chart.dots(mk(dual), COLORS[1]);
  const [slope, se] = logLogFit(alpha, fwd);
  chart.note(`fitted log-log slope ${fmt(slope)} +- ${fmt(se)}`);
  chart.legend([["forward", COLORS[0]], ["dual", COLORS[1]]]);
  return chart.render();
}

function weights(run: RunData): string {
  requireColumns(run.rows, ["kind", "mass"], "weights data");
  const masses = run.rows.filter((r) => r.kind === "bead-count")
    .map((r) => num(r.mass));
  if (masses.length === 0) throw new SchemaError("no bead-count rows");
  const hi = Math.max(...masses);
  const bins = 24;
  const width = hi / bins || 1;
  const counts = new Array<number>(bins).fill(0);
  for (const m of masses) {
    counts[Math.min(Math.floor(m / width), bins - 1)] += 1;
  }
  const chart = new Chart("supported weight distribution (bead counts)");
  const xs = linearScale(0, hi, chart.x0, chart.x1);
  const ys = linearScale(0, Math.max(...counts), chart.y0, chart.y1);
  chart.axes(xs, ys, "supported weight", "atoms");
  counts.forEach((c, k) => {
    if (c === 0) return;
    const x = xs(k * width);
    const w = xs((k + 1) * width) - x;
    chart.bar(x + 0.5, ys(c), Math.max(w - 1, 0.5), chart.y0 - ys(c), COLORS[0]);
  });
  chart.note(`${masses.length} atoms over ${new Set(run.rows.map((r) => r.seed)).size} seeds`);
  return chart.render();
}

function diagnostics(run: RunData): string {
  requireColumns(run.rows, ["epsilon", "max_region_diameter"], "diagnostics data");
  const groups = [...groupBy(run.rows, "epsilon").entries()]
    .sort((a, b) => num(a[0]) - num(b[0]));
  const qs = [0.25, 0.5, 0.75, 0.9];
  const xsRaw = groups.map(([e]) => Math.cbrt(num(e)));
  const lines = qs.map((q) => groups.map(([, rows]) =>
    quantile(rows.map((r) => num(r.max_region_diameter)), q)));
  const hi = Math.max(...lines.flat(), ...xsRaw);
  const chart = new Chart("corridor diameter quantiles vs budget^(1/3)");
  const xs = linearScale(0, Math.max(...xsRaw) * 1.05, chart.x0, chart.x1);
  const ys = linearScale(0, hi * 1.05, chart.y0, chart.y1);
  chart.axes(xs, ys, "budget^(1/3)", "max corridor diameter");
  chart.line([[xs(0), ys(0)], [xs(hi), ys(hi)]], "#999", "4 4");
  qs.forEach((q, k) => {
    const pts = xsRaw.map((x, i) => [xs(x), ys(lines[k][i])] as [number, number]);
    chart.line(pts, COLORS[k]);
    chart.dots(pts, COLORS[k]);
  });
  chart.legend(qs.map((q, k) => [`q${Math.round(q * 100)}`, COLORS[k]]));
  return chart.render();
}
