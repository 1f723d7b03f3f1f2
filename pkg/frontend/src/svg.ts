/**
 * A tiny deterministic SVG chart assembler: fixed canvas, styles derived
 * only from the data, no timestamps, stable number formatting.
 */

export const WIDTH = 640;
export const HEIGHT = 420;
const MARGIN = { left: 64, right: 20, top: 40, bottom: 48 };

export const COLORS = ["#1f6feb", "#d73a49", "#1a7f37", "#bf8700", "#8250df",
                       "#0a7ea4"];

export function fmt(x: number): string {
  if (!Number.isFinite(x)) return String(x);
  if (x === 0) return "0";
  const abs = Math.abs(x);
  if (abs >= 0.01 && abs < 10000) {
    return String(Number(x.toPrecision(4)));
  }
  return x.toExponential(2);
}

export interface Scale {
  (x: number): number;
  ticks: number[];
}

function linearTicks(lo: number, hi: number, count = 5): number[] {
  if (!(hi > lo)) return [lo];
  const rawStep = (hi - lo) / count;
  const mag = Math.pow(10, Math.floor(Math.log10(rawStep)));
  const step = [1, 2, 5, 10].map((m) => m * mag)
    .find((s) => (hi - lo) / s <= count) ?? mag * 10;
  const first = Math.ceil(lo / step) * step;
  const ticks: number[] = [];
  for (let t = first; t <= hi + 1e-12 * Math.abs(hi); t += step) {
    ticks.push(Number(t.toPrecision(12)));
  }
  return ticks;
}

export function linearScale(lo: number, hi: number, outLo: number,
                            outHi: number): Scale {
  const span = hi > lo ? hi - lo : 1;
  const f = ((x: number) =>
    outLo + ((x - lo) / span) * (outHi - outLo)) as Scale;
  f.ticks = linearTicks(lo, hi);
  return f;
}

export function logScale(lo: number, hi: number, outLo: number,
                         outHi: number): Scale {
  const llo = Math.log10(lo);
  const lhi = Math.log10(hi);
  const span = lhi > llo ? lhi - llo : 1;
  const f = ((x: number) =>
    outLo + ((Math.log10(x) - llo) / span) * (outHi - outLo)) as Scale;
  const ticks: number[] = [];
  for (let e = Math.ceil(llo - 1e-9); e <= Math.floor(lhi + 1e-9); e++) {
    ticks.push(Math.pow(10, e));
  }
  f.ticks = ticks.length >= 2 ? ticks : [lo, hi];
  return f;
}

export class Chart {
  private parts: string[] = [];
  readonly x0 = MARGIN.left;
  readonly x1 = WIDTH - MARGIN.right;
  readonly y0 = HEIGHT - MARGIN.bottom;   // y axis points up
  readonly y1 = MARGIN.top;

  constructor(title: string) {
    this.parts.push(
      `<text x="${WIDTH / 2}" y="20" text-anchor="middle" ` +
      `font-size="15" font-weight="bold">${escape(title)}</text>`);
  }

  axes(xs: Scale, ys: Scale, xlabel: string, ylabel: string): void {
    const p = this.parts;
    p.push(`<line x1="${this.x0}" y1="${this.y0}" x2="${this.x1}" ` +
           `y2="${this.y0}" stroke="#444"/>`);
    p.push(`<line x1="${this.x0}" y1="${this.y0}" x2="${this.x0}" ` +
           `y2="${this.y1}" stroke="#444"/>`);
    for (const t of xs.ticks) {
      const x = xs(t);
      if (x < this.x0 - 0.5 || x > this.x1 + 0.5) continue;
      p.push(`<line x1="${fmt(x)}" y1="${this.y0}" x2="${fmt(x)}" ` +
             `y2="${this.y0 + 4}" stroke="#444"/>`);
      p.push(`<text x="${fmt(x)}" y="${this.y0 + 18}" text-anchor="middle" ` +
             `font-size="11">${fmt(t)}</text>`);
    }
    for (const t of ys.ticks) {
      const y = ys(t);
      if (y > this.y0 + 0.5 || y < this.y1 - 0.5) continue;
      p.push(`<line x1="${this.x0 - 4}" y1="${fmt(y)}" x2="${this.x0}" ` +
             `y2="${fmt(y)}" stroke="#444"/>`);
      p.push(`<text x="${this.x0 - 8}" y="${fmt(y + 4)}" text-anchor="end" ` +
             `font-size="11">${fmt(t)}</text>`);
    }
    p.push(`<text x="${(this.x0 + this.x1) / 2}" y="${HEIGHT - 10}" ` +
           `text-anchor="middle" font-size="12">${escape(xlabel)}</text>`);
    p.push(`<text x="16" y="${(this.y0 + this.y1) / 2}" text-anchor="middle" ` +
           `font-size="12" transform="rotate(-90 16 ${(this.y0 + this.y1) / 2})">` +
           `${escape(ylabel)}</text>`);
  }

  line(points: [number, number][], color: string, dash = ""): void {
    if (points.length === 0) return;
    const d = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
    const dashAttr = dash ? ` stroke-dasharray="${dash}"` : "";
    this.parts.push(`<polyline points="${d}" fill="none" stroke="${color}" ` +
                    `stroke-width="1.6"${dashAttr}/>`);
  }

  dots(points: [number, number][], color: string, r = 3): void {
    for (const [x, y] of points) {
      this.parts.push(`<circle cx="${fmt(x)}" cy="${fmt(y)}" r="${r}" ` +
                      `fill="${color}"/>`);
    }
  }

  bar(x: number, y: number, w: number, h: number, color: string): void {
    this.parts.push(`<rect x="${fmt(x)}" y="${fmt(y)}" width="${fmt(w)}" ` +
                    `height="${fmt(h)}" fill="${color}" opacity="0.85"/>`);
  }

  legend(entries: [string, string][]): void {
    entries.forEach(([label, color], k) => {
      const y = this.y1 + 14 + 16 * k;
      this.parts.push(`<line x1="${this.x1 - 150}" y1="${y - 4}" ` +
                      `x2="${this.x1 - 126}" y2="${y - 4}" stroke="${color}" ` +
                      `stroke-width="2"/>`);
      this.parts.push(`<text x="${this.x1 - 120}" y="${y}" font-size="11">` +
                      `${escape(label)}</text>`);
    });
  }

  note(text: string): void {
    this.parts.push(`<text x="${this.x0 + 8}" y="${this.y1 + 14}" ` +
                    `font-size="12">${escape(text)}</text>`);
  }

  render(): string {
    return `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" ` +
      `height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}" ` +
      `font-family="Helvetica, Arial, sans-serif">\n` +
      `<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>\n` +
      this.parts.join("\n") + "\n</svg>\n";
  }
}

function escape(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}
