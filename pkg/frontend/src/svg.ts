/**
 * Deterministic SVG building blocks: a fixed-size chart frame with axes and
 * ticks, a compact diverging-free colormap, lines, bands, bars, and cells.
 * No timestamps, no randomness: identical inputs give identical bytes.
 */

export const WIDTH = 640;
export const HEIGHT = 420;
export const MARGIN = { left: 64, right: 88, top: 40, bottom: 52 };

export function fmt(v: number): string {
  if (!Number.isFinite(v)) return "0";
  const r = Math.round(v * 100) / 100;
  return Object.is(r, -0) ? "0" : String(r);
}

/** Tick label formatting: fixed significant digits, stable across runs. */
export function tickLabel(v: number): string {
  if (v === 0) return "0";
  const mag = Math.abs(v);
  if (mag >= 1e4 || mag < 1e-3) return v.toExponential(2);
  return String(Math.round(v * 1000) / 1000);
}

export interface Scale {
  (v: number): number;
  domain: [number, number];
}

export function linearScale(lo: number, hi: number, outLo: number, outHi: number): Scale {
  const span = hi - lo || 1;
  const scale = ((v: number) => outLo + ((v - lo) / span) * (outHi - outLo)) as Scale;
  scale.domain = [lo, hi];
  return scale;
}

export function extent(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (!Number.isFinite(lo)) return [0, 1];
  return lo === hi ? [lo - 0.5, hi + 0.5] : [lo, hi];
}

export function ticks(lo: number, hi: number, count = 5): number[] {
  const span = hi - lo || 1;
  const step = Math.pow(10, Math.floor(Math.log10(span / count)));
  const err = (span / count) / step;
  const mult = err >= 7.5 ? 10 : err >= 3.5 ? 5 : err >= 1.5 ? 2 : 1;
  const s = mult * step;
  const start = Math.ceil(lo / s) * s;
  const out: number[] = [];
  for (let v = start; v <= hi + 1e-12 * span; v += s) {
    out.push(Math.abs(v) < 1e-12 * span ? 0 : v);
  }
  return out;
}

// five-anchor sequential colormap (dark blue -> green -> yellow)
const STOPS: [number, number, number][] = [
  [68, 1, 84],
  [59, 82, 139],
  [33, 145, 140],
  [94, 201, 98],
  [253, 231, 37],
];

export function colormap(t: number): string {
  const x = Math.min(1, Math.max(0, t)) * (STOPS.length - 1);
  const i = Math.min(STOPS.length - 2, Math.floor(x));
  const f = x - i;
  const mix = STOPS[i].map((a, k) => Math.round(a + f * (STOPS[i + 1][k] - a)));
  return `rgb(${mix[0]},${mix[1]},${mix[2]})`;
}

export interface Frame {
  body: string[];
  x: Scale;
  y: Scale;
}

export interface FrameOpts {
  title: string;
  xLabel: string;
  yLabel: string;
  xDomain: [number, number];
  yDomain: [number, number];
}

/** Open a chart frame: background, axes, ticks, labels, clip region. */
export function frame(opts: FrameOpts): Frame {
  const { left, right, top, bottom } = MARGIN;
  const x = linearScale(opts.xDomain[0], opts.xDomain[1], left, WIDTH - right);
  const y = linearScale(opts.yDomain[0], opts.yDomain[1], HEIGHT - bottom, top);
  const body: string[] = [];
  body.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);
  body.push(`<text x="${WIDTH / 2}" y="22" text-anchor="middle" font-size="15" ` +
            `font-family="sans-serif" font-weight="bold">${escapeXml(opts.title)}</text>`);
  for (const t of ticks(...opts.xDomain)) {
    const px = fmt(x(t));
    body.push(`<line x1="${px}" y1="${fmt(HEIGHT - bottom)}" x2="${px}" ` +
              `y2="${fmt(HEIGHT - bottom + 4)}" stroke="#333"/>`);
    body.push(`<text x="${px}" y="${fmt(HEIGHT - bottom + 17)}" text-anchor="middle" ` +
              `font-size="10" font-family="sans-serif">${tickLabel(t)}</text>`);
  }
  for (const t of ticks(...opts.yDomain)) {
    const py = fmt(y(t));
    body.push(`<line x1="${fmt(MARGIN.left - 4)}" y1="${py}" x2="${fmt(MARGIN.left)}" ` +
              `y2="${py}" stroke="#333"/>`);
    body.push(`<text x="${fmt(MARGIN.left - 7)}" y="${py}" text-anchor="end" ` +
              `dominant-baseline="middle" font-size="10" font-family="sans-serif">${tickLabel(t)}</text>`);
  }
  body.push(`<rect x="${left}" y="${top}" width="${WIDTH - left - right}" ` +
            `height="${HEIGHT - top - bottom}" fill="none" stroke="#333"/>`);
  body.push(`<text x="${WIDTH / 2}" y="${HEIGHT - 14}" text-anchor="middle" font-size="12" ` +
            `font-family="sans-serif">${escapeXml(opts.xLabel)}</text>`);
  body.push(`<text x="18" y="${HEIGHT / 2}" text-anchor="middle" font-size="12" ` +
            `font-family="sans-serif" transform="rotate(-90 18 ${HEIGHT / 2})">` +
            `${escapeXml(opts.yLabel)}</text>`);
  return { body, x, y };
}

export function polyline(xs: number[], ys: number[], color: string, width = 1.5,
                         dash?: string): string {
  const pts = xs.map((v, i) => `${fmt(v)},${fmt(ys[i])}`).join(" ");
  const dashAttr = dash ? ` stroke-dasharray="${dash}"` : "";
  return `<polyline points="${pts}" fill="none" stroke="${color}" stroke-width="${width}"${dashAttr}/>`;
}

export function band(xs: number[], lo: number[], hi: number[], color: string,
                     opacity = 0.25): string {
  const fwd = xs.map((v, i) => `${fmt(v)},${fmt(hi[i])}`);
  const back = [...xs].reverse().map((v, i) => `${fmt(v)},${fmt(lo[xs.length - 1 - i])}`);
  return `<polygon points="${[...fwd, ...back].join(" ")}" fill="${color}" ` +
         `opacity="${opacity}" stroke="none"/>`;
}

/** Right-hand colorbar for heatmaps. */
export function colorbar(lo: number, hi: number, label: string): string {
  const x0 = WIDTH - MARGIN.right + 24;
  const y0 = MARGIN.top;
  const h = HEIGHT - MARGIN.top - MARGIN.bottom;
  const parts: string[] = [];
  const steps = 32;
  for (let i = 0; i < steps; i++) {
    const t = 1 - i / (steps - 1);
    parts.push(`<rect x="${x0}" y="${fmt(y0 + (i * h) / steps)}" width="14" ` +
               `height="${fmt(h / steps + 0.5)}" fill="${colormap(t)}"/>`);
  }
  parts.push(`<rect x="${x0}" y="${y0}" width="14" height="${h}" fill="none" stroke="#333"/>`);
  parts.push(`<text x="${x0 + 18}" y="${y0 + 8}" font-size="10" font-family="sans-serif">` +
             `${tickLabel(hi)}</text>`);
  parts.push(`<text x="${x0 + 18}" y="${y0 + h}" font-size="10" font-family="sans-serif">` +
             `${tickLabel(lo)}</text>`);
  parts.push(`<text x="${x0 + 7}" y="${y0 - 8}" text-anchor="middle" font-size="10" ` +
             `font-family="sans-serif">${escapeXml(label)}</text>`);
  return parts.join("\n");
}

export function document(body: string[]): string {
  return `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
         `viewBox="0 0 ${WIDTH} ${HEIGHT}">\n${body.join("\n")}\n</svg>\n`;
}

export function escapeXml(text: string): string {
  return text.replace(/[<>&"']/g, (ch) =>
    ({ "<": "&lt;", ">": "&gt;", "&": "&amp;", '"': "&quot;", "'": "&apos;" }[ch] as string));
}
