// Deterministic SVG assembly: fixed canvas, fonts, and palette, no
// timestamps or randomness, so the same data always gives the same bytes.

export const WIDTH = 720;
export const HEIGHT = 480;
export const MARGIN = {left: 78, right: 24, top: 48, bottom: 58};
export const FONT = 'Helvetica, Arial, sans-serif';
export const PALETTE = ['#1f77b4', '#d62728', '#2ca02c', '#9467bd', '#ff7f0e', '#8c564b'];
export const GUIDE_COLOR = '#777777';

export function esc(s: string): string {
  return s.replace(/&/g, '&amp;').replace(/</g, '&lt;').replace(/>/g, '&gt;');
}

// Short human-readable number: round numbers collapse ("0.4", not
// "0.40000000000000002"), extremes switch to exponent form.
export function fmt(v: number): string {
  if (v === 0) {
    return '0';
  }
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) {
    const [mantissa, exponent] = v.toExponential(6).split('e');
    return `${Number(mantissa)}e${exponent.replace('+', '')}`;
  }
  return String(Number(v.toPrecision(8)));
}

function px(v: number): string {
  return v.toFixed(2);
}

function niceStep(span: number, target: number): number {
  const raw = span / target;
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  for (const m of [1, 2, 5]) {
    if (mag * m >= raw) {
      return mag * m;
    }
  }
  return mag * 10;
}

export function linearTicks(lo: number, hi: number, target = 6): number[] {
  if (!(hi > lo)) {
    return [lo];
  }
  const step = niceStep(hi - lo, target);
  const out: number[] = [];
  for (let k = Math.ceil(lo / step - 1e-9); k * step <= hi + step * 1e-9; k++) {
    out.push(k * step);
  }
  return out;
}

// Powers of ten inside [lo, hi]; falls back to a 1-2-5 mantissa grid when
// the range spans too few decades to give at least three ticks.
export function logTicks(lo: number, hi: number): number[] {
  const decades: number[] = [];
  for (let e = Math.ceil(Math.log10(lo) - 1e-9); Math.pow(10, e) <= hi * (1 + 1e-9); e++) {
    decades.push(Math.pow(10, e));
  }
  if (decades.length >= 3) {
    return decades;
  }
  const out: number[] = [];
  const eLo = Math.floor(Math.log10(lo));
  const eHi = Math.ceil(Math.log10(hi));
  for (let e = eLo; e <= eHi; e++) {
    for (const m of [1, 2, 5]) {
      const v = m * Math.pow(10, e);
      if (v >= lo * (1 - 1e-9) && v <= hi * (1 + 1e-9)) {
        out.push(v);
      }
    }
  }
  return out.length > 0 ? out : [lo, hi];
}

export interface FrameSpec {
  xLo: number;
  xHi: number;
  yLo: number;
  yHi: number;
  xLog?: boolean;
  yLog?: boolean;
  xLabel: string;
  yLabel: string;
  title: string;
}

export interface Frame {
  sx(v: number): number;
  sy(v: number): number;
  parts: string[];
}

// Plot chrome shared by every figure: background, grid, axis box, tick
// labels, axis labels, centered title.
export function makeFrame(spec: FrameSpec): Frame {
  const x0 = MARGIN.left;
  const x1 = WIDTH - MARGIN.right;
  const y0 = HEIGHT - MARGIN.bottom;
  const y1 = MARGIN.top;

  const tx = spec.xLog ? Math.log10 : (v: number) => v;
  const ty = spec.yLog ? Math.log10 : (v: number) => v;
  const xa = tx(spec.xLo);
  const xb = tx(spec.xHi);
  const ya = ty(spec.yLo);
  const yb = ty(spec.yHi);
  const sx = (v: number) => x0 + ((tx(v) - xa) / (xb - xa)) * (x1 - x0);
  const sy = (v: number) => y0 + ((ty(v) - ya) / (yb - ya)) * (y1 - y0);

  const xTicks = spec.xLog ? logTicks(spec.xLo, spec.xHi) : linearTicks(spec.xLo, spec.xHi);
  const yTicks = spec.yLog ? logTicks(spec.yLo, spec.yHi) : linearTicks(spec.yLo, spec.yHi);

  const parts: string[] = [];
  parts.push(`<rect x="0" y="0" width="${WIDTH}" height="${HEIGHT}" fill="#ffffff"/>`);
  for (const v of xTicks) {
    const p = px(sx(v));
    parts.push(`<line x1="${p}" y1="${px(y1)}" x2="${p}" y2="${px(y0)}" stroke="#e5e5e5" stroke-width="1"/>`);
  }
  for (const v of yTicks) {
    const p = px(sy(v));
    parts.push(`<line x1="${px(x0)}" y1="${p}" x2="${px(x1)}" y2="${p}" stroke="#e5e5e5" stroke-width="1"/>`);
  }
  parts.push(`<rect x="${px(x0)}" y="${px(y1)}" width="${px(x1 - x0)}" height="${px(y0 - y1)}" fill="none" stroke="#333333" stroke-width="1"/>`);
  for (const v of xTicks) {
    const p = px(sx(v));
    parts.push(`<line x1="${p}" y1="${px(y0)}" x2="${p}" y2="${px(y0 + 5)}" stroke="#333333" stroke-width="1"/>`);
    parts.push(`<text x="${p}" y="${px(y0 + 19)}" font-family="${FONT}" font-size="11" fill="#333333" text-anchor="middle">${esc(fmt(v))}</text>`);
  }
  for (const v of yTicks) {
    const p = px(sy(v));
    parts.push(`<line x1="${px(x0 - 5)}" y1="${p}" x2="${px(x0)}" y2="${p}" stroke="#333333" stroke-width="1"/>`);
    parts.push(`<text x="${px(x0 - 9)}" y="${p}" font-family="${FONT}" font-size="11" fill="#333333" text-anchor="end" dominant-baseline="middle">${esc(fmt(v))}</text>`);
  }
  const cx = (x0 + x1) / 2;
  const cy = (y0 + y1) / 2;
  parts.push(`<text x="${px(cx)}" y="${px(HEIGHT - 14)}" font-family="${FONT}" font-size="13" fill="#333333" text-anchor="middle">${esc(spec.xLabel)}</text>`);
  parts.push(`<text x="20" y="${px(cy)}" font-family="${FONT}" font-size="13" fill="#333333" text-anchor="middle" transform="rotate(-90 20 ${px(cy)})">${esc(spec.yLabel)}</text>`);
  parts.push(`<text x="${px(cx)}" y="28" font-family="${FONT}" font-size="15" font-weight="bold" fill="#111111" text-anchor="middle">${esc(spec.title)}</text>`);
  return {sx, sy, parts};
}

export function pathFrom(points: Array<[number, number]>): string {
  return points
    .map(([x, y], i) => `${i === 0 ? 'M' : 'L'} ${px(x)} ${px(y)}`)
    .join(' ');
}

export function polyline(points: Array<[number, number]>, color: string, width: number, dash?: string): string {
  const d = dash ? ` stroke-dasharray="${dash}"` : '';
  return `<path d="${pathFrom(points)}" fill="none" stroke="${color}" stroke-width="${width}"${d}/>`;
}

export function marker(x: number, y: number, color: string): string {
  return `<circle cx="${px(x)}" cy="${px(y)}" r="3.5" fill="${color}"/>`;
}

export interface LegendEntry {
  label: string;
  color: string;
  dash?: string;
}

// Legend box anchored by its top-right corner, one line sample per entry.
export function legend(entries: LegendEntry[], right: number, top: number): string[] {
  const lineH = 18;
  const longest = Math.max(...entries.map((e) => e.label.length));
  const width = 46 + longest * 6.6;
  const height = 10 + entries.length * lineH;
  const x = right - width;
  const parts: string[] = [];
  parts.push(`<rect x="${px(x)}" y="${px(top)}" width="${px(width)}" height="${px(height)}" fill="#ffffff" fill-opacity="0.9" stroke="#999999" stroke-width="1"/>`);
  entries.forEach((e, i) => {
    const yMid = top + 9 + lineH * i + lineH / 2 - 4;
    const d = e.dash ? ` stroke-dasharray="${e.dash}"` : '';
    parts.push(`<line x1="${px(x + 8)}" y1="${px(yMid)}" x2="${px(x + 34)}" y2="${px(yMid)}" stroke="${e.color}" stroke-width="2"${d}/>`);
    parts.push(`<text x="${px(x + 40)}" y="${px(yMid + 4)}" font-family="${FONT}" font-size="12" fill="#333333">${esc(e.label)}</text>`);
  });
  return parts;
}

export function svgDocument(title: string, body: string[]): string {
  const head = `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}">`;
  return [head, `<title>${esc(title)}</title>`, ...body, '</svg>', ''].join('\n');
}
