// Solution profiles on the spatial grid: real and/or imaginary part of the
// field at each recorded time, one curve per time.
import {DataError, ProfileRow} from './csv.js';
import {
  LegendEntry,
  MARGIN,
  PALETTE,
  WIDTH,
  fmt,
  legend,
  makeFrame,
  polyline,
  svgDocument,
} from './svg.js';

export type Part = 're' | 'im' | 'both';

interface TimeSlice {
  t: number;
  points: ProfileRow[];
}

export function profileSlices(rows: ProfileRow[]): TimeSlice[] {
  const byT = new Map<number, ProfileRow[]>();
  for (const row of rows) {
    let pts = byT.get(row.t);
    if (!pts) {
      pts = [];
      byT.set(row.t, pts);
    }
    pts.push(row);
  }
  const slices = [...byT.entries()].map(([t, points]) => ({
    t,
    points: points.sort((a, b) => a.x - b.x),
  }));
  slices.sort((a, b) => a.t - b.t);
  return slices;
}

function defaultTitle(part: Part): string {
  if (part === 're') {
    return 'Solution profiles (real part)';
  }
  if (part === 'im') {
    return 'Solution profiles (imaginary part)';
  }
  return 'Solution profiles';
}

export function renderProfilePlot(rows: ProfileRow[], part: Part, title?: string): string {
  const slices = profileSlices(rows);
  const values: number[] = [];
  for (const s of slices) {
    for (const p of s.points) {
      if (part !== 'im') {
        values.push(p.re);
      }
      if (part !== 're') {
        values.push(p.im);
      }
    }
  }
  if (values.length === 0) {
    throw new DataError('no profile values to plot');
  }
  let yLo = Math.min(...values);
  let yHi = Math.max(...values);
  const pad = Math.max((yHi - yLo) * 0.08, 1e-12);
  yLo -= pad;
  yHi += pad;

  const xs = slices.flatMap((s) => s.points.map((p) => p.x));
  const heading = title ?? defaultTitle(part);
  const frame = makeFrame({
    xLo: Math.min(...xs),
    xHi: Math.max(...xs),
    yLo,
    yHi,
    xLabel: 'x',
    yLabel: part === 're' ? 'Re u' : part === 'im' ? 'Im u' : 'u',
    title: heading,
  });
  const parts = [...frame.parts];
  const entries: LegendEntry[] = [];
  slices.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length];
    if (part !== 'im') {
      const pts = s.points.map((p): [number, number] => [frame.sx(p.x), frame.sy(p.re)]);
      parts.push(polyline(pts, color, 1.8));
      entries.push({label: `Re u, t = ${fmt(s.t)}`, color});
    }
    if (part !== 're') {
      const pts = s.points.map((p): [number, number] => [frame.sx(p.x), frame.sy(p.im)]);
      parts.push(polyline(pts, color, 1.8, '5 3'));
      entries.push({label: `Im u, t = ${fmt(s.t)}`, color, dash: '5 3'});
    }
  });
  parts.push(...legend(entries, WIDTH - MARGIN.right - 10, MARGIN.top + 10));
  return svgDocument(heading, parts);
}
