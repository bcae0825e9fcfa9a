// Mass-evolution trace: the conserved L2 norm against time, with the worst
// relative drift quoted next to the legend.
import {MassRow} from './csv.js';
import {
  FONT,
  MARGIN,
  PALETTE,
  WIDTH,
  esc,
  legend,
  makeFrame,
  polyline,
  svgDocument,
} from './svg.js';

export function renderMassPlot(rows: MassRow[], title = 'Mass evolution'): string {
  const sorted = [...rows].sort((a, b) => a.t - b.t);
  const massMax = Math.max(...sorted.map((r) => r.mass));
  const maxDrift = Math.max(...sorted.map((r) => Math.abs(r.massOverInitial - 1)));
  const frame = makeFrame({
    xLo: sorted[0].t,
    xHi: sorted[sorted.length - 1].t,
    yLo: 0,
    yHi: massMax * 1.15,
    xLabel: 't',
    yLabel: 'mass',
    title,
  });
  const parts = [...frame.parts];
  const pts = sorted.map((r): [number, number] => [frame.sx(r.t), frame.sy(r.mass)]);
  parts.push(polyline(pts, PALETTE[0], 2));
  parts.push(...legend(
    [{label: `mass(t), ${sorted.length} steps`, color: PALETTE[0]}],
    WIDTH - MARGIN.right - 10,
    MARGIN.top + 10,
  ));
  const drift = maxDrift === 0 ? '0' : maxDrift.toExponential(2);
  parts.push(
    `<text x="${(WIDTH - MARGIN.right - 10).toFixed(2)}" y="${(MARGIN.top + 52).toFixed(2)}" ` +
    `font-family="${FONT}" font-size="12" fill="#333333" text-anchor="end">` +
    `${esc(`max |m(t)/m(0) - 1| = ${drift}`)}</text>`);
  return svgDocument(title, parts);
}
