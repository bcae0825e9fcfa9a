// Log-log error-vs-step-size plot: one series per measure time, fitted
// slope from the orders table in the legend, optional power-law guide lines.
import {DataError, ErrorRow, OrderRow} from './csv.js';
import {
  GUIDE_COLOR,
  HEIGHT,
  LegendEntry,
  MARGIN,
  PALETTE,
  WIDTH,
  fmt,
  legend,
  makeFrame,
  marker,
  polyline,
  svgDocument,
} from './svg.js';

export interface OrderSeries {
  t: number;
  slope: number;
  points: Array<{tau: number; err: number}>;
}

export interface GuideSegment {
  exponent: number;
  from: {tau: number; err: number};
  to: {tau: number; err: number};
}

export function orderSeries(errors: ErrorRow[], orders: OrderRow[]): OrderSeries[] {
  const byT = new Map<number, Array<{tau: number; err: number}>>();
  for (const row of errors) {
    if (!(row.tau > 0)) {
      throw new DataError(`column 'tau': must be positive on a log scale (got ${fmt(row.tau)})`);
    }
    let pts = byT.get(row.t);
    if (!pts) {
      pts = [];
      byT.set(row.t, pts);
    }
    if (row.err > 0) {
      // err = 0 has no log-log image; the fit upstream drops such rows too
      pts.push({tau: row.tau, err: row.err});
    }
  }
  const series: OrderSeries[] = [];
  for (const [t, points] of byT) {
    if (points.length === 0) {
      throw new DataError(`no positive errors to plot for t = ${fmt(t)}`);
    }
    const fit = orders.find((o) => o.t === t);
    if (!fit) {
      throw new DataError(`no fitted slope for t = ${fmt(t)} in orders data`);
    }
    points.sort((a, b) => b.tau - a.tau);
    series.push({t, slope: fit.slope, points});
  }
  series.sort((a, b) => a.t - b.t);
  return series;
}

// Guides are anchored at the coarsest step size, on the largest error
// measured there, and descend with the requested power toward the finest.
export function guideSegment(series: OrderSeries[], exponent: number): GuideSegment {
  const taus = series.flatMap((s) => s.points.map((p) => p.tau));
  const tauMax = Math.max(...taus);
  const tauMin = Math.min(...taus);
  const anchorErr = Math.max(
    ...series.flatMap((s) => s.points.filter((p) => p.tau === tauMax).map((p) => p.err)));
  return {
    exponent,
    from: {tau: tauMax, err: anchorErr},
    to: {tau: tauMin, err: anchorErr * Math.pow(tauMin / tauMax, exponent)},
  };
}

export function renderOrderPlot(
  errors: ErrorRow[],
  orders: OrderRow[],
  guides: number[],
  title = 'Error vs time step',
): string {
  const series = orderSeries(errors, orders);
  const segments = guides.map((p) => guideSegment(series, p));

  const taus = series.flatMap((s) => s.points.map((p) => p.tau));
  const errs = series
    .flatMap((s) => s.points.map((p) => p.err))
    .concat(segments.flatMap((g) => [g.from.err, g.to.err]));
  const frame = makeFrame({
    xLo: Math.min(...taus) / 1.2,
    xHi: Math.max(...taus) * 1.2,
    yLo: Math.min(...errs) / 1.4,
    yHi: Math.max(...errs) * 1.4,
    xLog: true,
    yLog: true,
    xLabel: 'tau',
    yLabel: 'L2 error',
    title,
  });

  const parts = [...frame.parts];
  const entries: LegendEntry[] = [];
  for (const g of segments) {
    const pts: Array<[number, number]> = [
      [frame.sx(g.from.tau), frame.sy(g.from.err)],
      [frame.sx(g.to.tau), frame.sy(g.to.err)],
    ];
    parts.push(polyline(pts, GUIDE_COLOR, 1.5, '6 4'));
    entries.push({label: `tau^${g.exponent.toFixed(2)}`, color: GUIDE_COLOR, dash: '6 4'});
  }
  series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length];
    const pts = s.points.map(
      (p): [number, number] => [frame.sx(p.tau), frame.sy(p.err)]);
    parts.push(polyline(pts, color, 2));
    for (const [x, y] of pts) {
      parts.push(marker(x, y, color));
    }
    entries.push({label: `t = ${fmt(s.t)} (slope ${s.slope.toFixed(2)})`, color});
  });
  // data climbs to the upper right on these plots, so park the legend
  // in the lower right corner of the axis box
  const entryH = 18;
  const legendH = 10 + entries.length * entryH;
  parts.push(...legend(entries, WIDTH - MARGIN.right - 10, HEIGHT - MARGIN.bottom - legendH - 10));
  return svgDocument(title, parts);
}
