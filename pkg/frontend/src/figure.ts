// FigureSpec assembly and rendering: dispatches on figure kind, reads only
// the documented CSV schemas, and writes the image after a full render so a
// failure never leaves an empty file behind.
import {writeFileSync} from 'fs';
import {loadErrors, loadMass, loadOrders, loadProfiles} from './csv.js';
import {renderMassPlot} from './mass.js';
import {renderOrderPlot} from './order.js';
import {Part, renderProfilePlot} from './profile.js';

export type FigureKind = 'order_plot' | 'mass_plot' | 'profile_plot';
export type ImageFormat = 'svg' | 'png';

export const KINDS: FigureKind[] = ['order_plot', 'mass_plot', 'profile_plot'];

export class UsageError extends Error {}

export interface FigureSpec {
  kind: FigureKind;
  errors?: string;
  orders?: string;
  mass?: string;
  profiles?: string;
  guides: number[];
  part: Part;
  title?: string;
  output: string;
  format: ImageFormat;
}

function need(value: string | undefined, kind: string, flag: string): string {
  if (value === undefined) {
    throw new UsageError(`${kind} requires ${flag}`);
  }
  return value;
}

export function renderFigure(spec: FigureSpec): string {
  if (spec.format === 'png') {
    throw new UsageError(
      'png output is not supported: svg is the only format this renderer emits; use an .svg output path');
  }
  let svg: string;
  if (spec.kind === 'order_plot') {
    const errors = loadErrors(need(spec.errors, 'order_plot', '--errors'));
    const orders = loadOrders(need(spec.orders, 'order_plot', '--orders'));
    svg = renderOrderPlot(errors, orders, spec.guides, spec.title);
  } else if (spec.kind === 'mass_plot') {
    const mass = loadMass(need(spec.mass, 'mass_plot', '--mass'));
    svg = renderMassPlot(mass, spec.title);
  } else {
    const profiles = loadProfiles(need(spec.profiles, 'profile_plot', '--profiles'));
    svg = renderProfilePlot(profiles, spec.part, spec.title);
  }
  writeFileSync(spec.output, svg);
  return svg;
}
