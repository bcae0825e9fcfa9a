#!/usr/bin/env node
// Command line front end. Exit codes: 0 success, 1 bad data (schema or
// content of a CSV), 2 bad invocation.
import {pathToFileURL} from 'url';
import {parseArgs} from 'util';
import {DataError} from './csv.js';
import {FigureKind, FigureSpec, ImageFormat, KINDS, UsageError, renderFigure} from './figure.js';
import {Part} from './profile.js';

const USAGE = `usage: figures <kind> --out <path.svg> [options]

kinds:
  order_plot     log-log error vs time step; needs --errors and --orders
  mass_plot      mass trace over time; needs --mass
  profile_plot   solution profiles at the recorded times; needs --profiles

options:
  --errors <path>     errors.csv (tau,N,t,err,mass_drift)
  --orders <path>     orders.csv (t,slope,intercept,r2)
  --mass <path>       mass.csv (step,t,mass,mass_over_initial)
  --profiles <path>   profiles.csv (t,x,re,im)
  --guides <p,...>    slope-guide exponents for order plots, e.g. 0.5,1
  --part <which>      re | im | both for profile plots (default both)
  --title <text>      figure title override
  --out <path>        output file, required
  --format <fmt>      svg (png is not supported)
  -h, --help          show this message
`;

function parseGuides(raw: string): number[] {
  return raw.split(',').map((piece) => {
    const v = Number(piece.trim());
    if (piece.trim() === '' || !Number.isFinite(v)) {
      throw new UsageError(`--guides: not a number ('${piece}')`);
    }
    return v;
  });
}

function inferFormat(out: string, explicit?: string): ImageFormat {
  if (explicit !== undefined) {
    if (explicit !== 'svg' && explicit !== 'png') {
      throw new UsageError(`--format: expected svg or png, got '${explicit}'`);
    }
    return explicit;
  }
  return out.endsWith('.png') ? 'png' : 'svg';
}

export function buildSpec(argv: string[]): FigureSpec | null {
  let parsed;
  try {
    parsed = parseArgs({
      args: argv,
      allowPositionals: true,
      options: {
        errors: {type: 'string'},
        orders: {type: 'string'},
        mass: {type: 'string'},
        profiles: {type: 'string'},
        guides: {type: 'string'},
        part: {type: 'string'},
        title: {type: 'string'},
        out: {type: 'string'},
        format: {type: 'string'},
        help: {type: 'boolean', short: 'h'},
      },
    });
  } catch (e) {
    throw new UsageError((e as Error).message);
  }
  if (parsed.values.help) {
    return null;
  }
  const positionals = parsed.positionals;
  if (positionals.length !== 1) {
    throw new UsageError(`expected exactly one figure kind, got ${positionals.length}`);
  }
  const kind = positionals[0];
  if (!KINDS.includes(kind as FigureKind)) {
    throw new UsageError(`unknown figure kind '${kind}' (expected ${KINDS.join(' | ')})`);
  }
  const part = parsed.values.part ?? 'both';
  if (part !== 're' && part !== 'im' && part !== 'both') {
    throw new UsageError(`--part: expected re, im or both, got '${part}'`);
  }
  const out = parsed.values.out;
  if (out === undefined) {
    throw new UsageError('--out is required');
  }
  return {
    kind: kind as FigureKind,
    errors: parsed.values.errors,
    orders: parsed.values.orders,
    mass: parsed.values.mass,
    profiles: parsed.values.profiles,
    guides: parsed.values.guides === undefined ? [] : parseGuides(parsed.values.guides),
    part: part as Part,
    title: parsed.values.title,
    output: out,
    format: inferFormat(out, parsed.values.format),
  };
}

export function run(argv: string[]): number {
  try {
    const spec = buildSpec(argv);
    if (spec === null) {
      process.stdout.write(USAGE);
      return 0;
    }
    renderFigure(spec);
    console.log(`wrote ${spec.output}`);
    return 0;
  } catch (e) {
    if (e instanceof UsageError) {
      console.error(`error: ${e.message}`);
      console.error(`run 'figures --help' for usage`);
      return 2;
    }
    if (e instanceof DataError) {
      console.error(`error: ${e.message}`);
      return 1;
    }
    throw e;
  }
}

if (import.meta.url === pathToFileURL(process.argv[1] ?? '').href) {
  process.exit(run(process.argv.slice(2)));
}
