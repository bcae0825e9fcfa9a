import {existsSync, mkdtempSync, readFileSync, writeFileSync} from 'fs';
import {tmpdir} from 'os';
import {join} from 'path';
import {fileURLToPath} from 'url';
import {afterEach, beforeEach, describe, expect, it, vi} from 'vitest';
import {run} from '../src/cli.js';
import {loadOrders} from '../src/csv.js';

const fixture = (name: string) =>
  fileURLToPath(new URL(`./fixtures/${name}`, import.meta.url));

let outDir: string;
let errText: string[];
let outText: string[];

beforeEach(() => {
  outDir = mkdtempSync(join(tmpdir(), 'figures-'));
  errText = [];
  outText = [];
  vi.spyOn(console, 'error').mockImplementation((msg) => errText.push(String(msg)));
  vi.spyOn(console, 'log').mockImplementation((msg) => outText.push(String(msg)));
  vi.spyOn(process.stdout, 'write').mockImplementation((chunk) => {
    outText.push(String(chunk));
    return true;
  });
});

afterEach(() => {
  vi.restoreAllMocks();
});

describe('run', () => {
  it('renders an order plot end to end', () => {
    const out = join(outDir, 'order.svg');
    const code = run([
      'order_plot',
      '--errors', fixture('errors_gausson.csv'),
      '--orders', fixture('orders_gausson.csv'),
      '--guides', '1',
      '--out', out,
    ]);
    expect(code).toBe(0);
    expect(readFileSync(out, 'utf8')).toMatch(/^<svg /);
    expect(outText.join('')).toContain(`wrote ${out}`);
  });

  it('renders a mass plot end to end', () => {
    const out = join(outDir, 'mass.svg');
    expect(run(['mass_plot', '--mass', fixture('mass.csv'), '--out', out])).toBe(0);
    expect(existsSync(out)).toBe(true);
  });

  it('renders a profile plot end to end', () => {
    const out = join(outDir, 'prof.svg');
    expect(run([
      'profile_plot', '--profiles', fixture('profiles.csv'), '--part', 're', '--out', out,
    ])).toBe(0);
    expect(existsSync(out)).toBe(true);
  });

  it('prints usage on --help', () => {
    expect(run(['--help'])).toBe(0);
    expect(outText.join('')).toContain('usage: figures');
  });

  it('rejects an unknown figure kind', () => {
    expect(run(['pie_chart', '--out', join(outDir, 'x.svg')])).toBe(2);
    expect(errText.join('\n')).toContain("unknown figure kind 'pie_chart'");
  });

  it('rejects a missing --out', () => {
    expect(run(['mass_plot', '--mass', fixture('mass.csv')])).toBe(2);
    expect(errText.join('\n')).toContain('--out is required');
  });

  it('rejects unknown flags', () => {
    expect(run(['mass_plot', '--mass', fixture('mass.csv'), '--shiny',
                '--out', join(outDir, 'x.svg')])).toBe(2);
  });

  it('rejects png output naming the supported format', () => {
    const out = join(outDir, 'fig.png');
    expect(run(['mass_plot', '--mass', fixture('mass.csv'), '--out', out])).toBe(2);
    expect(errText.join('\n')).toContain('svg is the only format');
    expect(existsSync(out)).toBe(false);
  });

  it('rejects malformed guide lists', () => {
    expect(run([
      'order_plot',
      '--errors', fixture('errors_gausson.csv'),
      '--orders', fixture('orders_gausson.csv'),
      '--guides', '0.5,huh',
      '--out', join(outDir, 'x.svg'),
    ])).toBe(2);
    expect(errText.join('\n')).toContain('--guides');
  });

  it('requires the input that matches the kind', () => {
    expect(run(['order_plot', '--mass', fixture('mass.csv'),
                '--out', join(outDir, 'x.svg')])).toBe(2);
    expect(errText.join('\n')).toContain('order_plot requires --errors');
  });

  it('exits 1 on a schema violation, naming the column', () => {
    const bad = join(outDir, 'errors.csv');
    writeFileSync(bad, 'tau,N,t,err\n0.5,8,1,0.25\n');
    const out = join(outDir, 'x.svg');
    expect(run(['order_plot', '--errors', bad,
                '--orders', fixture('orders_gausson.csv'), '--out', out])).toBe(1);
    expect(errText.join('\n')).toContain("missing column 'mass_drift'");
    expect(existsSync(out)).toBe(false);
  });

  it('exits 1 on an empty CSV body and emits no image', () => {
    const bad = join(outDir, 'mass.csv');
    writeFileSync(bad, 'step,t,mass,mass_over_initial\n');
    const out = join(outDir, 'x.svg');
    expect(run(['mass_plot', '--mass', bad, '--out', out])).toBe(1);
    expect(errText.join('\n')).toContain('no data rows');
    expect(existsSync(out)).toBe(false);
  });

  it('exits 1 on a missing input file', () => {
    expect(run(['mass_plot', '--mass', join(outDir, 'nope.csv'),
                '--out', join(outDir, 'x.svg')])).toBe(1);
    expect(errText.join('\n')).toContain('cannot read');
  });

  it('is byte-stable across repeated invocations', () => {
    const a = join(outDir, 'a.svg');
    const b = join(outDir, 'b.svg');
    const argv = (out: string) => [
      'profile_plot', '--profiles', fixture('profiles.csv'), '--out', out,
    ];
    expect(run(argv(a))).toBe(0);
    expect(run(argv(b))).toBe(0);
    expect(readFileSync(a)).toEqual(readFileSync(b));
  });
});

describe('figure regeneration from sweep outputs', () => {
  // The four figure kinds produced by a convergence study: the log-log
  // error plot for a smooth run, the same for rough data, the mass trace,
  // and the real/imaginary profile pair.
  const cases: Array<{name: string; argv: string[]; orders?: string}> = [
    {
      name: 'order_smooth.svg',
      orders: 'orders_gausson.csv',
      argv: ['order_plot', '--errors', fixture('errors_gausson.csv'),
             '--orders', fixture('orders_gausson.csv'), '--guides', '1'],
    },
    {
      name: 'order_rough.svg',
      orders: 'orders_rough.csv',
      argv: ['order_plot', '--errors', fixture('errors_rough.csv'),
             '--orders', fixture('orders_rough.csv'), '--guides', '0.4,0.5'],
    },
    {name: 'mass.svg', argv: ['mass_plot', '--mass', fixture('mass.csv')]},
    {
      name: 'profile_re.svg',
      argv: ['profile_plot', '--profiles', fixture('profiles.csv'), '--part', 're'],
    },
    {
      name: 'profile_im.svg',
      argv: ['profile_plot', '--profiles', fixture('profiles.csv'), '--part', 'im'],
    },
  ];

  it('regenerates every figure kind from the recorded CSVs', () => {
    for (const c of cases) {
      const out = join(outDir, c.name);
      expect(run([...c.argv, '--out', out]), c.name).toBe(0);
      const svg = readFileSync(out, 'utf8');
      expect(svg.startsWith('<svg '), c.name).toBe(true);
      expect(svg.endsWith('</svg>\n'), c.name).toBe(true);
    }
  });

  it('keeps slope annotations in lockstep with the orders table', () => {
    for (const c of cases.filter((c) => c.orders !== undefined)) {
      const out = join(outDir, c.name);
      expect(run([...c.argv, '--out', out])).toBe(0);
      const svg = readFileSync(out, 'utf8');
      for (const o of loadOrders(fixture(c.orders!))) {
        expect(svg, c.name).toContain(`slope ${o.slope.toFixed(2)}`);
      }
    }
  });
});
