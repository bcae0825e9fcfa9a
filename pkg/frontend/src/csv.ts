// Readers for the solver's CSV outputs. Schemas are strict: headers must
// list exactly the documented columns in order, every cell must be a finite
// number. Any violation raises DataError naming the offending column.
import {readFileSync} from 'fs';
import Papa from 'papaparse';

export class DataError extends Error {}

export interface ColumnSpec {
  name: string;
  kind: 'float' | 'int';
}

export interface ErrorRow {
  tau: number;
  N: number;
  t: number;
  err: number;
  massDrift: number;
}

export interface OrderRow {
  t: number;
  slope: number;
  intercept: number;
  r2: number;
}

export interface MassRow {
  step: number;
  t: number;
  mass: number;
  massOverInitial: number;
}

export interface ProfileRow {
  t: number;
  x: number;
  re: number;
  im: number;
}

export function parseRows(text: string, label: string, columns: ColumnSpec[]): number[][] {
  if (text.trim() === '') {
    throw new DataError(`${label}: empty file`);
  }
  const parsed = Papa.parse<string[]>(text.trim(), {delimiter: ',', skipEmptyLines: true});
  if (parsed.errors.length > 0) {
    const e = parsed.errors[0];
    throw new DataError(`${label}: ${e.message}`);
  }
  const grid = parsed.data;
  const header = grid[0];
  columns.forEach((col, i) => {
    if (i >= header.length) {
      throw new DataError(`${label}: missing column '${col.name}'`);
    }
    if (header[i] !== col.name) {
      throw new DataError(
        `${label}: expected column ${i + 1} to be '${col.name}', got '${header[i]}'`);
    }
  });
  if (header.length > columns.length) {
    throw new DataError(`${label}: unexpected column '${header[columns.length]}'`);
  }
  const body = grid.slice(1);
  if (body.length === 0) {
    throw new DataError(`${label}: no data rows`);
  }
  return body.map((cells, r) => {
    // header is file row 1, so body row r lives on file row r + 2
    if (cells.length !== columns.length) {
      throw new DataError(
        `${label}: row ${r + 2} has ${cells.length} cells, expected ${columns.length}`);
    }
    return columns.map((col, i) => {
      const raw = cells[i].trim();
      const v = Number(raw);
      if (raw === '' || !Number.isFinite(v)) {
        throw new DataError(
          `${label}: row ${r + 2}, column '${col.name}': not a finite number ('${cells[i]}')`);
      }
      if (col.kind === 'int' && !Number.isInteger(v)) {
        throw new DataError(
          `${label}: row ${r + 2}, column '${col.name}': not an integer ('${cells[i]}')`);
      }
      return v;
    });
  });
}

function readText(path: string): string {
  try {
    return readFileSync(path, 'utf8');
  } catch (e) {
    const code = (e as NodeJS.ErrnoException).code ?? 'unreadable';
    throw new DataError(`${path}: cannot read (${code})`);
  }
}

const ERROR_COLUMNS: ColumnSpec[] = [
  {name: 'tau', kind: 'float'},
  {name: 'N', kind: 'int'},
  {name: 't', kind: 'float'},
  {name: 'err', kind: 'float'},
  {name: 'mass_drift', kind: 'float'},
];

const ORDER_COLUMNS: ColumnSpec[] = [
  {name: 't', kind: 'float'},
  {name: 'slope', kind: 'float'},
  {name: 'intercept', kind: 'float'},
  {name: 'r2', kind: 'float'},
];

const MASS_COLUMNS: ColumnSpec[] = [
  {name: 'step', kind: 'int'},
  {name: 't', kind: 'float'},
  {name: 'mass', kind: 'float'},
  {name: 'mass_over_initial', kind: 'float'},
];

const PROFILE_COLUMNS: ColumnSpec[] = [
  {name: 't', kind: 'float'},
  {name: 'x', kind: 'float'},
  {name: 're', kind: 'float'},
  {name: 'im', kind: 'float'},
];

export function loadErrors(path: string): ErrorRow[] {
  return parseRows(readText(path), path, ERROR_COLUMNS).map(
    ([tau, N, t, err, massDrift]) => ({tau, N, t, err, massDrift}));
}

export function loadOrders(path: string): OrderRow[] {
  return parseRows(readText(path), path, ORDER_COLUMNS).map(
    ([t, slope, intercept, r2]) => ({t, slope, intercept, r2}));
}

export function loadMass(path: string): MassRow[] {
  return parseRows(readText(path), path, MASS_COLUMNS).map(
    ([step, t, mass, massOverInitial]) => ({step, t, mass, massOverInitial}));
}

export function loadProfiles(path: string): ProfileRow[] {
  return parseRows(readText(path), path, PROFILE_COLUMNS).map(
    ([t, x, re, im]) => ({t, x, re, im}));
}
