import { readFileSync } from "fs";

export const AGGREGATE_COLUMNS = [
  "policy",
  "round",
  "mean",
  "stderr",
  "ci95",
  "n",
] as const;

export interface AggregateRow {
  policy: string;
  round: number;
  mean: number;
  stderr: number;
  ci95: number;
  n: number;
}

export interface AggregateTable {
  seed: number | null;
  rows: AggregateRow[];
  policies: string[];
}

export class CsvSchemaError extends Error {}

function parseNumber(field: string, column: string, line: number): number {
  const value = Number(field);
  if (field.trim() === "" || !Number.isFinite(value)) {
    throw new CsvSchemaError(
      `line ${line}: column "${column}" is not a finite number: "${field}"`,
    );
  }
  return value;
}

export function parseAggregateCsv(text: string): AggregateTable {
  const lines = text.split(/\r?\n/);
  let seed: number | null = null;
  const rows: AggregateRow[] = [];
  const policies: string[] = [];
  let header: string[] | null = null;

  for (let i = 0; i < lines.length; i++) {
    const line = lines[i].trim();
    if (line === "") continue;
    if (line.startsWith("#")) {
      const m = line.match(/^#\s*seed=(-?\d+)$/);
      if (m) seed = Number(m[1]);
      continue;
    }
    const fields = line.split(",");
    if (header === null) {
      header = fields.map((f) => f.trim());
      for (const column of AGGREGATE_COLUMNS) {
        if (!header.includes(column)) {
          throw new CsvSchemaError(`header is missing column "${column}"`);
        }
      }
      if (header.length !== AGGREGATE_COLUMNS.length) {
        throw new CsvSchemaError(
          `header has ${header.length} columns, expected ` +
            `${AGGREGATE_COLUMNS.length} (${AGGREGATE_COLUMNS.join(",")})`,
        );
      }
      continue;
    }
    if (fields.length !== header.length) {
      throw new CsvSchemaError(
        `line ${i + 1}: expected ${header.length} fields, got ${fields.length}`,
      );
    }
    const get = (column: string) => fields[header!.indexOf(column)];
    const row: AggregateRow = {
      policy: get("policy"),
      round: parseNumber(get("round"), "round", i + 1),
      mean: parseNumber(get("mean"), "mean", i + 1),
      stderr: parseNumber(get("stderr"), "stderr", i + 1),
      ci95: parseNumber(get("ci95"), "ci95", i + 1),
      n: parseNumber(get("n"), "n", i + 1),
    };
    if (row.policy.trim() === "") {
      throw new CsvSchemaError(`line ${i + 1}: empty policy name`);
    }
    rows.push(row);
    if (!policies.includes(row.policy)) policies.push(row.policy);
  }

  if (header === null) {
    throw new CsvSchemaError('header is missing column "policy"');
  }
  if (rows.length === 0) {
    throw new CsvSchemaError("no data rows after the header");
  }
  return { seed, rows, policies };
}

export function readAggregateCsv(path: string): AggregateTable {
  return parseAggregateCsv(readFileSync(path, "utf8"));
}

export function seriesFor(
  table: AggregateTable,
  policy: string,
): AggregateRow[] {
  const rows = table.rows
    .filter((r) => r.policy === policy)
    .sort((a, b) => a.round - b.round);
  return rows;
}
