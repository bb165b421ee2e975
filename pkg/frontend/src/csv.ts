/**
 * CSV loading with header validation against the harness output schemas.
 *
 * Every consumer states the columns it needs; a file missing one of them
 * fails with a MissingColumnError naming the column and the file, instead
 * of silently plotting NaNs.
 */

import { readFileSync } from "node:fs";
import Papa from "papaparse";

export class MissingColumnError extends Error {
  constructor(column: string, source: string, header: string[]) {
    super(
      `column "${column}" not found in ${source} (header: ${header.join(", ")})`,
    );
    this.name = "MissingColumnError";
  }
}

export class EmptyCsvError extends Error {
  constructor(source: string) {
    super(`${source} contains no data rows`);
    this.name = "EmptyCsvError";
  }
}

export interface Table {
  /** Source label used in error messages (usually the file path). */
  source: string;
  header: string[];
  rows: Record<string, string>[];
}

export function parseCsv(text: string, source: string): Table {
  const parsed = Papa.parse<Record<string, string>>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  const header = parsed.meta.fields ?? [];
  return { source, header, rows: parsed.data };
}

export function loadCsv(path: string): Table {
  return parseCsv(readFileSync(path, "utf8"), path);
}

export function requireColumns(table: Table, columns: string[]): void {
  for (const c of columns) {
    if (!table.header.includes(c)) {
      throw new MissingColumnError(c, table.source, table.header);
    }
  }
  if (table.rows.length === 0) {
    throw new EmptyCsvError(table.source);
  }
}

/** Numeric cell access; empty cells (e.g. missing SP1) map to null. */
export function num(row: Record<string, string>, column: string): number | null {
  const raw = row[column];
  if (raw === undefined || raw === "") return null;
  const v = Number(raw);
  return Number.isNaN(v) ? null : v;
}
