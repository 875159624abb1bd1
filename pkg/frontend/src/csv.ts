/**
 * Minimal RFC-4180 reader for the solver's output files: header row plus
 * all-numeric body, CRLF or LF line endings, no quoted fields (the writer
 * never emits them).
 */

export interface Table {
  header: string[];
  rows: number[][];
}

export class SchemaError extends Error {}

export function parseCsv(text: string): Table {
  const lines = text.split(/\r\n|\n/).filter((line) => line.length > 0);
  if (lines.length < 1) {
    throw new SchemaError("empty CSV file");
  }
  const header = lines[0].split(",");
  const rows = lines.slice(1).map((line, i) => {
    const cells = line.split(",");
    if (cells.length !== header.length) {
      throw new SchemaError(`row ${i + 1} has ${cells.length} cells, header has ${header.length}`);
    }
    return cells.map((cell, j) => {
      const v = Number(cell);
      if (!Number.isFinite(v)) {
        throw new SchemaError(`row ${i + 1}, column "${header[j]}": not a finite number: ${cell}`);
      }
      return v;
    });
  });
  return { header, rows };
}

/** Assert the header matches exactly (order included). */
export function expectHeader(table: Table, expected: string[], file: string): void {
  if (table.header.length !== expected.length ||
      !expected.every((name, i) => table.header[i] === name)) {
    throw new SchemaError(
      `${file}: header [${table.header.join(",")}] does not match expected [${expected.join(",")}]`,
    );
  }
}

/** Assert the header starts with a fixed prefix (for variable-width files). */
export function expectHeaderPrefix(table: Table, prefix: string[], file: string): void {
  if (table.header.length < prefix.length ||
      !prefix.every((name, i) => table.header[i] === name)) {
    throw new SchemaError(
      `${file}: header [${table.header.join(",")}] does not start with [${prefix.join(",")}]`,
    );
  }
}

export function column(table: Table, name: string): number[] {
  const idx = table.header.indexOf(name);
  if (idx < 0) {
    throw new SchemaError(`missing column "${name}"`);
  }
  return table.rows.map((row) => row[idx]);
}
