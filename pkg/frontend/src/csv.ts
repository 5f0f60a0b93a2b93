/** CSV loading for cadam run directories, with column validation. */

export class SchemaMismatch extends Error {
  constructor(public readonly column: string, source: string) {
    super(`missing column "${column}" in ${source}`);
    this.name = "SchemaMismatch";
  }
}

export interface Table {
  columns: string[];
  rows: Record<string, string>[];
}

export function parseCsv(text: string): Table {
  const lines = text.trim().split("\n");
  const columns = lines[0].split(",");
  const rows = lines.slice(1).map((line) => {
    const cells = line.split(",");
    const row: Record<string, string> = {};
    columns.forEach((c, i) => (row[c] = cells[i] ?? ""));
    return row;
  });
  return { columns, rows };
}

export function requireColumns(table: Table, needed: string[], source: string): void {
  for (const column of needed) {
    if (!table.columns.includes(column)) {
      throw new SchemaMismatch(column, source);
    }
  }
}

/** Numeric column; empty cells become NaN and are dropped by the plots. */
export function numericColumn(table: Table, column: string): number[] {
  return table.rows.map((r) => (r[column] === "" ? NaN : Number(r[column])));
}
