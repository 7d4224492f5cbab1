import Papa from "papaparse";

/** Parsed CSV with its schema stamp stripped off the rows. */
export interface Table {
  schema: string;
  columns: string[];
  rows: Record<string, string>[];
}

/**
 * Parse a schema-stamped CSV. The first header token must be
 * `schema_version` and every row must carry `expectedSchema` in that column.
 */
export function parseTable(text: string, expectedSchema: string): Table {
  const parsed = Papa.parse<string[]>(text.trim(), { skipEmptyLines: true });
  if (parsed.errors.length > 0) {
    throw new Error(`CSV parse error: ${parsed.errors[0].message}`);
  }
  const data = parsed.data;
  if (data.length === 0) {
    throw new Error("empty CSV");
  }
  const header = data[0];
  if (header[0] !== "schema_version") {
    throw new Error(
      `first header token must be 'schema_version', got '${header[0]}'`,
    );
  }
  const columns = header.slice(1);
  const rows: Record<string, string>[] = [];
  for (const line of data.slice(1)) {
    if (line[0] !== expectedSchema) {
      throw new Error(
        `schema mismatch: expected '${expectedSchema}', got '${line[0]}'`,
      );
    }
    const row: Record<string, string> = {};
    columns.forEach((name, i) => {
      row[name] = line[i + 1] ?? "";
    });
    rows.push(row);
  }
  return { schema: expectedSchema, columns, rows };
}

/** Numeric column accessor; missing columns and non-numeric cells throw. */
export function numbers(table: Table, column: string): number[] {
  if (!table.columns.includes(column)) {
    throw new Error(
      `missing column '${column}' (have: ${table.columns.join(", ")})`,
    );
  }
  return table.rows.map((row) => {
    const value = Number(row[column]);
    if (!Number.isFinite(value)) {
      throw new Error(`non-numeric value '${row[column]}' in column '${column}'`);
    }
    return value;
  });
}

/** String column accessor; missing columns throw. */
export function strings(table: Table, column: string): string[] {
  if (!table.columns.includes(column)) {
    throw new Error(
      `missing column '${column}' (have: ${table.columns.join(", ")})`,
    );
  }
  return table.rows.map((row) => row[column]);
}
