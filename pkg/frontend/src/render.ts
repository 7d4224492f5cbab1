import { readFileSync } from "node:fs";

import { parseTable } from "./csv.js";
import { SUPPORTED_SCHEMAS, renderFigure } from "./figures.js";
import { FigureSpec, parseFigureSpec } from "./spec.js";

/** Render straight from CSV text blobs (pure: no filesystem, no clock). */
export function renderFromText(csvTexts: string[], spec: FigureSpec): string {
  const schema = SUPPORTED_SCHEMAS[spec.figure];
  const tables = csvTexts.map((text) => parseTable(text, schema));
  return renderFigure(tables, spec);
}

/** Load the spec's input CSVs and render. */
export function renderSpecFile(specPath: string): string {
  const spec = parseFigureSpec(readFileSync(specPath, "utf8"));
  const texts = spec.inputs.map((p) => readFileSync(p, "utf8"));
  return renderFromText(texts, spec);
}
