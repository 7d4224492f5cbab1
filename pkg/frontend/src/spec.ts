/** Figure specs use the same flat `key = value` format as experiment configs. */

export type FigureKind =
  | "counter-stats"
  | "entropy-scatter"
  | "quench-timeseries";

export interface HighlightRule {
  column: string;
  op: ">" | ">=" | "<" | "<=" | "==";
  value: number;
}

export interface FigureSpec {
  figure: FigureKind;
  inputs: string[];
  title: string;
  xlabel: string;
  ylabel: string;
  highlight?: HighlightRule;
}

const KNOWN_KEYS = new Set([
  "figure",
  "input",
  "title",
  "xlabel",
  "ylabel",
  "highlight",
  "out",
]);

const KINDS: FigureKind[] = [
  "counter-stats",
  "entropy-scatter",
  "quench-timeseries",
];

export function parseKeyValues(text: string): Map<string, string> {
  const out = new Map<string, string>();
  text.split(/\r?\n/).forEach((line, index) => {
    const stripped = line.split("#", 1)[0].trim();
    if (!stripped) return;
    const eq = stripped.indexOf("=");
    if (eq < 0) {
      throw new Error(`line ${index + 1}: expected 'key = value'`);
    }
    const key = stripped.slice(0, eq).trim();
    if (out.has(key)) {
      throw new Error(`duplicate key '${key}'`);
    }
    out.set(key, stripped.slice(eq + 1).trim());
  });
  return out;
}

export function parseHighlight(text: string): HighlightRule {
  const match = text.match(/^(\w+)\s*(>=|<=|==|>|<)\s*(-?[\d.eE+]+)$/);
  if (!match) {
    throw new Error(
      `bad highlight rule '${text}' (expected like 'overlap_sq > 0.05')`,
    );
  }
  const value = Number(match[3]);
  if (!Number.isFinite(value)) {
    throw new Error(`bad highlight threshold '${match[3]}'`);
  }
  return { column: match[1], op: match[2] as HighlightRule["op"], value };
}

export function evalRule(rule: HighlightRule, cell: number): boolean {
  switch (rule.op) {
    case ">":
      return cell > rule.value;
    case ">=":
      return cell >= rule.value;
    case "<":
      return cell < rule.value;
    case "<=":
      return cell <= rule.value;
    case "==":
      return cell === rule.value;
  }
}

export function parseFigureSpec(text: string): FigureSpec {
  const pairs = parseKeyValues(text);
  for (const key of pairs.keys()) {
    if (!KNOWN_KEYS.has(key)) {
      throw new Error(`unknown spec key '${key}'`);
    }
  }
  const figure = pairs.get("figure");
  if (!figure || !KINDS.includes(figure as FigureKind)) {
    throw new Error(
      `spec needs 'figure' set to one of: ${KINDS.join(", ")}`,
    );
  }
  const input = pairs.get("input");
  if (!input) {
    throw new Error("spec needs 'input' (comma-separated CSV paths)");
  }
  const inputs = input
    .split(",")
    .map((p) => p.trim())
    .filter((p) => p.length > 0);
  const spec: FigureSpec = {
    figure: figure as FigureKind,
    inputs,
    title: pairs.get("title") ?? "",
    xlabel: pairs.get("xlabel") ?? "",
    ylabel: pairs.get("ylabel") ?? "",
  };
  const highlight = pairs.get("highlight");
  if (highlight !== undefined) {
    spec.highlight = parseHighlight(highlight);
  }
  return spec;
}
