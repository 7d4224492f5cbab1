#!/usr/bin/env node
/** Usage: gaugefrag-figures render --spec <path> --out <path> */

import { readFileSync, writeFileSync } from "node:fs";

import { parseKeyValues } from "./spec.js";
import { renderSpecFile } from "./render.js";

export function run(argv: string[]): number {
  if (argv[0] !== "render") {
    process.stderr.write("usage: gaugefrag-figures render --spec <path> --out <path>\n");
    return 1;
  }
  const args = new Map<string, string>();
  for (let i = 1; i < argv.length; i += 2) {
    const flag = argv[i];
    const value = argv[i + 1];
    if ((flag !== "--spec" && flag !== "--out") || value === undefined) {
      process.stderr.write(`unexpected argument '${flag}'\n`);
      return 1;
    }
    args.set(flag, value);
  }
  const specPath = args.get("--spec");
  if (!specPath) {
    process.stderr.write("--spec is required\n");
    return 1;
  }
  try {
    const outPath =
      args.get("--out") ?? parseKeyValues(readFileSync(specPath, "utf8")).get("out");
    if (!outPath) {
      process.stderr.write("no output path: pass --out or set 'out' in the spec\n");
      return 1;
    }
    writeFileSync(outPath, renderSpecFile(specPath));
  } catch (err) {
    process.stderr.write(`render failed: ${(err as Error).message}\n`);
    return 1;
  }
  return 0;
}

const isMain = process.argv[1]?.endsWith("cli.js");
if (isMain) {
  process.exit(run(process.argv.slice(2)));
}
