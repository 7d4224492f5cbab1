/** Deterministic SVG building blocks: no clock, no randomness, fixed size. */

export const WIDTH = 800;
export const HEIGHT = 600;

export interface Box {
  x0: number;
  y0: number;
  x1: number;
  y1: number;
}

/** Stable short decimal form (pure function of the value). */
export function fmt(value: number): string {
  if (Number.isInteger(value) && Math.abs(value) < 1e15) {
    return String(value);
  }
  return Number(value.toPrecision(8)).toString();
}

export function escapeText(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;");
}

export interface Scale {
  (value: number): number;
  min: number;
  max: number;
}

export function linearScale(
  min: number,
  max: number,
  outMin: number,
  outMax: number,
): Scale {
  const span = max - min || 1;
  const scale = ((value: number) =>
    outMin + ((value - min) / span) * (outMax - outMin)) as Scale;
  scale.min = min;
  scale.max = max;
  return scale;
}

export function extent(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (!Number.isFinite(lo)) return [0, 1];
  if (lo === hi) return [lo - 0.5, hi + 0.5];
  const pad = 0.05 * (hi - lo);
  return [lo - pad, hi + pad];
}

/** Round ticks covering [min, max]: 1/2/5 ladder, deterministic. */
export function ticks(min: number, max: number, count = 6): number[] {
  const span = max - min || 1;
  const rawStep = span / Math.max(count - 1, 1);
  const power = Math.floor(Math.log10(rawStep));
  const base = Math.pow(10, power);
  let step = base;
  for (const mult of [1, 2, 5, 10]) {
    step = mult * base;
    if (step >= rawStep) break;
  }
  const start = Math.ceil(min / step) * step;
  const out: number[] = [];
  for (let v = start; v <= max + 1e-12 * span; v += step) {
    out.push(Number(v.toPrecision(12)));
  }
  return out;
}

export function axes(box: Box, xs: Scale, ys: Scale, xlabel: string,
                     ylabel: string): string {
  const parts: string[] = [];
  parts.push(
    `<rect x="${fmt(box.x0)}" y="${fmt(box.y0)}" width="${fmt(box.x1 - box.x0)}" ` +
    `height="${fmt(box.y1 - box.y0)}" fill="none" stroke="#000000" stroke-width="1"/>`,
  );
  for (const t of ticks(xs.min, xs.max)) {
    const x = xs(t);
    if (x < box.x0 - 1e-9 || x > box.x1 + 1e-9) continue;
    parts.push(
      `<line x1="${fmt(x)}" y1="${fmt(box.y1)}" x2="${fmt(x)}" y2="${fmt(box.y1 + 5)}" stroke="#000000"/>`,
      `<text x="${fmt(x)}" y="${fmt(box.y1 + 18)}" font-family="Helvetica" font-size="11" text-anchor="middle">${fmt(t)}</text>`,
    );
  }
  for (const t of ticks(ys.min, ys.max)) {
    const y = ys(t);
    if (y < box.y0 - 1e-9 || y > box.y1 + 1e-9) continue;
    parts.push(
      `<line x1="${fmt(box.x0 - 5)}" y1="${fmt(y)}" x2="${fmt(box.x0)}" y2="${fmt(y)}" stroke="#000000"/>`,
      `<text x="${fmt(box.x0 - 8)}" y="${fmt(y + 4)}" font-family="Helvetica" font-size="11" text-anchor="end">${fmt(t)}</text>`,
    );
  }
  if (xlabel) {
    parts.push(
      `<text x="${fmt((box.x0 + box.x1) / 2)}" y="${fmt(box.y1 + 38)}" font-family="Helvetica" font-size="13" text-anchor="middle">${escapeText(xlabel)}</text>`,
    );
  }
  if (ylabel) {
    const x = box.x0 - 45;
    const y = (box.y0 + box.y1) / 2;
    parts.push(
      `<text x="${fmt(x)}" y="${fmt(y)}" font-family="Helvetica" font-size="13" text-anchor="middle" transform="rotate(-90 ${fmt(x)} ${fmt(y)})">${escapeText(ylabel)}</text>`,
    );
  }
  return parts.join("\n");
}

export function polyline(points: Array<[number, number]>, stroke: string,
                         width: number, cls: string): string {
  const coords = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
  return `<polyline class="${cls}" points="${coords}" fill="none" stroke="${stroke}" stroke-width="${fmt(width)}"/>`;
}

export function document(body: string, title: string): string {
  const head =
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
    `viewBox="0 0 ${WIDTH} ${HEIGHT}">\n` +
    `<rect width="${WIDTH}" height="${HEIGHT}" fill="#ffffff"/>\n` +
    (title
      ? `<text x="${WIDTH / 2}" y="24" font-family="Helvetica" font-size="15" text-anchor="middle">${escapeText(title)}</text>\n`
      : "");
  return head + body + "\n</svg>\n";
}
