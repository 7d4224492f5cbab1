import { Table, numbers, strings } from "./csv.js";
import { FigureSpec, evalRule } from "./spec.js";
import {
  Box,
  HEIGHT,
  Scale,
  WIDTH,
  axes,
  document,
  extent,
  fmt,
  linearScale,
  polyline,
} from "./svg.js";

export const SUPPORTED_SCHEMAS: Record<string, string> = {
  "counter-stats": "counters-v1",
  "entropy-scatter": "entropy-v1",
  "quench-timeseries": "quench-v1",
};

const POINT_COLOR = "#4a4a4a";
const HIGHLIGHT_COLOR = "#d62728";
const GUIDE_COLOR = "#ff9500";
const QUENCH_COLORS = ["#1f2937", "#7f1d1d", "#14532d", "#1e3a8a"];
const MICRO_COLORS = ["#9ca3af", "#fca5a5", "#86efac", "#93c5fd"];
const SERIES_PALETTE = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#8c564b",
  "#17becf",
  "#bcbd22",
  "#e377c2",
  "#7f7f7f",
];

function panelBox(index: number, panels: number): Box {
  const top = 40;
  const bottom = 50;
  const gap = 45;
  const height = (HEIGHT - top - bottom - gap * (panels - 1)) / panels;
  const y0 = top + index * (height + gap);
  return { x0: 70, y0, x1: WIDTH - 25, y1: y0 + height };
}

function scatterPoints(
  xs: Scale,
  ys: Scale,
  x: number[],
  y: number[],
  flags: boolean[],
): string {
  const base: string[] = [];
  const hot: string[] = [];
  for (let i = 0; i < x.length; i++) {
    const cx = fmt(xs(x[i]));
    const cy = fmt(ys(y[i]));
    if (flags[i]) {
      hot.push(
        `<circle class="highlight" cx="${cx}" cy="${cy}" r="4" fill="${HIGHLIGHT_COLOR}"/>`,
      );
    } else {
      base.push(
        `<circle class="point" cx="${cx}" cy="${cy}" r="2.5" fill="${POINT_COLOR}" fill-opacity="0.7"/>`,
      );
    }
  }
  // highlighted markers drawn last so they stay visible
  return base.concat(hot).join("\n");
}

export function renderEntropyScatter(tables: Table[], spec: FigureSpec): string {
  const table = tables[0];
  const energy = numbers(table, "energy");
  const entropy = numbers(table, "entropy");
  const inWindow = numbers(table, "in_micro_window");
  const rule = spec.highlight;
  const flagColumn = rule ? numbers(table, rule.column) : null;
  const flags = energy.map((_, i) =>
    rule && flagColumn ? evalRule(rule, flagColumn[i]) : false,
  );
  const box = panelBox(0, 1);
  const [xlo, xhi] = extent(energy);
  const [ylo, yhi] = extent(entropy.concat([0]));
  const xs = linearScale(xlo, xhi, box.x0, box.x1);
  const ys = linearScale(ylo, yhi, box.y1, box.y0);
  const parts = [axes(box, xs, ys, spec.xlabel || "energy", spec.ylabel || "half-chain entropy")];
  // two guide lines bracketing the microcanonical-window rows
  const windowEnergies = energy.filter((_, i) => inWindow[i] === 1);
  if (windowEnergies.length > 0) {
    const lo = Math.min(...windowEnergies);
    const hi = Math.max(...windowEnergies);
    for (const edge of [lo, hi]) {
      parts.push(
        `<line class="window-guide" x1="${fmt(xs(edge))}" y1="${fmt(box.y0)}" ` +
        `x2="${fmt(xs(edge))}" y2="${fmt(box.y1)}" stroke="${GUIDE_COLOR}" stroke-width="1.5"/>`,
      );
    }
  }
  parts.push(scatterPoints(xs, ys, energy, entropy, flags));
  return document(parts.join("\n"), spec.title);
}

interface Series {
  label: string;
  energy: number[];
  mean: number[];
  variance: number[];
}

function counterSeries(table: Table): Series[] {
  const operator = strings(table, "operator");
  const sval = strings(table, "s");
  const energy = numbers(table, "energy");
  const mean = numbers(table, "mean");
  const variance = numbers(table, "variance");
  const order: string[] = [];
  const bySeries = new Map<string, Series>();
  for (let i = 0; i < operator.length; i++) {
    const label = `${operator[i]}(${sval[i]})`;
    if (!bySeries.has(label)) {
      order.push(label);
      bySeries.set(label, { label, energy: [], mean: [], variance: [] });
    }
    const s = bySeries.get(label)!;
    s.energy.push(energy[i]);
    s.mean.push(mean[i]);
    s.variance.push(variance[i]);
  }
  return order.map((label) => bySeries.get(label)!);
}

export function renderCounterStats(tables: Table[], spec: FigureSpec): string {
  const series = counterSeries(tables[0]);
  const allEnergy = series.flatMap((s) => s.energy);
  const [xlo, xhi] = extent(allEnergy);
  const parts: string[] = [];
  (["mean", "variance"] as const).forEach((field, panel) => {
    const box = panelBox(panel, 2);
    const values = series.flatMap((s) => s[field]);
    const [ylo, yhi] = extent(values.concat([0]));
    const xs = linearScale(xlo, xhi, box.x0, box.x1);
    const ys = linearScale(ylo, yhi, box.y1, box.y0);
    parts.push(
      axes(box, xs, ys, panel === 1 ? spec.xlabel || "energy" : "",
           field === "mean" ? "expectation" : "variance"),
    );
    series.forEach((s, k) => {
      const color = SERIES_PALETTE[k % SERIES_PALETTE.length];
      const markers = s.energy
        .map(
          (e, i) =>
            `<circle class="series-${field}-${s.label}" cx="${fmt(xs(e))}" cy="${fmt(ys(s[field][i]))}" r="2" fill="${color}" fill-opacity="0.75"/>`,
        )
        .join("\n");
      parts.push(markers);
    });
  });
  // legend across the top
  const legend = series
    .map((s, k) => {
      const x = 80 + k * 85;
      const color = SERIES_PALETTE[k % SERIES_PALETTE.length];
      return (
        `<circle cx="${x}" cy="34" r="4" fill="${color}"/>` +
        `<text x="${x + 8}" y="38" font-family="Helvetica" font-size="11">${s.label}</text>`
      );
    })
    .join("\n");
  return document(parts.join("\n") + "\n" + legend, spec.title);
}

export function renderQuenchTimeseries(tables: Table[], spec: FigureSpec): string {
  const box = panelBox(0, 1);
  const allT = tables.flatMap((t) => numbers(t, "t"));
  const allObs = tables.flatMap((t) =>
    numbers(t, "obs_quench").concat(numbers(t, "obs_micro")),
  );
  const [xlo, xhi] = extent(allT);
  const [ylo, yhi] = extent(allObs);
  const xs = linearScale(xlo, xhi, box.x0, box.x1);
  const ys = linearScale(ylo, yhi, box.y1, box.y0);
  const parts = [
    axes(box, xs, ys, spec.xlabel || "t", spec.ylabel || "observable"),
  ];
  tables.forEach((table, k) => {
    const t = numbers(table, "t");
    const quench = numbers(table, "obs_quench");
    const micro = numbers(table, "obs_micro");
    const toPoints = (ys_: number[]): Array<[number, number]> =>
      t.map((ti, i) => [xs(ti), ys(ys_[i])] as [number, number]);
    parts.push(
      polyline(toPoints(micro), MICRO_COLORS[k % MICRO_COLORS.length], 1.5,
               `micro-${k}`),
      polyline(toPoints(quench), QUENCH_COLORS[k % QUENCH_COLORS.length], 2,
               `quench-${k}`),
    );
  });
  return document(parts.join("\n"), spec.title);
}

export function renderFigure(tables: Table[], spec: FigureSpec): string {
  switch (spec.figure) {
    case "entropy-scatter":
      return renderEntropyScatter(tables, spec);
    case "counter-stats":
      return renderCounterStats(tables, spec);
    case "quench-timeseries":
      return renderQuenchTimeseries(tables, spec);
  }
}
