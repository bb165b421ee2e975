/**
 * Figure renderers for the optimizer harness CSV outputs.
 *
 * Each renderer takes a parsed table and returns a complete SVG document
 * string.  All scales come from d3; nothing here touches the DOM, so the
 * renderers run in plain node and are fully deterministic.
 */

import { scaleLinear, scaleLog, type ScaleContinuousNumeric } from "d3-scale";
import { line as d3line } from "d3-shape";

import { num, requireColumns, type Table } from "./csv.js";
import {
  DEFAULT_MARGIN,
  PALETTE,
  SvgDoc,
  fmtTick,
  logTicks,
  round,
} from "./svg.js";

export type Scale = ScaleContinuousNumeric<number, number>;

export interface AxisSpec {
  label: string;
  log: boolean;
}

export class EmptyPlotError extends Error {
  constructor(reason: string) {
    super(reason);
    this.name = "EmptyPlotError";
  }
}

const WIDTH = 640;
const HEIGHT = 420;

interface Series {
  label: string;
  points: [number, number][];
  dash?: string;
  color?: string;
}

function extent(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (lo === hi) {
    // degenerate span: widen symmetrically so scales stay invertible
    lo = lo === 0 ? -1 : lo / 2;
    hi = hi === 0 ? 1 : hi * 2;
  }
  return [lo, hi];
}

function makeScale(spec: AxisSpec, domain: [number, number], range: [number, number]): Scale {
  return spec.log
    ? scaleLog().domain(domain).range(range)
    : scaleLinear().domain(domain).range(range).nice();
}

function ticksFor(spec: AxisSpec, scale: Scale): number[] {
  const [lo, hi] = scale.domain();
  return spec.log ? logTicks(lo, hi) : scale.ticks(6);
}

function drawFrame(
  doc: SvgDoc,
  x: Scale,
  y: Scale,
  xSpec: AxisSpec,
  ySpec: AxisSpec,
  title: string,
): void {
  const m = doc.margin;
  const x0 = m.left;
  const x1 = m.left + doc.innerWidth;
  const y0 = m.top + doc.innerHeight;
  const y1 = m.top;
  doc.line(x0, y0, x1, y0, "#000");
  doc.line(x0, y0, x0, y1, "#000");
  for (const t of ticksFor(xSpec, x)) {
    const px = x(t);
    doc.line(px, y0, px, y0 + 5, "#000");
    doc.text(px, y0 + 18, fmtTick(t), { anchor: "middle", size: 10 });
  }
  for (const t of ticksFor(ySpec, y)) {
    const py = y(t);
    doc.line(x0 - 5, py, x0, py, "#000");
    doc.text(x0 - 8, py + 3, fmtTick(t), { anchor: "end", size: 10 });
    doc.line(x0, py, x1, py, "#eee");
  }
  doc.text((x0 + x1) / 2, doc.height - 8, xSpec.label, { anchor: "middle" });
  doc.text(16, (y0 + y1) / 2, ySpec.label, { anchor: "middle", rotate: true });
  doc.text((x0 + x1) / 2, m.top - 10, title, { anchor: "middle", size: 13 });
}

function drawSeries(doc: SvgDoc, x: Scale, y: Scale, series: Series[]): void {
  const path = d3line<[number, number]>()
    .x((p) => round(x(p[0])))
    .y((p) => round(y(p[1])));
  series.forEach((s, i) => {
    const color = s.color ?? PALETTE[i % PALETTE.length];
    if (s.points.length === 1) {
      doc.circle(x(s.points[0][0]), y(s.points[0][1]), 3, color);
    } else if (s.points.length > 1) {
      doc.path(path(s.points) ?? "", color, 1.5, s.dash);
    }
  });
}

function drawLegend(doc: SvgDoc, series: Series[]): void {
  const x0 = doc.margin.left + doc.innerWidth + 10;
  series.forEach((s, i) => {
    const y = doc.margin.top + 14 * (i + 1);
    const color = s.color ?? PALETTE[i % PALETTE.length];
    doc.line(x0, y - 4, x0 + 18, y - 4, color, 2);
    doc.text(x0 + 24, y, s.label, { size: 10 });
  });
}

function chart(
  series: Series[],
  xSpec: AxisSpec,
  ySpec: AxisSpec,
  title: string,
  yDomain?: [number, number],
): string {
  const pts = series.flatMap((s) => s.points);
  if (pts.length === 0) {
    throw new EmptyPlotError(`no drawable points for "${title}"`);
  }
  const doc = new SvgDoc(WIDTH, HEIGHT, DEFAULT_MARGIN);
  const x = makeScale(xSpec, extent(pts.map((p) => p[0])), [
    doc.margin.left,
    doc.margin.left + doc.innerWidth,
  ]);
  const y = makeScale(ySpec, yDomain ?? extent(pts.map((p) => p[1])), [
    doc.margin.top + doc.innerHeight,
    doc.margin.top,
  ]);
  drawFrame(doc, x, y, xSpec, ySpec, title);
  drawSeries(doc, x, y, series);
  drawLegend(doc, series);
  return doc.render();
}

/** ecdf.csv: evals column plus one proportion column per algorithm. */
export function renderEcdf(table: Table): string {
  requireColumns(table, ["evals"]);
  const labels = table.header.filter((c) => c !== "evals");
  if (labels.length === 0) {
    throw new EmptyPlotError(`${table.source} has no algorithm columns`);
  }
  const series: Series[] = labels.map((label) => ({
    label,
    points: table.rows
      .map((r) => [num(r, "evals"), num(r, label)] as [number | null, number | null])
      .filter((p): p is [number, number] => p[0] !== null && p[1] !== null),
  }));
  return chart(
    series,
    { label: "evaluations", log: true },
    { label: "proportion of (trial, target) pairs solved", log: false },
    "runtime distribution",
    [0, 1],
  );
}

/** sweep.csv: success rate against the swept parameter. */
export function renderSuccessRate(table: Table, logX = false): string {
  const param = table.header[0];
  requireColumns(table, [param, "success_rate"]);
  const points = table.rows
    .map((r) => [num(r, param), num(r, "success_rate")] as [number | null, number | null])
    .filter((p): p is [number, number] => p[0] !== null && p[1] !== null);
  return chart(
    [{ label: "success rate", points }],
    { label: param, log: logX },
    { label: "success rate", log: false },
    `success rate vs ${param}`,
    [0, 1],
  );
}

/**
 * sweep.csv: SP1 cost against the swept parameter.  Rows whose sp1 cell is
 * empty (no trial succeeded) are omitted rather than drawn at zero.
 */
export function renderSp1(table: Table, logX = false): string {
  const param = table.header[0];
  requireColumns(table, [param, "sp1"]);
  const points = table.rows
    .map((r) => [num(r, param), num(r, "sp1")] as [number | null, number | null])
    .filter((p): p is [number, number] => p[0] !== null && p[1] !== null);
  if (points.length === 0) {
    throw new EmptyPlotError(
      `every row of ${table.source} has an empty sp1 cell (no successes)`,
    );
  }
  return chart(
    [{ label: "SP1", points }],
    { label: param, log: logX },
    { label: "SP1 (evaluations)", log: true },
    `SP1 vs ${param}`,
  );
}

/** history.csv: both learning-rate factors over evaluations, per trial. */
export function renderEtaHistory(table: Table): string {
  requireColumns(table, ["trial", "evals", "eta_m", "eta_sigma"]);
  const trials = [...new Set(table.rows.map((r) => r.trial))];
  const series: Series[] = [];
  trials.forEach((trial, i) => {
    const rows = table.rows.filter((r) => r.trial === trial);
    const color = PALETTE[i % PALETTE.length];
    for (const [column, dash] of [
      ["eta_m", undefined],
      ["eta_sigma", "4 3"],
    ] as const) {
      series.push({
        label: `trial ${trial} ${column === "eta_m" ? "mean factor" : "cov factor"}`,
        color,
        dash,
        points: rows
          .map((r) => [num(r, "evals"), num(r, column)] as [number | null, number | null])
          .filter((p): p is [number, number] => p[0] !== null && p[1] !== null && p[1] > 0),
      });
    }
  });
  return chart(
    series,
    { label: "evaluations", log: true },
    { label: "learning-rate factor", log: true },
    "learning-rate factor history",
  );
}

/** ode CSV (step,m,v): phase-plane trajectory of the mean/variance flow. */
export function renderOdePhase(table: Table): string {
  requireColumns(table, ["m", "v"]);
  const points = table.rows
    .map((r) => [num(r, "m"), num(r, "v")] as [number | null, number | null])
    .filter((p): p is [number, number] => p[0] !== null && p[1] !== null);
  const series: Series[] = [{ label: "trajectory", points }];
  return chart(
    series,
    { label: "mean m", log: false },
    { label: "variance v", log: false },
    "mean-variance flow trajectory",
  );
}
