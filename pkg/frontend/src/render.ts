/** Plot kinds: one deterministic figure specification per probe family. */

import { fitLine } from "./fit.js";
import { CsvError, parseResultsCsv, selectProbe, type ResultRow } from "./schema.js";
import { fmt, renderSvg, type PlotSpecData, type Series } from "./svg.js";

export type PlotKind = "disorder" | "correlator" | "milro" | "strange";

export interface PlotJob {
  csvText: string;
  kind: PlotKind;
}

const DATA_COLOR = "#1f5fa8";
const REFERENCE_COLOR = "#c44e52";

function dataSeries(
  points: Array<{ x: number; y: number; yerr?: number }>,
  label: string,
): Series {
  return { points, color: DATA_COLOR, label, marker: "circle", line: false };
}

function referenceCurve(
  f: (x: number) => number,
  lo: number,
  hi: number,
  label: string,
  samples = 101,
): Series {
  const points = [];
  for (let i = 0; i < samples; i++) {
    const x = lo + ((hi - lo) * i) / (samples - 1);
    points.push({ x, y: f(x) });
  }
  return {
    points,
    color: REFERENCE_COLOR,
    label,
    marker: "none",
    line: true,
    dashed: true,
  };
}

function need(row: ResultRow, field: "param1" | "param2" | "beta"): number {
  const v = row[field];
  if (v === null) {
    throw new CsvError("SchemaMismatch", `row ${row.run_id}: ${field} is empty`);
  }
  return v;
}

/** Semilog decay of the disorder operator vs string length, with the
 * fitted exponential rate annotated. */
function disorderSpec(rows: ResultRow[]): PlotSpecData {
  const picked = selectProbe(rows, ["disorder"]);
  const pts = picked
    .map((r) => ({ x: need(r, "param2"), y: r.mean, yerr: r.stderr }))
    .sort((a, b) => a.x - b.x);
  const usable = pts.filter((p) => p.y > 0);
  if (usable.length < 2) {
    throw new CsvError("EmptySelection", "need two positive means to fit a decay");
  }
  const fit = fitLine(
    usable.map((p) => p.x),
    usable.map((p) => Math.log(p.y)),
  );
  const beta = picked[0].beta;
  const series: Series[] = [dataSeries(pts, "measured ⟨∏X⟩")];
  if (beta !== null) {
    const rate = Math.log(Math.tanh(2 * beta));
    const lo = pts[0].x;
    const hi = pts[pts.length - 1].x;
    series.push(
      referenceCurve(
        (l) => Math.exp(rate * l),
        lo,
        hi,
        `tanh(2β)^l, β=${fmt(beta)}`,
      ),
    );
  }
  return {
    title: "Disorder operator decay",
    xLabel: "string length l",
    yLabel: "⟨∏X⟩",
    logY: true,
    series,
    annotations: [
      `fit slope ${fmt(fit.slope)} ± ${fmt(fit.slopeStderr)} per site`,
    ],
  };
}

/** Two-point ⟨ZZ⟩ vs β with the sech(2β)² reference curve. */
function correlatorSpec(rows: ResultRow[]): PlotSpecData {
  const picked = selectProbe(rows, ["correlator"]);
  const pts = picked
    .map((r) => ({ x: need(r, "beta"), y: r.mean, yerr: r.stderr }))
    .sort((a, b) => a.x - b.x);
  const hi = Math.max(...pts.map((p) => p.x), 1);
  const sech2 = (b: number) => 1 / Math.cosh(2 * b) ** 2;
  return {
    title: "Long-range order of the deformed chain",
    xLabel: "β",
    yLabel: "⟨Z_i Z_j⟩",
    logY: false,
    series: [
      dataSeries(pts, "measured ⟨ZZ⟩"),
      referenceCurve(sech2, 0, hi, "sech(2β)²"),
    ],
    annotations: [],
  };
}

/** Feedback-probe ⟨ZZ⟩ vs site separation. */
function milroSpec(rows: ResultRow[]): PlotSpecData {
  const picked = selectProbe(rows, ["milro"]);
  const pts = picked
    .map((r) => ({
      x: need(r, "param2") - need(r, "param1"),
      y: r.mean,
      yerr: r.stderr,
    }))
    .sort((a, b) => a.x - b.x);
  return {
    title: "Measurement-induced long-range order",
    xLabel: "site separation",
    yLabel: "⟨Z_a Z_b⟩",
    logY: false,
    series: [
      dataSeries(pts, "feedback probe"),
      referenceCurve(() => 1, pts[0].x, pts[pts.length - 1].x, "ordered value 1"),
    ],
    annotations: [],
  };
}

/** Strange-correlator pools and ratio with error bars. */
function strangeSpec(rows: ResultRow[]): PlotSpecData {
  const picked = selectProbe(rows, ["strange", "strange_num", "strange_den"]);
  const order = ["strange_num", "strange_den", "strange"];
  const labels: Record<string, string> = {
    strange_num: "numerator",
    strange_den: "denominator",
    strange: "ratio",
  };
  const pts = order
    .map((p, i) => ({ probe: p, i }))
    .flatMap(({ probe, i }) =>
      picked
        .filter((r) => r.probe === probe)
        .map((r) => ({ x: i, y: r.mean, yerr: r.stderr, label: labels[probe] })),
    );
  if (pts.length === 0) {
    throw new CsvError("EmptySelection", "no strange-correlator rows");
  }
  const ratio = picked.find((r) => r.probe === "strange");
  const annotations =
    ratio !== undefined
      ? [`ratio ${fmt(ratio.mean)} ± ${fmt(ratio.stderr)}`]
      : [];
  return {
    title: "Strange correlator (0 = numerator, 1 = denominator, 2 = ratio)",
    xLabel: "pool",
    yLabel: "value",
    logY: false,
    series: [dataSeries(pts, "sampled pools")],
    annotations,
  };
}

const SPEC_BUILDERS: Record<PlotKind, (rows: ResultRow[]) => PlotSpecData> = {
  disorder: disorderSpec,
  correlator: correlatorSpec,
  milro: milroSpec,
  strange: strangeSpec,
};

/** Figure specification (data series, labels, annotations) for a job. */
export function buildPlotSpec(job: PlotJob): PlotSpecData {
  const rows = parseResultsCsv(job.csvText);
  return SPEC_BUILDERS[job.kind](rows);
}

/** Deterministic SVG text for a job. */
export function render(job: PlotJob): string {
  return renderSvg(buildPlotSpec(job));
}
