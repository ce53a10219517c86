/** Minimal deterministic SVG scatter/line plot builder.
 *
 * Every coordinate and label is produced by one fixed formatter, so a given
 * data series always yields the identical SVG string.
 */

export const WIDTH = 640;
export const HEIGHT = 420;
export const MARGIN = { left: 64, right: 20, top: 40, bottom: 48 };

/** Fixed shortest-stable number format used for all output. */
export function fmt(x: number): string {
  if (!Number.isFinite(x)) return String(x);
  const r = Number(x.toPrecision(6));
  return Object.is(r, -0) ? "0" : String(r);
}

export interface Scale {
  domain: [number, number];
  range: [number, number];
  log: boolean;
}

export function makeScale(
  values: number[],
  range: [number, number],
  log: boolean,
  pad = 0.08,
): Scale {
  const finite = values.filter((v) => Number.isFinite(v) && (!log || v > 0));
  if (finite.length === 0) {
    throw new Error("no finite values to scale");
  }
  let lo = Math.min(...finite);
  let hi = Math.max(...finite);
  if (log) {
    lo = Math.log10(lo);
    hi = Math.log10(hi);
  }
  if (lo === hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  const span = hi - lo;
  return { domain: [lo - pad * span, hi + pad * span], range, log };
}

export function scaleApply(s: Scale, v: number): number {
  const t = s.log ? Math.log10(v) : v;
  const [d0, d1] = s.domain;
  const [r0, r1] = s.range;
  return r0 + ((t - d0) / (d1 - d0)) * (r1 - r0);
}

function ticks(s: Scale, count = 6): number[] {
  const [d0, d1] = s.domain;
  const step = (d1 - d0) / (count - 1);
  const out: number[] = [];
  for (let i = 0; i < count; i++) {
    const t = d0 + i * step;
    out.push(s.log ? 10 ** t : t);
  }
  return out;
}

export interface Series {
  points: Array<{ x: number; y: number; yerr?: number }>;
  color: string;
  label: string;
  marker: "circle" | "none";
  line: boolean;
  dashed?: boolean;
}

export interface PlotSpecData {
  title: string;
  xLabel: string;
  yLabel: string;
  logY: boolean;
  series: Series[];
  annotations: string[];
}

export function renderSvg(spec: PlotSpecData): string {
  const xs = spec.series.flatMap((s) => s.points.map((p) => p.x));
  const ys = spec.series.flatMap((s) =>
    s.points.flatMap((p) =>
      p.yerr ? [p.y - p.yerr, p.y + p.yerr, p.y] : [p.y],
    ),
  );
  const sx = makeScale(xs, [MARGIN.left, WIDTH - MARGIN.right], false);
  const sy = makeScale(ys, [HEIGHT - MARGIN.bottom, MARGIN.top], spec.logY);

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" ` +
      `height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}" ` +
      `font-family="Helvetica, Arial, sans-serif" font-size="12">`,
  );
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);
  parts.push(
    `<text x="${WIDTH / 2}" y="22" text-anchor="middle" ` +
      `font-size="15">${spec.title}</text>`,
  );

  // axes and ticks
  const x0 = MARGIN.left;
  const x1 = WIDTH - MARGIN.right;
  const y0 = HEIGHT - MARGIN.bottom;
  const y1 = MARGIN.top;
  parts.push(
    `<line x1="${x0}" y1="${y0}" x2="${x1}" y2="${y0}" stroke="black"/>`,
  );
  parts.push(
    `<line x1="${x0}" y1="${y0}" x2="${x0}" y2="${y1}" stroke="black"/>`,
  );
  for (const t of ticks(sx)) {
    const px = fmt(scaleApply(sx, t));
    parts.push(
      `<line x1="${px}" y1="${y0}" x2="${px}" y2="${y0 + 5}" stroke="black"/>`,
    );
    parts.push(
      `<text x="${px}" y="${y0 + 18}" text-anchor="middle">${fmt(t)}</text>`,
    );
  }
  for (const t of ticks(sy)) {
    const py = fmt(scaleApply(sy, t));
    parts.push(
      `<line x1="${x0 - 5}" y1="${py}" x2="${x0}" y2="${py}" stroke="black"/>`,
    );
    parts.push(
      `<text x="${x0 - 8}" y="${py}" text-anchor="end" ` +
        `dominant-baseline="middle">${fmt(t)}</text>`,
    );
  }
  parts.push(
    `<text x="${(x0 + x1) / 2}" y="${HEIGHT - 10}" ` +
      `text-anchor="middle">${spec.xLabel}</text>`,
  );
  parts.push(
    `<text x="16" y="${(y0 + y1) / 2}" text-anchor="middle" ` +
      `transform="rotate(-90 16 ${(y0 + y1) / 2})">${spec.yLabel}</text>`,
  );

  // data
  for (const series of spec.series) {
    const pts = series.points.map((p) => ({
      px: scaleApply(sx, p.x),
      py: scaleApply(sy, p.y),
      p,
    }));
    if (series.line) {
      const d = pts.map(({ px, py }) => `${fmt(px)},${fmt(py)}`).join(" ");
      const dash = series.dashed ? ' stroke-dasharray="6 4"' : "";
      parts.push(
        `<polyline points="${d}" fill="none" ` +
          `stroke="${series.color}"${dash}/>`,
      );
    }
    for (const { px, py, p } of pts) {
      if (p.yerr !== undefined && p.yerr > 0) {
        const lo = fmt(scaleApply(sy, p.y - p.yerr));
        const hi = fmt(scaleApply(sy, p.y + p.yerr));
        parts.push(
          `<line x1="${fmt(px)}" y1="${lo}" x2="${fmt(px)}" y2="${hi}" ` +
            `stroke="${series.color}"/>`,
        );
      }
      if (series.marker === "circle") {
        parts.push(
          `<circle cx="${fmt(px)}" cy="${fmt(py)}" r="3.5" ` +
            `fill="${series.color}"/>`,
        );
      }
    }
  }

  // legend and annotations
  let ly = MARGIN.top + 8;
  for (const series of spec.series) {
    parts.push(
      `<rect x="${x1 - 170}" y="${ly - 9}" width="12" height="12" ` +
        `fill="${series.color}"/>`,
    );
    parts.push(`<text x="${x1 - 152}" y="${ly + 1}">${series.label}</text>`);
    ly += 18;
  }
  for (const note of spec.annotations) {
    parts.push(`<text x="${x1 - 170}" y="${ly + 1}">${note}</text>`);
    ly += 18;
  }
  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
