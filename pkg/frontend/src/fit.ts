/** Ordinary least squares line fit with standard errors on the slope. */

export interface LineFit {
  slope: number;
  intercept: number;
  /** standard error of the slope (residual-based; 0 when underdetermined) */
  slopeStderr: number;
}

export function fitLine(xs: number[], ys: number[]): LineFit {
  const n = xs.length;
  if (n < 2 || n !== ys.length) {
    throw new Error("line fit needs at least two (x, y) points");
  }
  const mx = xs.reduce((a, b) => a + b, 0) / n;
  const my = ys.reduce((a, b) => a + b, 0) / n;
  let sxx = 0;
  let sxy = 0;
  for (let i = 0; i < n; i++) {
    sxx += (xs[i] - mx) ** 2;
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx === 0) {
    throw new Error("line fit needs distinct x values");
  }
  const slope = sxy / sxx;
  const intercept = my - slope * mx;
  let ss = 0;
  for (let i = 0; i < n; i++) {
    ss += (ys[i] - intercept - slope * xs[i]) ** 2;
  }
  const slopeStderr = n > 2 ? Math.sqrt(ss / (n - 2) / sxx) : 0;
  return { slope, intercept, slopeStderr };
}
