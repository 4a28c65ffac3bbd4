// Pure geometry: map API samples into SVG coordinates. Scores live on a
// fixed [0, 100] axis; the time axis spans whatever the data needs.

import type { CurvePoint } from "./api.js";

export interface Viewport {
  width: number;
  height: number;
  padding: number;
}

export const DEFAULT_VIEWPORT: Viewport = { width: 720, height: 360, padding: 40 };

export function timeExtent(curve: CurvePoint[], overlayMaxHours = 0): number {
  let max = overlayMaxHours;
  for (const [t] of curve) max = Math.max(max, t);
  return max > 0 ? max : 1;
}

export function toPixelX(tHours: number, tMax: number, vp: Viewport): number {
  return vp.padding + (tHours / tMax) * (vp.width - 2 * vp.padding);
}

export function toPixelY(score: number, vp: Viewport): number {
  return vp.height - vp.padding - (score / 100) * (vp.height - 2 * vp.padding);
}

/** SVG path ("M x y L x y ...") through every curve sample, in order. */
export function curvePath(curve: CurvePoint[], tMax: number, vp: Viewport): string {
  return curve
    .map(([t, score], i) => {
      const x = toPixelX(t, tMax, vp);
      const y = toPixelY(score, vp);
      return `${i === 0 ? "M" : "L"} ${round2(x)} ${round2(y)}`;
    })
    .join(" ");
}

export interface Bar {
  x: number;
  y: number;
  width: number;
  height: number;
}

/** Histogram bars scaled so the tallest bucket fills the plot height. */
export function histogramBars(
  histogram: [number, number][],
  bucketWidthHours: number,
  tMax: number,
  vp: Viewport,
): Bar[] {
  const tallest = Math.max(1, ...histogram.map(([, count]) => count));
  const floor = toPixelY(0, vp);
  return histogram
    .filter(([, count]) => count > 0)
    .map(([start, count]) => {
      const x0 = toPixelX(start, tMax, vp);
      const x1 = toPixelX(Math.min(start + bucketWidthHours, tMax), tMax, vp);
      const top = toPixelY((count / tallest) * 100, vp);
      return { x: round2(x0), y: round2(top), width: round2(x1 - x0), height: round2(floor - top) };
    });
}

/** CDF drawn against the same axes, fractions stretched onto [0, 100]. */
export function cdfPath(cdf: [number, number][], tMax: number, vp: Viewport): string {
  return cdf
    .map(([hours, fraction], i) => {
      const x = toPixelX(hours, tMax, vp);
      const y = toPixelY(fraction * 100, vp);
      return `${i === 0 ? "M" : "L"} ${round2(x)} ${round2(y)}`;
    })
    .join(" ");
}

function round2(value: number): number {
  return Math.round(value * 100) / 100;
}
