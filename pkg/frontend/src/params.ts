// Slider ranges and log-scale conversions for the tunable parameters.

export type TunableParam = "tau" | "delta" | "base" | "threshold";

export interface ParamRange {
  min: number;
  max: number;
  default: number;
  logScale: boolean;
  label: string;
  unit: string;
}

export const PARAM_RANGES: Record<TunableParam, ParamRange> = {
  // One hour to one year, logarithmic: end-times span volatile URLs to file hashes.
  tau: { min: 1, max: 8760, default: 120, logScale: true, label: "End-time tau", unit: "h" },
  delta: { min: 0.05, max: 10, default: 0.74, logScale: true, label: "Decay speed delta", unit: "" },
  base: { min: 0, max: 100, default: 100, logScale: false, label: "Base score", unit: "" },
  threshold: { min: 0, max: 100, default: 0, logScale: false, label: "Removal threshold", unit: "" },
};

/** Map a slider position in [0, 1] to the parameter's value. */
export function sliderToValue(param: TunableParam, position: number): number {
  const range = PARAM_RANGES[param];
  const clamped = Math.min(1, Math.max(0, position));
  if (!range.logScale) {
    return range.min + clamped * (range.max - range.min);
  }
  const logMin = Math.log10(range.min);
  const logMax = Math.log10(range.max);
  return Math.pow(10, logMin + clamped * (logMax - logMin));
}

/** Inverse of sliderToValue. */
export function valueToSlider(param: TunableParam, value: number): number {
  const range = PARAM_RANGES[param];
  const clamped = Math.min(range.max, Math.max(range.min, value));
  if (!range.logScale) {
    return (clamped - range.min) / (range.max - range.min);
  }
  const logMin = Math.log10(range.min);
  const logMax = Math.log10(range.max);
  return (Math.log10(clamped) - logMin) / (logMax - logMin);
}

/** Compact display form: coarser rounding as magnitudes grow, trailing zeros dropped. */
export function formatValue(value: number): string {
  if (value >= 1000) return String(Math.round(value));
  if (value >= 100) return String(Math.round(value * 10) / 10);
  return String(Math.round(value * 100) / 100);
}
