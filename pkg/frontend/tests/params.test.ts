import { describe, expect, it } from "vitest";

import { PARAM_RANGES, sliderToValue, valueToSlider } from "../src/params.js";

describe("slider scale mapping", () => {
  it("hits the range endpoints", () => {
    expect(sliderToValue("tau", 0)).toBeCloseTo(PARAM_RANGES.tau.min, 9);
    expect(sliderToValue("tau", 1)).toBeCloseTo(PARAM_RANGES.tau.max, 6);
    expect(sliderToValue("base", 0)).toBe(0);
    expect(sliderToValue("base", 1)).toBe(100);
  });

  it("is logarithmic for tau: midpoint is the geometric mean", () => {
    const mid = sliderToValue("tau", 0.5);
    expect(mid).toBeCloseTo(Math.sqrt(PARAM_RANGES.tau.min * PARAM_RANGES.tau.max), 6);
  });

  it("round-trips values through slider positions", () => {
    for (const value of [1, 24, 120, 168, 8760]) {
      expect(sliderToValue("tau", valueToSlider("tau", value))).toBeCloseTo(value, 6);
    }
    for (const value of [0.05, 0.3, 0.74, 1.807, 10]) {
      expect(sliderToValue("delta", valueToSlider("delta", value))).toBeCloseTo(value, 9);
    }
  });

  it("clamps out-of-range input", () => {
    expect(sliderToValue("delta", -0.5)).toBeCloseTo(PARAM_RANGES.delta.min, 9);
    expect(valueToSlider("tau", 1e9)).toBe(1);
  });
});
