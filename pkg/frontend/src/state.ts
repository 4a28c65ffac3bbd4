// Tuner session state: the draft profile being shaped, what the server last
// confirmed, the current curve samples, and the optional empirical overlay.

import type {
  CurvePoint,
  DecayModelName,
  DecayProfile,
  EstimateResponse,
} from "./api.js";
import { PARAM_RANGES } from "./params.js";

export interface TunerState {
  selectedAttrType: string;
  draft: DecayProfile;
  /** Last server-confirmed profile for the selected type; null before any save. */
  saved: DecayProfile | null;
  /** What-if base score used for curve previews; not part of the profile. */
  previewBase: number;
  curve: CurvePoint[];
  /** Extra curves when comparing the three models side by side. */
  comparison: Partial<Record<DecayModelName, CurvePoint[]>>;
  overlay: EstimateResponse | null;
  saveError: string | null;
}

export function defaultProfile(attrType: string): DecayProfile {
  return {
    attr_type: attrType,
    model: "polynomial",
    tau_hours: PARAM_RANGES.tau.default,
    delta: PARAM_RANGES.delta.default,
    weight_tg: 50,
    omega_sc: 50,
    threshold: PARAM_RANGES.threshold.default,
  };
}

export function initialState(attrType: string): TunerState {
  return {
    selectedAttrType: attrType,
    draft: defaultProfile(attrType),
    saved: null,
    previewBase: PARAM_RANGES.base.default,
    curve: [],
    comparison: {},
    overlay: null,
    saveError: null,
  };
}

const PROFILE_FIELDS: (keyof DecayProfile)[] = [
  "attr_type",
  "model",
  "tau_hours",
  "delta",
  "weight_tg",
  "omega_sc",
  "threshold",
];

/** Dirty iff the draft differs from the last-saved server profile. */
export function isDirty(state: TunerState): boolean {
  if (state.saved === null) return true;
  const saved = state.saved;
  return PROFILE_FIELDS.some((field) => state.draft[field] !== saved[field]);
}

export type ParamName = "tau" | "delta" | "base" | "model" | "threshold";

export function adjustParameter(
  state: TunerState,
  param: ParamName,
  value: number | DecayModelName,
): TunerState {
  const next = { ...state, draft: { ...state.draft }, saveError: null };
  switch (param) {
    case "tau":
      next.draft.tau_hours = value as number;
      break;
    case "delta":
      next.draft.delta = value as number;
      break;
    case "threshold":
      next.draft.threshold = value as number;
      break;
    case "model":
      next.draft.model = value as DecayModelName;
      break;
    case "base":
      next.previewBase = value as number;
      break;
  }
  return next;
}

/** Adopt the server's fitted (tau, delta) as the draft parameters. */
export function applyFit(state: TunerState): TunerState {
  if (!state.overlay) return state;
  return {
    ...state,
    draft: {
      ...state.draft,
      model: "polynomial",
      tau_hours: state.overlay.fit.tau_hours,
      delta: state.overlay.fit.delta,
    },
    saveError: null,
  };
}

export function withSaved(state: TunerState, saved: DecayProfile): TunerState {
  return { ...state, saved, draft: { ...saved }, saveError: null };
}
