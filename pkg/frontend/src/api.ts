// Typed client for the scoring engine's /v1 API. The UI performs no decay
// math of its own: every curve point, fit, and validation verdict comes
// through here.

export type DecayModelName = "linear" | "exponential" | "polynomial";

export interface DecayProfile {
  attr_type: string;
  model: DecayModelName;
  tau_hours: number;
  delta: number;
  weight_tg: number;
  omega_sc: number;
  threshold: number;
}

/** [t_hours, score] sample as served by GET /v1/curve. */
export type CurvePoint = [number, number];

export interface FitReport {
  attr_type: string;
  tau_hours: number;
  delta: number;
  tau_quantile: number;
  half_quantile_hours: number;
  n_attributes: number;
  excluded_single_sighting: number;
  excluded_outliers: number;
  paper_convention_delta: number;
}

export interface EstimateResponse {
  fit: FitReport;
  histogram: [number, number][];
  cdf: [number, number][];
}

export interface ApiErrorBody {
  code: string;
  message: string;
  field?: string;
}

export class ApiError extends Error {
  readonly status: number;
  readonly body: ApiErrorBody;

  constructor(status: number, body: ApiErrorBody) {
    super(body.message);
    this.status = status;
    this.body = body;
  }
}

export interface CurveRequest {
  base: number;
  tau: number;
  delta: number;
  model: DecayModelName;
  points: number;
}

async function errorFrom(response: Response): Promise<ApiError> {
  let body: ApiErrorBody;
  try {
    body = (await response.json()) as ApiErrorBody;
  } catch {
    body = { code: "http_error", message: `HTTP ${response.status}` };
  }
  return new ApiError(response.status, body);
}

export class TunerApi {
  private readonly baseUrl: string;
  private inflightCurve: AbortController | null = null;

  constructor(baseUrl: string) {
    this.baseUrl = baseUrl.replace(/\/$/, "");
  }

  /**
   * Fetch curve samples, superseding any in-flight curve request.
   * Returns null when this request was itself superseded (latest wins).
   */
  async fetchCurve(params: CurveRequest): Promise<CurvePoint[] | null> {
    this.inflightCurve?.abort();
    const controller = new AbortController();
    this.inflightCurve = controller;
    const query = new URLSearchParams({
      base: String(params.base),
      tau: String(params.tau),
      delta: String(params.delta),
      model: params.model,
      points: String(params.points),
    });
    let response: Response;
    try {
      response = await fetch(`${this.baseUrl}/v1/curve?${query}`, {
        signal: controller.signal,
      });
    } catch (err) {
      if (controller.signal.aborted) return null;
      throw err;
    }
    if (controller.signal.aborted) return null;
    if (!response.ok) throw await errorFrom(response);
    return (await response.json()) as CurvePoint[];
  }

  async listProfiles(): Promise<DecayProfile[]> {
    const response = await fetch(`${this.baseUrl}/v1/profiles`);
    if (!response.ok) throw await errorFrom(response);
    return (await response.json()) as DecayProfile[];
  }

  /** Stored profile for one attribute type, or null when none exists yet. */
  async getProfile(attrType: string): Promise<DecayProfile | null> {
    const response = await fetch(
      `${this.baseUrl}/v1/profiles/${encodeURIComponent(attrType)}`,
    );
    if (response.status === 404) return null;
    if (!response.ok) throw await errorFrom(response);
    return (await response.json()) as DecayProfile;
  }

  /** PUT the profile; a 422 surfaces as ApiError carrying the violated invariant. */
  async saveProfile(profile: DecayProfile): Promise<DecayProfile> {
    const response = await fetch(
      `${this.baseUrl}/v1/profiles/${encodeURIComponent(profile.attr_type)}`,
      {
        method: "PUT",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(profile),
      },
    );
    if (!response.ok) throw await errorFrom(response);
    return (await response.json()) as DecayProfile;
  }

  async estimate(
    attrType: string,
    cutoffHours?: number,
  ): Promise<EstimateResponse> {
    const query = new URLSearchParams({ attr_type: attrType });
    if (cutoffHours !== undefined) query.set("cutoff", String(cutoffHours));
    const response = await fetch(`${this.baseUrl}/v1/estimate?${query}`);
    if (!response.ok) throw await errorFrom(response);
    return (await response.json()) as EstimateResponse;
  }
}
