// DOM wiring for the profile tuner: sliders on the left, the live curve with
// the optional empirical overlay on the right, save/fit controls below.

import { ApiError, TunerApi } from "./api.js";
import type { CurvePoint, DecayModelName, DecayProfile } from "./api.js";
import {
  DEFAULT_VIEWPORT,
  cdfPath,
  curvePath,
  histogramBars,
  timeExtent,
} from "./curve.js";
import { PARAM_RANGES, formatValue, sliderToValue, valueToSlider } from "./params.js";
import type { TunableParam } from "./params.js";
import {
  TunerState,
  adjustParameter,
  applyFit,
  initialState,
  isDirty,
  withSaved,
} from "./state.js";

const SLIDER_STEPS = 1000;
const SVG_NS = "http://www.w3.org/2000/svg";

export interface AppOptions {
  root: HTMLElement;
  api: TunerApi;
  attrTypes?: string[];
  curvePoints?: number;
}

const TEMPLATE = `
  <header>
    <h1>Decay profile tuner</h1>
    <label>Attribute type
      <select id="attr-type"></select>
    </label>
    <span id="dirty-badge" hidden>unsaved changes</span>
  </header>
  <section class="controls">
    <label>Model
      <select id="model">
        <option value="polynomial">polynomial</option>
        <option value="exponential">exponential</option>
        <option value="linear">linear</option>
      </select>
    </label>
    <label id="label-tau">End-time tau <span id="value-tau"></span> h
      <input type="range" id="slider-tau" min="0" max="${SLIDER_STEPS}" step="1">
    </label>
    <label id="label-delta">Decay speed delta <span id="value-delta"></span>
      <input type="range" id="slider-delta" min="0" max="${SLIDER_STEPS}" step="1">
    </label>
    <label id="label-base">Preview base score <span id="value-base"></span>
      <input type="range" id="slider-base" min="0" max="${SLIDER_STEPS}" step="1">
    </label>
    <label id="label-threshold">Removal threshold <span id="value-threshold"></span>
      <input type="range" id="slider-threshold" min="0" max="${SLIDER_STEPS}" step="1">
    </label>
    <label>Tag weight <input type="number" id="weight-tg" min="0" max="100" step="1"></label>
    <label>Source weight <input type="number" id="omega-sc" min="0" max="100" step="1"></label>
  </section>
  <section class="chart">
    <svg id="chart" viewBox="0 0 ${DEFAULT_VIEWPORT.width} ${DEFAULT_VIEWPORT.height}"
         width="${DEFAULT_VIEWPORT.width}" height="${DEFAULT_VIEWPORT.height}">
      <g id="overlay-bars"></g>
      <path id="overlay-cdf" fill="none" stroke="#888" stroke-dasharray="4 3" d=""></path>
      <g id="comparison-curves"></g>
      <path id="curve-main" fill="none" stroke="#c0392b" stroke-width="2" d=""></path>
    </svg>
  </section>
  <section class="actions">
    <button id="load-overlay">Load empirical overlay</button>
    <button id="apply-fit" disabled>Apply fit</button>
    <button id="compare-models">Compare models</button>
    <button id="save">Save profile</button>
    <span id="fit-summary"></span>
  </section>
  <div id="save-error" class="error" hidden></div>
`;

export class TunerApp {
  state: TunerState;

  private readonly api: TunerApi;
  private readonly root: HTMLElement;
  private readonly curvePoints: number;
  private readonly inflight = new Set<Promise<void>>();
  private comparing = false;

  constructor(options: AppOptions) {
    this.api = options.api;
    this.root = options.root;
    this.curvePoints = options.curvePoints ?? 200;
    this.state = initialState(options.attrTypes?.[0] ?? "url");
    this.root.innerHTML = TEMPLATE;
    this.populateAttrTypes(options.attrTypes ?? ["url", "ip-dst", "sha256", "*"]);
    this.bind();
    this.renderControls();
    window.addEventListener("beforeunload", this.onBeforeUnload);
  }

  /** Unsaved changes are never silently lost: navigating away prompts. */
  private readonly onBeforeUnload = (event: Event) => {
    if (isDirty(this.state)) {
      event.preventDefault();
      (event as BeforeUnloadEvent).returnValue = true;
    }
  };

  dispose(): void {
    window.removeEventListener("beforeunload", this.onBeforeUnload);
  }

  /** Resolves once every request kicked off so far has settled. */
  async settle(): Promise<void> {
    while (this.inflight.size > 0) {
      await Promise.all([...this.inflight]);
    }
  }

  private el<T extends Element>(selector: string): T {
    const found = this.root.querySelector(selector);
    if (!found) throw new Error(`missing element ${selector}`);
    return found as T;
  }

  private populateAttrTypes(attrTypes: string[]): void {
    const select = this.el<HTMLSelectElement>("#attr-type");
    for (const attrType of attrTypes) {
      const option = document.createElement("option");
      option.value = attrType;
      option.textContent = attrType;
      select.appendChild(option);
    }
    select.value = this.state.selectedAttrType;
  }

  private bind(): void {
    for (const param of ["tau", "delta", "base", "threshold"] as TunableParam[]) {
      this.el<HTMLInputElement>(`#slider-${param}`).addEventListener("input", (event) => {
        const position = Number((event.target as HTMLInputElement).value) / SLIDER_STEPS;
        this.adjust(param, sliderToValue(param, position));
      });
    }
    this.el<HTMLSelectElement>("#model").addEventListener("change", (event) => {
      this.adjust("model", (event.target as HTMLSelectElement).value as DecayModelName);
    });
    this.el<HTMLSelectElement>("#attr-type").addEventListener("change", (event) => {
      this.track(this.selectAttrType((event.target as HTMLSelectElement).value));
    });
    this.el<HTMLInputElement>("#weight-tg").addEventListener("change", (event) => {
      this.state.draft.weight_tg = Number((event.target as HTMLInputElement).value);
      this.renderControls();
    });
    this.el<HTMLInputElement>("#omega-sc").addEventListener("change", (event) => {
      this.state.draft.omega_sc = Number((event.target as HTMLInputElement).value);
      this.renderControls();
    });
    this.el<HTMLButtonElement>("#save").addEventListener("click", () => {
      this.track(this.save());
    });
    this.el<HTMLButtonElement>("#load-overlay").addEventListener("click", () => {
      this.track(this.loadOverlay());
    });
    this.el<HTMLButtonElement>("#apply-fit").addEventListener("click", () => {
      this.state = applyFit(this.state);
      this.renderControls();
      this.track(this.refreshCurve());
    });
    this.el<HTMLButtonElement>("#compare-models").addEventListener("click", () => {
      this.comparing = !this.comparing;
      this.track(this.refreshComparison());
    });
  }

  /**
   * Slider/model adjustment: update state, re-render, refetch the curve.
   * Refreshes are fired immediately, not queued, so a new slider position
   * supersedes (aborts) the previous in-flight curve request.
   */
  adjust(param: TunableParam | "model", value: number | DecayModelName): void {
    this.state = adjustParameter(this.state, param, value);
    this.renderControls();
    this.track(this.refreshCurve());
  }

  private track(step: Promise<void>): void {
    const settled = step.catch((err) => {
      this.state = { ...this.state, saveError: String(err) };
      this.renderControls();
    });
    this.inflight.add(settled);
    void settled.finally(() => this.inflight.delete(settled));
  }

  async init(): Promise<void> {
    await this.selectAttrType(this.state.selectedAttrType);
    await this.settle();
  }

  private async selectAttrType(attrType: string): Promise<void> {
    this.state = initialState(attrType);
    const saved = await this.api.getProfile(attrType);
    if (saved) this.state = withSaved(this.state, saved);
    this.renderControls();
    await this.refreshCurve();
  }

  private async refreshCurve(): Promise<void> {
    const { draft } = this.state;
    const samples = await this.api.fetchCurve({
      base: this.state.previewBase,
      tau: draft.tau_hours,
      delta: draft.delta,
      model: draft.model,
      points: this.curvePoints,
    });
    if (samples === null) return; // superseded by a newer slider position
    this.state = { ...this.state, curve: samples };
    if (this.comparing) await this.refreshComparison();
    this.renderChart();
  }

  /**
   * Side-by-side shapes under a shared parameterization: the linear rate is
   * chosen to hit zero exactly at tau, the exponential rate to make tau the
   * edge of its sampled horizon (5/delta).
   */
  private async refreshComparison(): Promise<void> {
    if (!this.comparing) {
      this.state = { ...this.state, comparison: {} };
      this.renderChart();
      return;
    }
    const { draft } = this.state;
    const base = this.state.previewBase;
    const others: [DecayModelName, number][] = (
      [
        ["polynomial", draft.delta],
        ["linear", base / draft.tau_hours],
        ["exponential", 5 / draft.tau_hours],
      ] as [DecayModelName, number][]
    ).filter(([model]) => model !== draft.model);
    const comparison: Partial<Record<DecayModelName, CurvePoint[]>> = {};
    for (const [model, delta] of others) {
      const samples = await this.api.fetchCurve({
        base,
        tau: draft.tau_hours,
        delta,
        model,
        points: this.curvePoints,
      });
      if (samples !== null) comparison[model] = samples;
    }
    this.state = { ...this.state, comparison };
    this.renderChart();
  }

  private async loadOverlay(): Promise<void> {
    const overlay = await this.api.estimate(this.state.selectedAttrType);
    this.state = { ...this.state, overlay };
    this.el<HTMLButtonElement>("#apply-fit").disabled = false;
    const fit = overlay.fit;
    this.el<HTMLElement>("#fit-summary").textContent =
      `fit: tau ${formatValue(fit.tau_hours)} h, delta ${formatValue(fit.delta)} ` +
      `(1/delta ${formatValue(fit.paper_convention_delta)}) over ${fit.n_attributes} attributes`;
    this.renderChart();
  }

  private async save(): Promise<void> {
    try {
      const saved = await this.api.saveProfile(this.state.draft);
      this.state = withSaved(this.state, saved);
    } catch (err) {
      if (err instanceof ApiError) {
        const field = err.body.field ? ` [${err.body.field}]` : "";
        this.state = { ...this.state, saveError: `${err.body.message}${field}` };
      } else {
        this.state = { ...this.state, saveError: String(err) };
      }
    }
    this.renderControls();
  }

  private renderControls(): void {
    const { draft } = this.state;
    const values: Record<TunableParam, number> = {
      tau: draft.tau_hours,
      delta: draft.delta,
      base: this.state.previewBase,
      threshold: draft.threshold,
    };
    for (const param of Object.keys(values) as TunableParam[]) {
      const value = values[param];
      this.el<HTMLInputElement>(`#slider-${param}`).value = String(
        Math.round(valueToSlider(param, value) * SLIDER_STEPS),
      );
      this.el<HTMLElement>(`#value-${param}`).textContent = formatValue(value);
    }
    this.el<HTMLSelectElement>("#model").value = draft.model;
    this.el<HTMLInputElement>("#weight-tg").value = String(draft.weight_tg);
    this.el<HTMLInputElement>("#omega-sc").value = String(draft.omega_sc);
    const tauControls = this.el<HTMLElement>("#label-tau");
    tauControls.style.opacity = draft.model === "exponential" ? "0.5" : "1";
    this.el<HTMLElement>("#dirty-badge").hidden = !isDirty(this.state);
    const errorBox = this.el<HTMLElement>("#save-error");
    errorBox.hidden = this.state.saveError === null;
    errorBox.textContent = this.state.saveError ?? "";
  }

  private renderChart(): void {
    const overlayMax = this.state.overlay
      ? Math.max(...this.state.overlay.histogram.map(([h]) => h), 0) + 1
      : 0;
    const tMax = timeExtent(this.state.curve, overlayMax);

    this.el<SVGPathElement>("#curve-main").setAttribute(
      "d",
      curvePath(this.state.curve, tMax, DEFAULT_VIEWPORT),
    );

    const comparisonGroup = this.el<SVGGElement>("#comparison-curves");
    comparisonGroup.replaceChildren();
    for (const [model, samples] of Object.entries(this.state.comparison)) {
      const path = document.createElementNS(SVG_NS, "path");
      path.setAttribute("fill", "none");
      path.setAttribute("stroke", model === "linear" ? "#2980b9" : "#27ae60");
      path.setAttribute("data-model", model);
      path.setAttribute("d", curvePath(samples, tMax, DEFAULT_VIEWPORT));
      comparisonGroup.appendChild(path);
    }

    const barsGroup = this.el<SVGGElement>("#overlay-bars");
    barsGroup.replaceChildren();
    const cdfEl = this.el<SVGPathElement>("#overlay-cdf");
    if (this.state.overlay) {
      const histogram = this.state.overlay.histogram;
      const bucketWidth =
        histogram.length > 1 ? (histogram[1]?.[0] ?? 1) - (histogram[0]?.[0] ?? 0) : 1;
      for (const bar of histogramBars(histogram, bucketWidth, tMax, DEFAULT_VIEWPORT)) {
        const rect = document.createElementNS(SVG_NS, "rect");
        rect.setAttribute("x", String(bar.x));
        rect.setAttribute("y", String(bar.y));
        rect.setAttribute("width", String(bar.width));
        rect.setAttribute("height", String(bar.height));
        rect.setAttribute("fill", "#ecf0f1");
        rect.setAttribute("stroke", "#bdc3c7");
        barsGroup.appendChild(rect);
      }
      cdfEl.setAttribute("d", cdfPath(this.state.overlay.cdf, tMax, DEFAULT_VIEWPORT));
    } else {
      cdfEl.setAttribute("d", "");
    }
  }
}
