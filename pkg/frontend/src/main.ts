import { TunerApi } from "./api.js";
import { TunerApp } from "./app.js";

declare global {
  interface Window {
    API_BASE_URL?: string;
  }
}

const baseUrl = window.API_BASE_URL ?? "http://127.0.0.1:8787";
const root = document.getElementById("app");
if (!root) throw new Error("missing #app mount point");

void new TunerApp({ root, api: new TunerApi(baseUrl) }).init();
