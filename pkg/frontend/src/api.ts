/** Typed client for the run-store API with stale-response discarding.
 *
 * Every logical slot (manifest, stripes, predictions, ...) tracks a
 * monotonically increasing request id; a response only lands if no newer
 * request for the same slot was issued meanwhile.
 */

import type {
  Horizon,
  Manifest,
  Mosaic,
  Predictions,
  ProfileRow,
  Schemes,
  Stripe,
  VariablesPayload,
} from "./types";

export class ApiClient {
  private readonly base: string;
  private readonly latest = new Map<string, number>();

  constructor(base = "/api") {
    this.base = base.replace(/\/$/, "");
  }

  private async get<T>(path: string, slot?: string): Promise<T | undefined> {
    const key = slot ?? path;
    const ticket = (this.latest.get(key) ?? 0) + 1;
    this.latest.set(key, ticket);
    const response = await fetch(`${this.base}${path}`);
    if (!response.ok) {
      throw new Error(`${path}: ${response.status} ${await response.text()}`);
    }
    const payload = (await response.json()) as T;
    if (this.latest.get(key) !== ticket) return undefined; // superseded
    return payload;
  }

  manifest() {
    return this.get<Manifest>("/manifest");
  }

  profile() {
    return this.get<ProfileRow[]>("/representations");
  }

  schemes() {
    return this.get<Schemes>("/schemes");
  }

  variables() {
    return this.get<VariablesPayload>("/variables");
  }

  stripe(repId: string, pixels: number, metric: string) {
    const quoted = encodeURIComponent(repId);
    return this.get<Stripe>(
      `/representations/${quoted}/stripe?pixels=${pixels}&metric=${metric}`,
      `stripe:${repId}`,
    );
  }

  horizon(seriesId: string) {
    return this.get<Horizon>(`/variables/${encodeURIComponent(seriesId)}/horizon`);
  }

  matrix(x: string, y: string, grid?: number) {
    const g = grid ? `&grid=${grid}` : "";
    return this.get<Mosaic>(
      `/variables/matrix?x=${encodeURIComponent(x)}&y=${encodeURIComponent(y)}${g}`,
      "matrix",
    );
  }

  predictions(axes: "corr" | "shap", n?: number) {
    const count = n ? `&n=${n}` : "";
    return this.get<Predictions>(`/predictions?axes=${axes}${count}`, "predictions");
  }
}
