/** Application bootstrap: fetch payloads, hold the exploration state, and
 * re-render the coordinated views after every event. */

import { ApiClient } from "./api";
import {
  applyEvent,
  decodeState,
  encodeState,
  initialState,
  type EventContext,
  type ExplorationEvent,
  type ExplorationState,
  type RepGeometry,
} from "./state";
import type { ApiData } from "./types";
import { renderViews } from "./viewmodel";
import { renderComparator } from "./views/comparator";
import { renderInspector } from "./views/inspector";
import { renderProfile } from "./views/profile";
import { renderRepresentation } from "./views/representation";
import { renderTemporal } from "./views/temporal";

const STRIPE_PIXELS = 800;

function byId(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing container #${id}`);
  return node;
}

export async function boot(): Promise<void> {
  const api = new ApiClient();
  const data: ApiData = {};
  const warnings = byId("warnings");

  const manifest = await api.manifest();
  if (!manifest) return;
  data.manifest = manifest;
  const okReps = manifest.representations.filter((r) => r.status === "ok").map((r) => r.id);
  const geometry = new Map<string, RepGeometry>();

  const ctx = (): EventContext => ({
    representationIds: okReps,
    repGeometry: geometry,
    timeExtent: manifest.dataset.length,
    points: data.predictions?.points ?? [],
  });

  let state: ExplorationState = decodeState(window.location.search.slice(1), ctx());

  const rerender = () => {
    const models = renderViews(state, data, {
      colorblindSafe:
        (document.getElementById("colorblind") as HTMLInputElement | null)?.checked ?? false,
      viewportHeight: 620,
    });
    renderProfile(byId("profile"), models.profile, dispatch);
    renderInspector(byId("inspector"), models.inspector);
    renderTemporal(byId("temporal"), models.temporal, dispatch, 960, manifest.dataset.length);
    renderRepresentation(byId("representation"), models.representation, dispatch);
    renderComparator(byId("comparator"), models.comparator, dispatch);
    history.replaceState(null, "", `?${encodeState(state)}`);
  };

  const dispatch = (event: ExplorationEvent) => {
    const { state: next, warning } = applyEvent(state, event, ctx());
    if (warning) {
      warnings.textContent = warning;
      return;
    }
    warnings.textContent = "";
    state = next;
    if (event.type === "axis-switch") {
      void api.predictions(state.axisMetric).then((payload) => {
        if (payload) data.predictions = payload;
        rerender();
      });
    }
    rerender();
  };

  const axisSelect = document.getElementById("axis-metric") as HTMLSelectElement | null;
  axisSelect?.addEventListener("change", () =>
    dispatch({ type: "axis-switch", metric: axisSelect.value === "shap" ? "shap" : "corr" }),
  );
  document
    .getElementById("clear-selection")
    ?.addEventListener("click", () => dispatch({ type: "clear-selection" }));
  document
    .getElementById("colorblind")
    ?.addEventListener("change", () => rerender());

  rerender(); // placeholders while the payloads stream in

  const [profile, schemes, variables, predictions] = await Promise.all([
    api.profile(),
    api.schemes(),
    api.variables(),
    api.predictions(state.axisMetric),
  ]);
  if (profile) {
    data.profile = profile;
    for (const row of profile) {
      if (row.status !== "ok" || row.m === null || row.skip === null) continue;
      geometry.set(row.id, {
        offset: row.m - 1,
        skip: row.skip,
        windowLength: manifest.config.transform.window_length,
        horizon: manifest.config.transform.horizon,
        nWindows: row.n_windows ?? 0,
      });
    }
  }
  if (schemes) data.schemes = schemes;
  if (variables) data.variables = variables;
  if (predictions) data.predictions = predictions;
  rerender();

  const catalog = manifest.shared.catalog;
  if (catalog.length >= 2) {
    const matrix = await api.matrix(catalog[0]!, catalog[1]!);
    if (matrix) data.matrix = matrix;
  }
  data.horizons = {};
  for (const seriesId of manifest.shared.horizon) {
    const horizon = await api.horizon(seriesId);
    if (horizon) data.horizons[seriesId] = horizon;
  }
  data.stripes = {};
  for (const repId of okReps) {
    const stripe = await api.stripe(repId, STRIPE_PIXELS, state.axisMetric);
    if (stripe) data.stripes[repId] = stripe;
  }
  rerender();
}

if (typeof document !== "undefined" && document.getElementById("profile")) {
  void boot();
}
