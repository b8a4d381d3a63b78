/** Shared fixture loading: canned API responses recorded from a real
 * 28-representation run store (see scripts/make_fixtures.py). */

import manifestJson from "./fixtures/manifest.json";
import profileJson from "./fixtures/profile.json";
import schemesJson from "./fixtures/schemes.json";
import stripesJson from "./fixtures/stripes_corr.json";
import horizonsJson from "./fixtures/horizons.json";
import matrixJson from "./fixtures/matrix_raw_ma3.json";
import variablesJson from "./fixtures/variables.json";
import predictionsCorrJson from "./fixtures/predictions_corr.json";
import predictionsShapJson from "./fixtures/predictions_shap.json";

import type {
  ApiData,
  Horizon,
  Manifest,
  Mosaic,
  Predictions,
  ProfileRow,
  Schemes,
  Stripe,
  VariablesPayload,
} from "../src/types";
import { initialState, type EventContext, type RepGeometry } from "../src/state";

export const manifest = manifestJson as unknown as Manifest;
export const profile = profileJson as unknown as ProfileRow[];
export const schemes = schemesJson as unknown as Schemes;
export const stripes = stripesJson as unknown as Record<string, Stripe>;
export const horizons = horizonsJson as unknown as Record<string, Horizon>;
export const matrix = matrixJson as unknown as Mosaic;
export const variables = variablesJson as unknown as VariablesPayload;
export const predictionsCorr = predictionsCorrJson as unknown as Predictions;
export const predictionsShap = predictionsShapJson as unknown as Predictions;

export function fixtureData(): ApiData {
  return {
    manifest,
    profile,
    schemes,
    stripes,
    horizons,
    matrix,
    variables,
    predictions: predictionsCorr,
  };
}

export function fixtureContext(): EventContext {
  const geometry = new Map<string, RepGeometry>();
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
  return {
    representationIds: manifest.representations
      .filter((r) => r.status === "ok")
      .map((r) => r.id),
    repGeometry: geometry,
    timeExtent: manifest.dataset.length,
    points: predictionsCorr.points,
  };
}

export function freshState() {
  return initialState(fixtureContext());
}
