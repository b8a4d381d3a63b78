/** Payload shapes of the run-store JSON API. */

export interface ManifestRepresentation {
  id: string;
  dir: string;
  status: "ok" | "failed";
  error: string | null;
  n_windows: number | null;
}

export interface Manifest {
  format_version: number;
  dataset: {
    name: string;
    frequency: string;
    target: string;
    variables: string[];
    length: number;
    k: number;
  };
  config: {
    transform: {
      smoothings: { method: string; m: number }[];
      skips: number[];
      window_length: number;
      horizon: number;
      split_ratio: number;
    };
    model: Record<string, number>;
    shap: { mode: string; segments: number | null };
  };
  representations: ManifestRepresentation[];
  shared: {
    vsup: string[];
    catalog: string[];
    horizon: string[];
    mosaic_grid: number;
  };
  sampling: { default_n: number; seed: number };
}

export interface ProfileRow {
  id: string;
  status: string;
  error: string | null;
  method: string | null;
  m: number | null;
  skip: number | null;
  n_windows: number | null;
  n_train: number | null;
  train_error: number | null;
  val_error: number | null;
  acf: number | null;
  acf_lag: number | null;
  adf_statistic: number | null;
  stationary: boolean | null;
}

export interface VsupCell {
  cell: number;
  level: number;
  bin: number;
  metric1_range: [number, number];
  metric2_range: [number, number];
}

export interface VsupScheme {
  metric1: string;
  metric2: string;
  dim1_edges: number[];
  dim2_edges: number[];
  tree: number[];
  cells: VsupCell[];
}

export type Schemes = Record<"corr" | "shap", VsupScheme>;

export interface Stripe {
  representation_id: string;
  metric: string;
  mode: string;
  pixels: number;
  n_w: number;
  cells: (number | null)[];
  values: ((number | null)[] | null)[];
  window_slices: ([number, number] | null)[];
  rects: ([number, number] | null)[];
  time_extent: number;
}

export interface ScatterPoint {
  rep: string;
  index: number;
  x: number;
  y: number;
  cell: number;
  split: string;
  rmse: number;
  corr: number | null;
  shap: number;
  start: number;
}

export interface Predictions {
  axes: { x: "corr" | "shap"; y: string };
  total: number;
  points: ScatterPoint[];
  selected_rows: ScatterPoint[];
  polygons_applied: number;
}

export interface Horizon {
  id: string;
  offset: number;
  minimum: number;
  band_height: number;
  band_index: number[];
  fill: number[];
}

export interface Mosaic {
  x: string;
  y: string;
  grid: number;
  x_edges: number[];
  y_edges: number[];
  cell_counts: number[][];
  cell_values: (number | null)[][];
  color: string;
  n_points: number;
}

export interface VariablesPayload {
  target: string;
  k: number;
  variables: { id: string; display_name: string; unit: string | null }[];
  catalog: {
    id: string;
    kind: string;
    offset: number;
    length: number;
    display_name: string;
    smoothing: { method: string; m: number } | null;
  }[];
  importance: Record<string, [string, number][]> | null;
}

/** Everything the views can draw from; parts may still be loading. */
export interface ApiData {
  manifest?: Manifest;
  profile?: ProfileRow[];
  schemes?: Schemes;
  stripes?: Record<string, Stripe>;
  horizons?: Record<string, Horizon>;
  matrix?: Mosaic;
  variables?: VariablesPayload;
  predictions?: Predictions;
}
