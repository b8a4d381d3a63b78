/** Pure derivation of declarative view models from (state, API payloads).
 *
 * Views receive geometry in data units plus resolved colors and highlight
 * flags; they never reach back into the state. Any view whose payloads have
 * not arrived renders as a placeholder pane instead of crashing.
 */

import { cellColor, quantize } from "./color";
import {
  splitWindowKey,
  windowKey,
  type ExplorationState,
} from "./state";
import type { ApiData, ProfileRow, ScatterPoint, Stripe } from "./types";

export const MIN_ROW_HEIGHT = 20; // px per stripe/horizon before scrolling
export const MAX_VISIBLE_ROWS = 30;

export interface Placeholder {
  kind: "placeholder";
  view: string;
  reason: string;
}

export interface ProfileViewModel {
  kind: "profile";
  columns: string[];
  rows: (ProfileRow & { selected: boolean; bars: Record<string, number> })[];
  sort: { column: string; direction: "asc" | "desc" };
}

export interface StripeRect {
  x: number;
  width: number;
  color: string | null;
  cell: number | null;
  windowSpan: [number, number] | null;
  highlighted: boolean;
}

export interface StripeRowModel {
  repId: string;
  selected: boolean;
  rects: StripeRect[];
}

export interface RepresentationViewModel {
  kind: "stripes";
  rows: StripeRowModel[];
  timeExtent: number;
  rowHeight: number;
  scrollNeeded: boolean;
  legend: { cell: number; color: string }[];
}

export interface ComparatorPoint {
  key: string;
  rep: string;
  index: number;
  x: number;
  y: number;
  color: string;
  highlighted: boolean;
  grayed: boolean;
}

export interface ComparatorViewModel {
  kind: "comparator";
  xLabel: "corr" | "shap";
  yLabel: "rmse";
  points: ComparatorPoint[];
  tableRows: ScatterPoint[];
}

export interface HorizonRowModel {
  id: string;
  offset: number;
  bandHeight: number;
  layers: { band: number; fill: number }[];
}

export interface TemporalViewModel {
  kind: "temporal";
  horizons: HorizonRowModel[];
  rowHeight: number;
  scrollNeeded: boolean;
  brush: readonly [number, number] | null;
  detail: { id: string; t: number[]; values: number[] }[];
}

export interface InspectorCell {
  x0: number;
  x1: number;
  y0: number;
  y1: number;
  count: number;
  value: number | null;
  intensity: number | null;
}

export interface InspectorViewModel {
  kind: "inspector";
  x: string;
  y: string;
  colorLabel: string;
  cells: InspectorCell[];
  hover: { count: number; mean: number | null; range: [number, number] } | null;
}

export interface ViewModels {
  profile: ProfileViewModel | Placeholder;
  inspector: InspectorViewModel | Placeholder;
  temporal: TemporalViewModel | Placeholder;
  representation: RepresentationViewModel | Placeholder;
  comparator: ComparatorViewModel | Placeholder;
}

function placeholder(view: string, reason: string): Placeholder {
  return { kind: "placeholder", view, reason };
}

const PROFILE_BAR_COLUMNS = ["train_error", "val_error", "acf"] as const;

/** Stable sort: equal keys keep their payload order; nulls sink to the end. */
export function sortRows(
  rows: ProfileRow[],
  column: string,
  direction: "asc" | "desc",
): ProfileRow[] {
  const decorated = rows.map((row, position) => ({ row, position }));
  const sign = direction === "desc" ? -1 : 1;
  decorated.sort((a, b) => {
    const va = (a.row as unknown as Record<string, unknown>)[column];
    const vb = (b.row as unknown as Record<string, unknown>)[column];
    if (va === null || va === undefined) {
      if (vb === null || vb === undefined) return a.position - b.position;
      return 1;
    }
    if (vb === null || vb === undefined) return -1;
    if (va < vb) return -sign;
    if (va > vb) return sign;
    return a.position - b.position;
  });
  return decorated.map((d) => d.row);
}

function buildProfile(state: ExplorationState, data: ApiData): ProfileViewModel | Placeholder {
  if (!data.profile) return placeholder("profile", "waiting for /representations");
  const sorted = sortRows(data.profile, state.sortKey.column, state.sortKey.direction);
  const maxima: Record<string, number> = {};
  for (const column of PROFILE_BAR_COLUMNS) {
    maxima[column] = Math.max(
      1e-12,
      ...data.profile.map((r) => Math.abs((r[column] as number | null) ?? 0)),
    );
  }
  return {
    kind: "profile",
    columns: [...PROFILE_BAR_COLUMNS],
    sort: state.sortKey,
    rows: sorted.map((row) => ({
      ...row,
      selected: row.id === state.selectedRepresentation,
      bars: Object.fromEntries(
        PROFILE_BAR_COLUMNS.map((column) => [
          column,
          Math.abs((row[column] as number | null) ?? 0) / maxima[column]!,
        ]),
      ),
    })),
  };
}

function stripeHighlights(
  state: ExplorationState,
  repId: string,
  stripe: Stripe,
): boolean[] {
  const highlightedIndexes = new Set<number>();
  for (const key of state.highlightedWindows) {
    const { rep, index } = splitWindowKey(key);
    if (rep === repId) highlightedIndexes.add(index);
  }
  return stripe.window_slices.map((span) => {
    if (span === null || highlightedIndexes.size === 0) return false;
    for (let w = span[0]; w < span[1]; w++) {
      if (highlightedIndexes.has(w)) return true;
    }
    return false;
  });
}

function buildRepresentation(
  state: ExplorationState,
  data: ApiData,
  colorblindSafe: boolean,
  viewportHeight: number,
): RepresentationViewModel | Placeholder {
  if (!data.stripes || Object.keys(data.stripes).length === 0) {
    return placeholder("representation", "waiting for stripe payloads");
  }
  const order = state.stripeOrder.filter((id) => data.stripes![id] !== undefined);
  if (order.length === 0) return placeholder("representation", "no stripes for current order");
  const anyStripe = data.stripes[order[0]!]!;
  const rows: StripeRowModel[] = order.map((repId) => {
    const stripe = data.stripes![repId]!;
    const highlighted = stripeHighlights(state, repId, stripe);
    return {
      repId,
      selected: repId === state.selectedRepresentation,
      rects: stripe.rects.map((rect, i) => ({
        x: rect ? rect[0] : 0,
        width: rect ? rect[1] : 0,
        cell: stripe.cells[i] ?? null,
        color: stripe.cells[i] == null ? null : cellColor(stripe.cells[i]!, colorblindSafe),
        windowSpan: stripe.window_slices[i] ?? null,
        highlighted: highlighted[i] ?? false,
      })),
    };
  });
  const rowHeight = Math.max(MIN_ROW_HEIGHT, Math.floor(viewportHeight / rows.length));
  return {
    kind: "stripes",
    rows,
    timeExtent: anyStripe.time_extent,
    rowHeight,
    scrollNeeded: rows.length * rowHeight > viewportHeight || rows.length > MAX_VISIBLE_ROWS,
    legend: Array.from({ length: 15 }, (_, cell) => ({
      cell,
      color: cellColor(cell, colorblindSafe),
    })),
  };
}

function buildComparator(
  state: ExplorationState,
  data: ApiData,
  colorblindSafe: boolean,
): ComparatorViewModel | Placeholder {
  if (!data.predictions) return placeholder("comparator", "waiting for /predictions");
  if (!data.schemes) return placeholder("comparator", "waiting for /schemes");
  const metric = state.axisMetric;
  const scheme = data.schemes[metric];
  const anyHighlight = state.highlightedWindows.size > 0;
  const points: ComparatorPoint[] = [];
  for (const p of data.predictions.points) {
    // re-derive the axis value and color from the same payload on axis switch
    const value = metric === "corr" ? p.corr : p.shap;
    if (value === null) continue; // degenerate-correlation windows leave corr views
    const key = windowKey(p.rep, p.index);
    const highlighted = state.highlightedWindows.has(key);
    points.push({
      key,
      rep: p.rep,
      index: p.index,
      x: value,
      y: p.rmse,
      color: cellColor(
        quantize(value, p.rmse, scheme.dim1_edges, scheme.dim2_edges),
        colorblindSafe,
      ),
      highlighted,
      grayed: anyHighlight && !highlighted,
    });
  }
  const tableRows = anyHighlight
    ? data.predictions.points.filter((p) =>
        state.highlightedWindows.has(windowKey(p.rep, p.index)),
      )
    : data.predictions.points;
  return { kind: "comparator", xLabel: metric, yLabel: "rmse", points, tableRows };
}

function buildTemporal(
  state: ExplorationState,
  data: ApiData,
  viewportHeight: number,
): TemporalViewModel | Placeholder {
  if (!data.horizons || Object.keys(data.horizons).length === 0) {
    return placeholder("temporal", "waiting for horizon payloads");
  }
  const horizons = Object.values(data.horizons).map((h) => ({
    id: h.id,
    offset: h.offset,
    bandHeight: h.band_height,
    layers: h.band_index.map((band, i) => ({ band, fill: h.fill[i] ?? 0 })),
  }));
  const rowHeight = Math.max(MIN_ROW_HEIGHT, Math.floor(viewportHeight / horizons.length));
  const detail = [];
  if (state.brushRange) {
    const [lo, hi] = state.brushRange;
    for (const h of Object.values(data.horizons)) {
      const t: number[] = [];
      const values: number[] = [];
      for (let i = 0; i < h.band_index.length; i++) {
        const rawT = h.offset + i;
        if (rawT < lo || rawT >= hi) continue;
        t.push(rawT);
        // lossless band fold inversion
        values.push(h.minimum + (h.band_index[i]! + h.fill[i]!) * h.band_height);
      }
      detail.push({ id: h.id, t, values });
    }
  }
  return {
    kind: "temporal",
    horizons,
    rowHeight,
    scrollNeeded: horizons.length * rowHeight > viewportHeight,
    brush: state.brushRange,
    detail,
  };
}

function buildInspector(data: ApiData): InspectorViewModel | Placeholder {
  if (!data.matrix) return placeholder("inspector", "waiting for /variables/matrix");
  const m = data.matrix;
  const finite = m.cell_values.flat().filter((v): v is number => v !== null);
  const maxAbs = Math.max(1e-12, ...finite.map(Math.abs));
  const cells: InspectorCell[] = [];
  let total = 0;
  let weighted = 0;
  for (let row = 0; row < m.grid; row++) {
    for (let col = 0; col < m.grid; col++) {
      const value = m.cell_values[row]![col] ?? null;
      const count = m.cell_counts[row]![col] ?? 0;
      total += count;
      if (value !== null) weighted += value * count;
      cells.push({
        x0: m.x_edges[col]!,
        x1: m.x_edges[col + 1]!,
        y0: m.y_edges[row]!,
        y1: m.y_edges[row + 1]!,
        count,
        value,
        intensity: value === null ? null : Math.abs(value) / maxAbs,
      });
    }
  }
  return {
    kind: "inspector",
    x: m.x,
    y: m.y,
    colorLabel: m.color,
    cells,
    hover:
      total === 0
        ? null
        : {
            count: total,
            mean: finite.length ? weighted / total : null,
            range: [Math.min(...finite, 0), Math.max(...finite, 0)],
          },
  };
}

export interface RenderOptions {
  colorblindSafe?: boolean;
  viewportHeight?: number;
}

export function renderViews(
  state: ExplorationState,
  data: ApiData,
  options: RenderOptions = {},
): ViewModels {
  const colorblindSafe = options.colorblindSafe ?? false;
  const viewportHeight = options.viewportHeight ?? 600;
  return {
    profile: buildProfile(state, data),
    inspector: buildInspector(data),
    temporal: buildTemporal(state, data, viewportHeight),
    representation: buildRepresentation(state, data, colorblindSafe, viewportHeight),
    comparator: buildComparator(state, data, colorblindSafe),
  };
}
