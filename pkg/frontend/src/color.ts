/** Discrete color assignment for the 15-cell wedge quantizer.
 *
 * The engine only hands out cell ids; hue encodes the value bin while rising
 * uncertainty levels desaturate and lighten, collapsing toward one neutral
 * cell at the top. A colorblind-safe variant swaps the two-hue ramp for the
 * viridis ramp with the same suppression behavior.
 */

import { hsl } from "d3-color";
import { interpolateViridis } from "d3-scale-chromatic";

const TREE = [8, 4, 2, 1] as const;
const OFFSETS = [0, 8, 12, 14] as const;

export interface CellPosition {
  level: number;
  bin: number;
  bins: number;
}

export function cellPosition(cell: number): CellPosition {
  if (!Number.isInteger(cell) || cell < 0 || cell > 14) {
    throw new RangeError(`cell id out of range: ${cell}`);
  }
  for (let level = TREE.length - 1; level >= 0; level--) {
    if (cell >= OFFSETS[level]!) {
      return { level, bin: cell - OFFSETS[level]!, bins: TREE[level]! };
    }
  }
  throw new RangeError(`unreachable cell ${cell}`);
}

/** Quantize a (metric1, metric2) pair with a scheme's edges: the client-side
 * twin of the engine quantizer, used when the scatter axis switches. */
export function quantize(
  v1: number,
  v2: number,
  dim1Edges: readonly number[],
  dim2Edges: readonly number[],
): number {
  const binOf = (value: number, edges: readonly number[]) => {
    let idx = edges.findIndex((e) => value < e) - 1;
    if (idx < -1) idx = edges.length - 2; // never found: clamp to top bin
    return Math.min(Math.max(idx, 0), edges.length - 2);
  };
  const level = binOf(v2, dim2Edges);
  const bin1 = binOf(v1, dim1Edges);
  return OFFSETS[level]! + (bin1 >> level);
}

export function cellColor(cell: number, colorblindSafe = false): string {
  const { level, bin, bins } = cellPosition(cell);
  const t = bins === 1 ? 0.5 : bin / (bins - 1);
  if (colorblindSafe) {
    const base = hsl(interpolateViridis(t));
    base.s = Math.max(0, base.s - 0.22 * level);
    base.l = Math.min(0.92, base.l + 0.1 * level);
    return base.formatHex();
  }
  // blue (low) to red (high) through a neutral midpoint
  const hue = 228 - 204 * t;
  const saturation = 0.82 - 0.2 * level;
  const lightness = 0.38 + 0.13 * level;
  return hsl(hue, Math.max(saturation, 0.05), Math.min(lightness, 0.9)).formatHex();
}

export function legendCells(colorblindSafe = false): { cell: number; color: string }[] {
  const out = [];
  for (let cell = 0; cell < 15; cell++) {
    out.push({ cell, color: cellColor(cell, colorblindSafe) });
  }
  return out;
}
