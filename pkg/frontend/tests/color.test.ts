import { describe, expect, it } from "vitest";

import { cellColor, cellPosition, legendCells, quantize } from "../src/color";
import { schemes } from "./helpers";

describe("cellPosition", () => {
  it("maps ids to the 8/4/2/1 wedge levels", () => {
    expect(cellPosition(0)).toEqual({ level: 0, bin: 0, bins: 8 });
    expect(cellPosition(7)).toEqual({ level: 0, bin: 7, bins: 8 });
    expect(cellPosition(8)).toEqual({ level: 1, bin: 0, bins: 4 });
    expect(cellPosition(12)).toEqual({ level: 2, bin: 0, bins: 2 });
    expect(cellPosition(14)).toEqual({ level: 3, bin: 0, bins: 1 });
    expect(() => cellPosition(15)).toThrow(RangeError);
  });
});

describe("quantize (client twin of the engine quantizer)", () => {
  const corr = schemes.corr;

  it("reproduces the engine's cell for every fixture cell table entry", () => {
    for (const cell of corr.cells) {
      const v1 = (cell.metric1_range[0] + cell.metric1_range[1]) / 2;
      const v2 = (cell.metric2_range[0] + cell.metric2_range[1]) / 2;
      expect(quantize(v1, v2, corr.dim1_edges, corr.dim2_edges)).toBe(cell.cell);
    }
  });

  it("yields 8/4/2/1 distinct cells per level", () => {
    const tree = [8, 4, 2, 1];
    const all = new Set<number>();
    for (let level = 0; level < 4; level++) {
      const v2 = (corr.dim2_edges[level]! + corr.dim2_edges[level + 1]!) / 2;
      const seen = new Set<number>();
      for (let i = 0; i <= 400; i++) {
        seen.add(quantize(-1 + (2 * i) / 400, v2, corr.dim1_edges, corr.dim2_edges));
      }
      expect(seen.size).toBe(tree[level]);
      for (const c of seen) all.add(c);
    }
    expect(all.size).toBe(15);
  });

  it("clamps out-of-range values", () => {
    expect(quantize(-99, 0, corr.dim1_edges, corr.dim2_edges)).toBe(0);
    expect(quantize(99, 0, corr.dim1_edges, corr.dim2_edges)).toBe(7);
    expect(quantize(0, 1e12, corr.dim1_edges, corr.dim2_edges)).toBe(14);
  });
});

describe("cellColor", () => {
  it("gives 15 distinct colors in both palettes", () => {
    for (const safe of [false, true]) {
      const colors = legendCells(safe).map((c) => c.color);
      expect(new Set(colors).size).toBe(15);
      for (const color of colors) {
        expect(color).toMatch(/^#[0-9a-f]{6}$/);
      }
    }
  });

  it("suppresses toward lighter colors at higher levels", () => {
    const lightness = (hex: string) => {
      const r = parseInt(hex.slice(1, 3), 16);
      const g = parseInt(hex.slice(3, 5), 16);
      const b = parseInt(hex.slice(5, 7), 16);
      return (Math.max(r, g, b) + Math.min(r, g, b)) / 510;
    };
    expect(lightness(cellColor(14))).toBeGreaterThan(lightness(cellColor(0)));
    expect(lightness(cellColor(14))).toBeGreaterThan(lightness(cellColor(7)));
  });
});
