/** Client-side lasso hit testing on the sampled scatter set. */

export type Vertex = readonly [number, number];

/** Even-odd rule membership; mirrors the server's selection semantics. */
export function pointInPolygon(x: number, y: number, polygon: readonly Vertex[]): boolean {
  if (polygon.length < 3) return false;
  let inside = false;
  let [x1, y1] = polygon[polygon.length - 1]!;
  for (const [x2, y2] of polygon) {
    const crosses = y1 > y !== y2 > y;
    if (crosses) {
      const xAt = x1 + ((y - y1) * (x2 - x1)) / (y2 - y1);
      if (x < xAt) inside = !inside;
    }
    x1 = x2;
    y1 = y2;
  }
  return inside;
}
