/** Temporal view: 4-layer horizon graphs for context plus a multi-line
 * detail chart over the brushed range. */

import { extent } from "d3-array";
import { brushX } from "d3-brush";
import { scaleLinear } from "d3-scale";
import { select } from "d3-selection";
import { line } from "d3-shape";
import type { ExplorationEvent } from "../state";
import type { Placeholder, TemporalViewModel } from "../viewmodel";
import { renderPlaceholder } from "./placeholder";

const BAND_COLORS = ["#c6dbef", "#6baed6", "#2171b5", "#08306b"];

export function renderTemporal(
  container: HTMLElement,
  vm: TemporalViewModel | Placeholder,
  dispatch: (event: ExplorationEvent) => void,
  width = 960,
  timeExtent?: number,
): void {
  if (vm.kind === "placeholder") {
    renderPlaceholder(container, vm);
    return;
  }
  const root = select(container);
  root.selectAll("*").remove();

  const labelWidth = 110;
  const plotWidth = width - labelWidth;
  const maxT = timeExtent ?? Math.max(...vm.horizons.map((h) => h.offset + h.layers.length));
  const x = scaleLinear().domain([0, maxT]).range([0, plotWidth]);

  const svg = root
    .append("svg")
    .attr("class", "horizons")
    .attr("width", width)
    .attr("height", vm.horizons.length * vm.rowHeight);

  vm.horizons.forEach((row, i) => {
    const g = svg
      .append("g")
      .attr("class", "horizon-row")
      .attr("data-series", row.id)
      .attr("transform", `translate(0, ${i * vm.rowHeight})`);
    g.append("text")
      .attr("x", 4)
      .attr("y", vm.rowHeight / 2 + 4)
      .attr("class", "horizon-label")
      .text(row.id);
    const step = Math.max(1, x(row.offset + 1) - x(row.offset));
    g.selectAll("rect.band")
      .data(row.layers.map((layer, t) => ({ ...layer, t })))
      .join("rect")
      .attr("class", "band")
      .attr("x", (d) => labelWidth + x(row.offset + d.t))
      .attr("width", step)
      .attr("y", (d) => vm.rowHeight * (1 - d.fill))
      .attr("height", (d) => vm.rowHeight * d.fill)
      .attr("fill", (d) => BAND_COLORS[d.band] ?? BAND_COLORS[3]!);
  });

  const brushHeight = vm.horizons.length * vm.rowHeight;
  const brush = brushX()
    .extent([
      [labelWidth, 0],
      [width, brushHeight],
    ])
    .on("end", (event) => {
      if (!event.sourceEvent) return; // ignore programmatic moves
      if (event.selection === null) {
        dispatch({ type: "brush", range: null });
        return;
      }
      const [a, b] = event.selection as [number, number];
      dispatch({
        type: "brush",
        range: [Math.round(x.invert(a - labelWidth)), Math.round(x.invert(b - labelWidth))],
      });
    });
  const brushGroup = svg.append("g").attr("class", "time-brush").call(brush);
  if (vm.brush) {
    brush.move(brushGroup, [labelWidth + x(vm.brush[0]), labelWidth + x(vm.brush[1])]);
  }

  // detail chart for the brushed interval
  const detailHeight = 140;
  const detail = root
    .append("svg")
    .attr("class", "detail-chart")
    .attr("width", width)
    .attr("height", detailHeight);
  if (!vm.brush || vm.detail.length === 0) {
    detail
      .append("text")
      .attr("class", "detail-empty")
      .attr("x", width / 2)
      .attr("y", detailHeight / 2)
      .attr("text-anchor", "middle")
      .text("brush the horizons to inspect details");
    return;
  }
  const values = vm.detail.flatMap((d) => d.values);
  const [lo, hi] = extent(values);
  const dx = scaleLinear().domain(vm.brush).range([labelWidth, width - 8]);
  const dy = scaleLinear()
    .domain([lo ?? 0, hi ?? 1])
    .nice()
    .range([detailHeight - 16, 8]);
  const palette = ["#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d"];
  vm.detail.forEach((series, i) => {
    const path = line<number>()
      .x((_, j) => dx(series.t[j] ?? 0))
      .y((v) => dy(v));
    detail
      .append("path")
      .attr("class", "detail-line")
      .attr("data-series", series.id)
      .attr("fill", "none")
      .attr("stroke", palette[i % palette.length]!)
      .attr("stroke-width", 1.4)
      .attr("d", path(series.values));
    detail
      .append("text")
      .attr("x", labelWidth + 4 + 90 * i)
      .attr("y", 12)
      .attr("fill", palette[i % palette.length]!)
      .attr("class", "detail-legend")
      .text(series.id);
  });
}
