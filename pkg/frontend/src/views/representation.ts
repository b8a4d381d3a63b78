/** Representation view: juxtaposed stripes on one shared timeline.
 *
 * Each representation is one row of skip-aligned rectangles; rows scroll
 * once they would drop below the minimum readable height. A wedge legend of
 * the 15 quantizer cells sits above the stripes.
 */

import { scaleLinear } from "d3-scale";
import { select } from "d3-selection";
import type { ExplorationEvent } from "../state";
import type { Placeholder, RepresentationViewModel } from "../viewmodel";
import { renderPlaceholder } from "./placeholder";

export function renderRepresentation(
  container: HTMLElement,
  vm: RepresentationViewModel | Placeholder,
  dispatch: (event: ExplorationEvent) => void,
  width = 960,
): void {
  if (vm.kind === "placeholder") {
    renderPlaceholder(container, vm);
    return;
  }
  const root = select(container);
  root.selectAll("*").remove();

  const legend = root.append("svg").attr("class", "vsup-legend").attr("height", 40);
  legend
    .selectAll("rect")
    .data(vm.legend)
    .join("rect")
    .attr("data-cell", (d) => d.cell)
    .attr("x", (_, i) => i * 22)
    .attr("width", 20)
    .attr("height", 14)
    .attr("fill", (d) => d.color);

  const labelWidth = 110;
  const x = scaleLinear()
    .domain([0, vm.timeExtent])
    .range([0, width - labelWidth]);

  const scroller = root
    .append("div")
    .attr("class", vm.scrollNeeded ? "stripe-scroller scroll" : "stripe-scroller")
    .style("overflow-y", vm.scrollNeeded ? "scroll" : "visible");

  const svg = scroller
    .append("svg")
    .attr("class", "stripes")
    .attr("width", width)
    .attr("height", vm.rows.length * vm.rowHeight)
    .attr("data-time-extent", vm.timeExtent);

  const rowGroups = svg
    .selectAll("g.stripe-row")
    .data(vm.rows, (d) => (d as { repId: string }).repId)
    .join("g")
    .attr("class", (d) => (d.selected ? "stripe-row selected" : "stripe-row"))
    .attr("data-rep", (d) => d.repId)
    .attr("transform", (_, i) => `translate(0, ${i * vm.rowHeight})`);

  rowGroups
    .append("text")
    .attr("x", 16)
    .attr("y", vm.rowHeight / 2 + 4)
    .attr("class", "stripe-label")
    .style("cursor", "pointer")
    .text((d) => d.repId)
    .on("click", (_, d) => dispatch({ type: "select-representation", id: d.repId }));

  // side-by-side reordering: the grip swaps a stripe with its predecessor
  const order = vm.rows.map((r) => r.repId);
  rowGroups
    .append("text")
    .attr("class", "stripe-grip")
    .attr("x", 2)
    .attr("y", vm.rowHeight / 2 + 4)
    .style("cursor", "grab")
    .text("↕")
    .on("click", (_, d) => {
      const at = order.indexOf(d.repId);
      if (at <= 0) return;
      const next = [...order];
      [next[at - 1], next[at]] = [next[at]!, next[at - 1]!];
      dispatch({ type: "reorder-stripes", order: next });
    });

  rowGroups.each(function (row) {
    select(this)
      .selectAll("rect.window")
      .data(row.rects.filter((r) => r.color !== null))
      .join("rect")
      .attr("class", (d) => (d.highlighted ? "window highlighted" : "window"))
      .attr("x", (d) => labelWidth + x(d.x))
      .attr("width", (d) => Math.max(1, x(d.x + d.width) - x(d.x)))
      .attr("y", 1)
      .attr("height", vm.rowHeight - 2)
      .attr("fill", (d) => d.color!)
      .attr("stroke", (d) => (d.highlighted ? "#000" : "none"))
      .append("title")
      .text((d) => (d.windowSpan ? `windows ${d.windowSpan[0]}-${d.windowSpan[1] - 1}` : ""));
  });
}
