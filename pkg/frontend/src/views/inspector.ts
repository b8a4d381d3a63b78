/** Variable inspector: one partition-based correlation (mosaic) plot with a
 * hover readout of cell count, mean, and value range. */

import { scaleLinear } from "d3-scale";
import { select } from "d3-selection";
import type { InspectorViewModel, Placeholder } from "../viewmodel";
import { renderPlaceholder } from "./placeholder";

export function renderInspector(
  container: HTMLElement,
  vm: InspectorViewModel | Placeholder,
  size = 300,
): void {
  if (vm.kind === "placeholder") {
    renderPlaceholder(container, vm);
    return;
  }
  const root = select(container);
  root.selectAll("*").remove();

  const margin = 34;
  const svg = root
    .append("svg")
    .attr("class", "mosaic")
    .attr("width", size + margin)
    .attr("height", size + margin)
    .attr("data-x", vm.x)
    .attr("data-y", vm.y);

  const xLo = Math.min(...vm.cells.map((c) => c.x0));
  const xHi = Math.max(...vm.cells.map((c) => c.x1));
  const yLo = Math.min(...vm.cells.map((c) => c.y0));
  const yHi = Math.max(...vm.cells.map((c) => c.y1));
  const x = scaleLinear().domain([xLo, xHi]).range([margin, size + margin]);
  const y = scaleLinear().domain([yLo, yHi]).range([size, 0]);

  const readout = root.append("div").attr("class", "mosaic-readout");

  svg
    .selectAll("rect.cell")
    .data(vm.cells)
    .join("rect")
    .attr("class", "cell")
    .attr("x", (d) => x(d.x0))
    .attr("width", (d) => Math.max(0, x(d.x1) - x(d.x0) - 1))
    .attr("y", (d) => y(d.y1))
    .attr("height", (d) => Math.max(0, y(d.y0) - y(d.y1) - 1))
    // no color for no points, darker for stronger values
    .attr("fill", (d) =>
      d.intensity === null ? "#f4f4f4" : `rgba(33, 81, 160, ${0.15 + 0.85 * d.intensity})`,
    )
    .on("mouseenter", (_, d) => {
      readout.text(
        d.count === 0
          ? "empty cell"
          : `${d.count} points, mean ${vm.colorLabel} = ` +
              `${d.value === null ? "n/a" : d.value.toPrecision(4)}, ` +
              `x in [${d.x0.toPrecision(3)}, ${d.x1.toPrecision(3)}]`,
      );
    })
    .on("mouseleave", () => readout.text(""));

  svg
    .append("text")
    .attr("x", margin + size / 2)
    .attr("y", size + 26)
    .attr("text-anchor", "middle")
    .text(vm.x);
  svg
    .append("text")
    .attr("transform", `translate(12, ${size / 2}) rotate(-90)`)
    .attr("text-anchor", "middle")
    .text(vm.y);
}
