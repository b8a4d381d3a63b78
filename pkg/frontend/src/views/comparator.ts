/** Prediction comparator: VSUP-colored scatter with lasso plus a linked
 * table of the selected predictions. */

import { extent } from "d3-array";
import { scaleLinear } from "d3-scale";
import { select } from "d3-selection";
import type { ExplorationEvent } from "../state";
import type { Vertex } from "../geometry";
import type { ComparatorViewModel, Placeholder } from "../viewmodel";
import { renderPlaceholder } from "./placeholder";

export function renderComparator(
  container: HTMLElement,
  vm: ComparatorViewModel | Placeholder,
  dispatch: (event: ExplorationEvent) => void,
  width = 420,
  height = 320,
): void {
  if (vm.kind === "placeholder") {
    renderPlaceholder(container, vm);
    return;
  }
  const root = select(container);
  root.selectAll("*").remove();

  const margin = { top: 8, right: 10, bottom: 28, left: 48 };
  const svg = root
    .append("svg")
    .attr("class", "comparator-scatter")
    .attr("width", width)
    .attr("height", height)
    .attr("data-x-label", vm.xLabel);

  const xDomain = extent(vm.points, (d) => d.x);
  const yDomain = extent(vm.points, (d) => d.y);
  const x = scaleLinear()
    .domain([xDomain[0] ?? 0, xDomain[1] ?? 1])
    .nice()
    .range([margin.left, width - margin.right]);
  const y = scaleLinear()
    .domain([yDomain[0] ?? 0, yDomain[1] ?? 1])
    .nice()
    .range([height - margin.bottom, margin.top]);

  svg
    .append("text")
    .attr("class", "x-label")
    .attr("x", width / 2)
    .attr("y", height - 6)
    .attr("text-anchor", "middle")
    .text(vm.xLabel.toUpperCase());
  svg
    .append("text")
    .attr("class", "y-label")
    .attr("transform", `translate(12, ${height / 2}) rotate(-90)`)
    .attr("text-anchor", "middle")
    .text(vm.yLabel.toUpperCase());

  svg
    .selectAll("circle.point")
    .data(vm.points, (d) => (d as { key: string }).key)
    .join("circle")
    .attr(
      "class",
      (d) => `point${d.highlighted ? " highlighted" : ""}${d.grayed ? " grayed" : ""}`,
    )
    .attr("data-key", (d) => d.key)
    .attr("cx", (d) => x(d.x))
    .attr("cy", (d) => y(d.y))
    .attr("r", (d) => (d.highlighted ? 4 : 2.5))
    .attr("fill", (d) => (d.grayed ? "#c8c8c8" : d.color))
    .attr("stroke", (d) => (d.highlighted ? "#000" : "none"))
    .style("cursor", "pointer")
    .on("click", (_, d) => dispatch({ type: "select-window", rep: d.rep, index: d.index }));

  // freehand lasso: collect data-space vertices while the pointer drags
  let lassoPath: Vertex[] = [];
  const overlay = svg
    .append("rect")
    .attr("class", "lasso-capture")
    .attr("x", margin.left)
    .attr("y", margin.top)
    .attr("width", width - margin.left - margin.right)
    .attr("height", height - margin.top - margin.bottom)
    .attr("fill", "transparent");
  overlay
    .on("pointerdown", (event: PointerEvent) => {
      lassoPath = [[x.invert(event.offsetX), y.invert(event.offsetY)]];
    })
    .on("pointermove", (event: PointerEvent) => {
      if (event.buttons & 1) {
        lassoPath.push([x.invert(event.offsetX), y.invert(event.offsetY)]);
      }
    })
    .on("pointerup", () => {
      if (lassoPath.length >= 3) {
        dispatch({ type: "lasso", polygon: lassoPath.map((v) => [v[0], v[1]]) });
      }
      lassoPath = [];
    });

  const table = root.append("table").attr("class", "comparator-table");
  const head = table.append("thead").append("tr");
  for (const column of ["representation", "window", "rmse", "corr", "shap"]) {
    head.append("th").text(column);
  }
  const body = table.append("tbody");
  for (const row of vm.tableRows.slice(0, 200)) {
    const tr = body
      .append("tr")
      .attr("data-key", `${row.rep}#${row.index}`)
      .style("cursor", "pointer")
      .on("click", () => dispatch({ type: "select-window", rep: row.rep, index: row.index }));
    tr.append("td").text(row.rep);
    tr.append("td").text(row.index);
    tr.append("td").text(row.rmse.toPrecision(4));
    tr.append("td").text(row.corr === null ? "–" : row.corr.toFixed(3));
    tr.append("td").text(row.shap.toPrecision(4));
  }
}
