/** Profile view: one row per representation with sortable metric bars. */

import { select } from "d3-selection";
import type { ExplorationEvent } from "../state";
import type { Placeholder, ProfileViewModel } from "../viewmodel";
import { renderPlaceholder } from "./placeholder";

const LABELS: Record<string, string> = {
  train_error: "train error",
  val_error: "validation error",
  acf: "ACF value",
};

export function renderProfile(
  container: HTMLElement,
  vm: ProfileViewModel | Placeholder,
  dispatch: (event: ExplorationEvent) => void,
): void {
  if (vm.kind === "placeholder") {
    renderPlaceholder(container, vm);
    return;
  }
  const root = select(container);
  root.selectAll("*").remove();
  const table = root.append("table").attr("class", "profile-table");
  const header = table.append("thead").append("tr");
  header.append("th").text("representation");
  for (const column of vm.columns) {
    const active = vm.sort.column === column;
    header
      .append("th")
      .attr("class", active ? "sorted" : null)
      .style("cursor", "pointer")
      .text(LABELS[column] ?? column)
      .on("click", () => {
        const direction = active && vm.sort.direction === "desc" ? "asc" : "desc";
        dispatch({ type: "sort", column, direction });
      });
  }
  header.append("th").text("stationary");

  const body = table.append("tbody");
  for (const row of vm.rows) {
    const tr = body
      .append("tr")
      .attr("class", row.selected ? "selected" : null)
      .attr("data-rep", row.id)
      .style("cursor", "pointer")
      .on("click", () => dispatch({ type: "select-representation", id: row.id }));
    tr.append("td").text(row.id);
    for (const column of vm.columns) {
      const cell = tr.append("td").attr("class", "bar-cell");
      const fraction = row.bars[column] ?? 0;
      const value = row[column as "train_error" | "val_error" | "acf"];
      cell
        .append("div")
        .attr("class", "bar")
        .style("width", `${Math.round(fraction * 100)}%`)
        .attr("title", value === null ? "n/a" : String(value));
      cell.append("span").text(value === null ? "–" : value.toPrecision(3));
    }
    tr.append("td").text(row.stationary === null ? "–" : row.stationary ? "yes" : "no");
  }
}
