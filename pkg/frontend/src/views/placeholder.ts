import { select } from "d3-selection";
import type { Placeholder } from "../viewmodel";

export function renderPlaceholder(container: HTMLElement, vm: Placeholder): void {
  const root = select(container);
  root.selectAll("*").remove();
  root
    .append("div")
    .attr("class", "placeholder")
    .attr("data-view", vm.view)
    .text(vm.reason);
}
