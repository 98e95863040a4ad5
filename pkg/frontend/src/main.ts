/** Browser entry point: wires the controls, SVG canvas, and tables. */

import { ApiClient } from "./api.js";
import { forceLayout } from "./layout.js";
import { renderCompareTable, renderGraph, renderSummaryTable } from "./render.js";
import { Explorer, ViewState } from "./state.js";

function byId<T extends HTMLElement>(id: string): T {
  return document.getElementById(id) as T;
}

export function mount(baseUrl: string): Explorer {
  const svg = byId<HTMLElement>("graph") as unknown as SVGSVGElement;
  const status = byId<HTMLElement>("status");
  const tables = byId<HTMLElement>("tables");

  const draw = (state: ViewState) => {
    if (state.graph) {
      const layout = forceLayout(state.graph.graph, { seed: 1 });
      renderGraph(svg, state.graph.graph, layout, {
        coloring: state.coloring ?? undefined,
        selected: new Set(state.selected),
        onSelect: (ballId) => explorer.toggleSelect(ballId),
      });
    }
    if (state.comparison) renderCompareTable(tables, state.comparison);
    else if (state.summary) renderSummaryTable(tables, state.summary);
    status.textContent = state.graph
      ? `${state.graph.graph.vertices.length} balls at epsilon ${state.epsilon}` +
        (state.colorVariable ? `, colored by ${state.colorVariable}` : "")
      : "upload a dataset to begin";
  };

  const explorer = new Explorer(new ApiClient(baseUrl), draw);

  byId<HTMLInputElement>("file").addEventListener("change", async (event) => {
    const file = (event.target as HTMLInputElement).files?.[0];
    if (file) await explorer.uploadDataset(await file.text());
  });
  byId<HTMLButtonElement>("build").addEventListener("click", () => {
    const axes = byId<HTMLInputElement>("axes").value.split(",");
    const epsilon = Number(byId<HTMLInputElement>("epsilon").value);
    void explorer.build(axes.map((a) => a.trim()), epsilon);
  });
  byId<HTMLButtonElement>("color").addEventListener("click", () => {
    void explorer.setColor(byId<HTMLInputElement>("color-var").value);
  });
  byId<HTMLButtonElement>("compare").addEventListener("click", () => {
    const variables = byId<HTMLInputElement>("compare-vars").value.split(",");
    void explorer.compareSelection(variables.map((v) => v.trim()));
  });
  byId<HTMLButtonElement>("summary").addEventListener("click", () => {
    void explorer.loadSummary();
  });

  return explorer;
}

if (typeof document !== "undefined" && document.getElementById("graph")) {
  mount("");
}
