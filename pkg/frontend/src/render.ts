/** SVG graph rendering and result tables. */

import type { CompareResponse, GraphDoc, SummaryResponse } from "./api.js";
import { colorScale } from "./color.js";
import type { Point } from "./layout.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const BASE_RADIUS = 6;

export interface RenderOptions {
  coloring?: (number | null)[]; // per-vertex, in vertex order
  selected?: Set<number>;
  onSelect?: (ballId: number) => void;
}

/** Radius proportional to the square root of the ball's point count. */
export function vertexRadius(weight: number): number {
  return BASE_RADIUS * Math.sqrt(weight);
}

/**
 * Draw the cover graph into `svg`: one line per edge beneath one labelled
 * disc per ball. Discs are filled by the active coloring (uniform when none
 * is set) and outlined when selected.
 */
export function renderGraph(
  svg: SVGSVGElement,
  graph: GraphDoc,
  positions: Map<number, Point>,
  options: RenderOptions = {},
): void {
  svg.replaceChildren();
  const fill = options.coloring
    ? colorScale(options.coloring)
    : () => "#9ecae1";

  for (const edge of graph.edges) {
    const a = positions.get(edge.source)!;
    const b = positions.get(edge.target)!;
    const line = document.createElementNS(SVG_NS, "line");
    line.setAttribute("x1", String(a.x));
    line.setAttribute("y1", String(a.y));
    line.setAttribute("x2", String(b.x));
    line.setAttribute("y2", String(b.y));
    line.setAttribute("stroke", "#999999");
    line.setAttribute("data-edge", `${edge.source}-${edge.target}`);
    svg.appendChild(line);
  }

  graph.vertices.forEach((vertex, i) => {
    const p = positions.get(vertex.id)!;
    const group = document.createElementNS(SVG_NS, "g");
    group.setAttribute("data-ball", String(vertex.id));

    const circle = document.createElementNS(SVG_NS, "circle");
    circle.setAttribute("cx", String(p.x));
    circle.setAttribute("cy", String(p.y));
    circle.setAttribute("r", String(vertexRadius(vertex.weight)));
    circle.setAttribute(
      "fill",
      fill(options.coloring ? options.coloring[i] : null),
    );
    if (options.selected?.has(vertex.id)) {
      circle.setAttribute("stroke", "#000000");
      circle.setAttribute("stroke-width", "3");
    }
    group.appendChild(circle);

    const label = document.createElementNS(SVG_NS, "text");
    label.setAttribute("x", String(p.x));
    label.setAttribute("y", String(p.y));
    label.setAttribute("text-anchor", "middle");
    label.textContent = String(vertex.id);
    group.appendChild(label);

    if (options.onSelect) {
      group.addEventListener("click", () => options.onSelect!(vertex.id));
    }
    svg.appendChild(group);
  });
}

function cell(row: HTMLTableRowElement, text: string): HTMLTableCellElement {
  const td = document.createElement("td");
  td.textContent = text;
  row.appendChild(td);
  return td;
}

/**
 * Comparison table. Numbers pass through `String(...)` untouched so the
 * rendered Diff/Dist cells reproduce the service values exactly; flagged
 * variables get a `flagged` class on their row.
 */
export function renderCompareTable(
  container: HTMLElement,
  result: CompareResponse,
): void {
  container.replaceChildren();
  const table = document.createElement("table");
  const head = table.insertRow();
  for (const title of ["Variable", "Diff", "Dist"]) {
    const th = document.createElement("th");
    th.textContent = title;
    head.appendChild(th);
  }
  for (const row of result.rows) {
    const tr = table.insertRow();
    if (result.flags.includes(row.variable)) tr.classList.add("flagged");
    cell(tr, row.variable);
    cell(tr, String(row.diff));
    cell(tr, row.sigma_zero ? "n/a" : String(row.dist));
  }
  container.appendChild(table);
}

/** Per-ball means table, one column per variable plus the point count. */
export function renderSummaryTable(
  container: HTMLElement,
  summary: SummaryResponse,
): void {
  container.replaceChildren();
  const table = document.createElement("table");
  const head = table.insertRow();
  for (const title of ["Ball", ...summary.variables, "Obs"]) {
    const th = document.createElement("th");
    th.textContent = title;
    head.appendChild(th);
  }
  for (const row of summary.rows) {
    const tr = table.insertRow();
    cell(tr, String(row.ball_id));
    for (const variable of summary.variables) {
      const mean = row.means[variable];
      cell(tr, mean === null ? "n/a" : String(mean));
    }
    cell(tr, String(row.obs));
  }
  container.appendChild(table);
}
