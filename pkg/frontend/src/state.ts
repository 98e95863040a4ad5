/** Explorer session state and the steering actions that drive it. */

import {
  ApiClient,
  CompareResponse,
  DatasetInfo,
  GraphResponse,
  SummaryResponse,
} from "./api.js";

export interface ViewState {
  dataset: DatasetInfo | null;
  graph: GraphResponse | null;
  epsilon: number;
  axes: string[];
  colorVariable: string | null;
  coloring: (number | null)[] | null;
  selected: number[]; // ball ids, in selection order
  comparison: CompareResponse | null;
  summary: SummaryResponse | null;
}

function initialState(): ViewState {
  return {
    dataset: null,
    graph: null,
    epsilon: 0.12,
    axes: [],
    colorVariable: null,
    coloring: null,
    selected: [],
    comparison: null,
    summary: null,
  };
}

/**
 * Steerable explorer session: upload a dataset, rebuild at a new epsilon,
 * recolor, select balls, compare, summarize. Every mutation calls the
 * subscriber so the UI re-renders; responses that arrive after a newer
 * rebuild superseded them are discarded.
 */
export class Explorer {
  state: ViewState = initialState();
  private buildGeneration = 0;

  constructor(
    private readonly api: ApiClient,
    private readonly onChange: (state: ViewState) => void = () => {},
  ) {}

  private notify(): void {
    this.onChange(this.state);
  }

  async uploadDataset(text: string): Promise<void> {
    this.state = initialState();
    this.state.dataset = await this.api.uploadDataset(text);
    this.notify();
  }

  async build(axes: string[], epsilon: number): Promise<void> {
    if (!this.state.dataset) throw new Error("no dataset loaded");
    const generation = ++this.buildGeneration;
    const graph = await this.api.buildGraph(this.state.dataset.id, {
      axes,
      epsilon,
    });
    if (generation !== this.buildGeneration) return; // superseded
    this.state.graph = graph;
    this.state.axes = axes;
    this.state.epsilon = epsilon;
    this.state.coloring = null;
    this.state.colorVariable = null;
    this.state.selected = [];
    this.state.comparison = null;
    this.state.summary = null;
    this.notify();
  }

  setEpsilon(epsilon: number): Promise<void> {
    return this.build(this.state.axes, epsilon);
  }

  async setColor(variable: string): Promise<void> {
    const graph = this.requireGraph();
    const generation = this.buildGeneration;
    const coloring = await this.api.getColoring(graph.id, variable);
    if (generation !== this.buildGeneration) return;
    this.state.colorVariable = variable;
    this.state.coloring = coloring.values;
    this.notify();
  }

  toggleSelect(ballId: number): void {
    const selected = this.state.selected;
    const at = selected.indexOf(ballId);
    if (at >= 0) selected.splice(at, 1);
    else selected.push(ballId);
    this.notify();
  }

  /** Compare the first selected ball against the rest of the selection. */
  async compareSelection(variables: string[]): Promise<CompareResponse> {
    const graph = this.requireGraph();
    if (this.state.selected.length < 2) {
      throw new Error("select at least two balls to compare");
    }
    const [first, ...rest] = this.state.selected;
    const comparison = await this.api.compare(graph.id, [first], rest, variables);
    this.state.comparison = comparison;
    this.notify();
    return comparison;
  }

  async loadSummary(): Promise<SummaryResponse> {
    const graph = this.requireGraph();
    const summary = await this.api.getSummary(graph.id);
    this.state.summary = summary;
    this.notify();
    return summary;
  }

  private requireGraph(): GraphResponse {
    if (!this.state.graph) throw new Error("no graph built");
    return this.state.graph;
  }
}

/** Degree-one vertices: the visual "tips" of the shape. */
export function leafBalls(graph: GraphResponse): number[] {
  const degree = new Map<number, number>();
  for (const vertex of graph.graph.vertices) degree.set(vertex.id, 0);
  for (const edge of graph.graph.edges) {
    degree.set(edge.source, degree.get(edge.source)! + 1);
    degree.set(edge.target, degree.get(edge.target)! + 1);
  }
  return [...degree.entries()]
    .filter(([, d]) => d === 1)
    .map(([id]) => id)
    .sort((a, b) => a - b);
}
