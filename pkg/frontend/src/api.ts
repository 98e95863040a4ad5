/** Thin typed client for the ballmapper HTTP service. */

export interface ColumnSummary {
  name: string;
  numeric: boolean;
  min: number | null;
  max: number | null;
  mean: number | null;
  std: number | null;
  missing: number;
}

export interface DatasetInfo {
  id: string;
  rows: number;
  columns: ColumnSummary[];
}

export interface GraphVertex {
  id: number;
  weight: number;
  landmark: string;
  members: string[];
}

export interface GraphEdge {
  source: number;
  target: number;
  weight: number;
}

export interface GraphDoc {
  vertices: GraphVertex[];
  edges: GraphEdge[];
  params: { epsilon: number; strategy: string; seed: number };
}

export interface GraphResponse {
  id: string;
  content_hash: string;
  graph: GraphDoc;
}

export interface BuildRequest {
  axes: string[];
  epsilon: number;
  strategy?: string;
  seed?: number;
}

export interface ColoringResponse {
  variable: string;
  values: (number | null)[];
  counts: number[];
}

export interface ComparisonRow {
  variable: string;
  diff: number;
  dist: number | null;
  sigma_zero: boolean;
}

export interface CompareResponse {
  group_a: number[];
  group_b: number[];
  rows: ComparisonRow[];
  flags: string[];
}

export interface SummaryRow {
  ball_id: number;
  means: Record<string, number | null>;
  obs: number;
}

export interface SummaryResponse {
  variables: string[];
  rows: SummaryRow[];
}

export interface ApiError {
  code: string;
  message: string;
  detail: string | null;
}

export class ApiRequestError extends Error {
  constructor(readonly status: number, readonly body: ApiError) {
    super(`${body.code}: ${body.message}`);
  }
}

/** Fetch-shaped function so tests can substitute a recorded transport. */
export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path, init);
    const body = await response.json();
    if (!response.ok) {
      throw new ApiRequestError(response.status, body as ApiError);
    }
    return body as T;
  }

  private post<T>(path: string, payload: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  uploadDataset(text: string): Promise<DatasetInfo> {
    return this.request<DatasetInfo>("/datasets", {
      method: "POST",
      headers: { "Content-Type": "text/csv" },
      body: text,
    });
  }

  getDataset(id: string): Promise<DatasetInfo> {
    return this.request<DatasetInfo>(`/datasets/${id}`);
  }

  buildGraph(datasetId: string, req: BuildRequest): Promise<GraphResponse> {
    return this.post<GraphResponse>(`/datasets/${datasetId}/graphs`, req);
  }

  getGraph(id: string): Promise<GraphResponse> {
    return this.request<GraphResponse>(`/graphs/${id}`);
  }

  getColoring(graphId: string, variable: string): Promise<ColoringResponse> {
    return this.request<ColoringResponse>(
      `/graphs/${graphId}/colorings/${encodeURIComponent(variable)}`,
    );
  }

  compare(
    graphId: string,
    groupA: number[],
    groupB: number[],
    variables: string[],
  ): Promise<CompareResponse> {
    return this.post<CompareResponse>(`/graphs/${graphId}/compare`, {
      group_a: groupA,
      group_b: groupB,
      variables,
    });
  }

  getSummary(graphId: string): Promise<SummaryResponse> {
    return this.request<SummaryResponse>(`/graphs/${graphId}/summary`);
  }
}
