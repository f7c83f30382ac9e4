/** Shapes of the HTTP API responses the UI consumes. */

export interface SolutionSummary {
  k: number;
  n_attributes: number;
  information: number;
  cluster_sizes: number[];
  cluster_nodes: number[];
  labels: number[];
  iterations: number;
}

export interface EmbeddingResponse {
  points: [number, number][];
  labels: number[] | null;
  cluster_nodes: number[] | null;
}

export interface BooleanStatDoc {
  frequency: number;
}

export interface RealStatDoc {
  mean: number;
  stdev: number;
}

export interface AttributeExplanation {
  index: number;
  name: string;
  type: "boolean" | "real";
  information: number;
  cluster: BooleanStatDoc | RealStatDoc;
  prior: BooleanStatDoc | RealStatDoc;
}

export interface ClusterExplanation {
  cluster: number;
  node: number;
  size: number;
  relative_size: number;
  attributes: AttributeExplanation[];
}

export interface ExplanationsResponse {
  summary: SolutionSummary;
  clusters: ClusterExplanation[];
}

export interface StatusResponse {
  running: boolean;
  iterations: number;
  elapsed_ms: number;
}

export interface SearchParams {
  alpha: number;
  beta: number;
  time_budget_ms: number;
  iteration_cap?: number;
}

export interface Api {
  recalc(sessionId: string, params: SearchParams): Promise<{ accepted: boolean; summary: SolutionSummary | null }>;
  refine(sessionId: string, params: SearchParams): Promise<{ accepted: boolean; summary: SolutionSummary | null }>;
  status(sessionId: string): Promise<StatusResponse>;
  embedding(sessionId: string): Promise<EmbeddingResponse>;
  explanations(sessionId: string): Promise<ExplanationsResponse>;
}

export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
  }
}
