/** Thin typed client over the HTTP API. */

import {
  Api,
  ApiError,
  EmbeddingResponse,
  ExplanationsResponse,
  SearchParams,
  SolutionSummary,
  StatusResponse,
} from "./types.js";

export class HttpApi implements Api {
  constructor(private baseUrl: string = "") {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(this.baseUrl + path, init);
    if (!response.ok && response.status !== 202) {
      let detail = response.statusText;
      try {
        const body = await response.json();
        if (body && typeof body.detail === "string") {
          detail = body.detail;
        }
      } catch {
        // keep the status text
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  private post(sessionId: string, action: string, params: SearchParams) {
    return fetch(`${this.baseUrl}/sessions/${sessionId}/${action}`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(params),
    });
  }

  private async search(
    sessionId: string,
    action: string,
    params: SearchParams,
  ): Promise<{ accepted: boolean; summary: SolutionSummary | null }> {
    const response = await this.post(sessionId, action, params);
    if (response.status === 202) {
      return { accepted: true, summary: null };
    }
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const body = await response.json();
        if (body && typeof body.detail === "string") {
          detail = body.detail;
        }
      } catch {
        // keep the status text
      }
      throw new ApiError(response.status, detail);
    }
    return { accepted: false, summary: (await response.json()) as SolutionSummary };
  }

  recalc(sessionId: string, params: SearchParams) {
    return this.search(sessionId, "recalc", params);
  }

  refine(sessionId: string, params: SearchParams) {
    return this.search(sessionId, "refine", params);
  }

  status(sessionId: string): Promise<StatusResponse> {
    return this.request(`/sessions/${sessionId}/status`);
  }

  embedding(sessionId: string): Promise<EmbeddingResponse> {
    return this.request(`/sessions/${sessionId}/embedding`);
  }

  explanations(sessionId: string): Promise<ExplanationsResponse> {
    return this.request(`/sessions/${sessionId}/explanations`);
  }
}
