/**
 * Client for the investigation service. Only the documented endpoints;
 * no verdicts or findings are ever computed on this side.
 */

import type {
  ExpandResponse,
  GraphPayload,
  InvestigationSummary,
  TagResponse,
  TimelinePayload,
  Verdict,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public code: string,
    message: string,
    public status: number,
  ) {
    super(message);
  }
}

async function parseError(response: Response): Promise<never> {
  let code = "http_error";
  let message = `${response.status} ${response.statusText}`;
  try {
    const body = await response.json();
    if (body && body.code) {
      code = body.code;
      message = body.message ?? message;
    }
  } catch {
    /* non-JSON error body: keep the HTTP line */
  }
  throw new ApiError(code, message, response.status);
}

export class ServiceClient {
  constructor(private baseUrl: string = "") {}

  private async get<T>(path: string): Promise<T> {
    const response = await fetch(this.baseUrl + path);
    if (!response.ok) await parseError(response);
    return response.json() as Promise<T>;
  }

  private async post<T>(path: string, body: unknown): Promise<T> {
    const response = await fetch(this.baseUrl + path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!response.ok) await parseError(response);
    return response.json() as Promise<T>;
  }

  createInvestigation(
    fixtures: string,
    token: string,
  ): Promise<{ id: string; revision: number; verdict: string }> {
    return this.post("/investigations", { source: { fixtures }, token });
  }

  getInvestigation(id: string): Promise<InvestigationSummary> {
    return this.get(`/investigations/${id}`);
  }

  getTimeline(id: string): Promise<TimelinePayload> {
    return this.get(`/investigations/${id}/timeline`);
  }

  getVerdict(id: string): Promise<Verdict> {
    return this.get(`/investigations/${id}/verdict`);
  }

  getGraph(id: string, rev?: number): Promise<GraphPayload> {
    const suffix = rev === undefined ? "" : `?rev=${rev}`;
    return this.get(`/investigations/${id}/graph${suffix}`);
  }

  expand(id: string, address: string, idempotencyKey?: string): Promise<ExpandResponse> {
    return this.post(`/investigations/${id}/expand`, {
      address,
      ...(idempotencyKey ? { idempotency_key: idempotencyKey } : {}),
    });
  }

  tag(
    id: string,
    address: string,
    category: string,
    label: string,
    idempotencyKey?: string,
  ): Promise<TagResponse> {
    return this.post(`/investigations/${id}/tag`, {
      address,
      category,
      label,
      ...(idempotencyKey ? { idempotency_key: idempotencyKey } : {}),
    });
  }

  reportUrl(id: string, format: "machine" | "human"): string {
    return `${this.baseUrl}/investigations/${id}/report?format=${format}`;
  }
}
