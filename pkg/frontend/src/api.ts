/** Typed client for the triage service; the only way the UI touches data. */

import type {
  ExceptionPage,
  ExceptionStatus,
  ExceptionView,
  RunView,
  StatementView,
  SummaryView,
} from "./types.js";
import type { TriageFilterState } from "./filter.js";
import { toQuery } from "./filter.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    message: string,
  ) {
    super(message);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    } catch (err) {
      throw new ApiError(0, `service unreachable: ${String(err)}`);
    }
    let body: unknown = null;
    try {
      body = await response.json();
    } catch {
      body = null;
    }
    if (!response.ok) {
      const message =
        body && typeof body === "object" && "message" in body
          ? String((body as { message: unknown }).message)
          : `request failed with status ${response.status}`;
      throw new ApiError(response.status, message);
    }
    return body as T;
  }

  listExceptions(filter: TriageFilterState): Promise<ExceptionPage> {
    const query = toQuery(filter);
    return this.request<ExceptionPage>(`/api/exceptions${query ? `?${query}` : ""}`);
  }

  getException(id: string): Promise<ExceptionView> {
    return this.request<ExceptionView>(`/api/exceptions/${encodeURIComponent(id)}`);
  }

  getStatement(docId: string): Promise<StatementView> {
    return this.request<StatementView>(`/api/statements/${encodeURIComponent(docId)}`);
  }

  postStatus(
    id: string,
    newStatus: ExceptionStatus,
    actor: string,
    note = "",
  ): Promise<ExceptionView> {
    return this.request<ExceptionView>(`/api/exceptions/${encodeURIComponent(id)}/status`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ new_status: newStatus, actor, note }),
    });
  }

  getSummary(): Promise<SummaryView> {
    return this.request<SummaryView>("/api/summary");
  }

  getRuns(): Promise<{ runs: RunView[] }> {
    return this.request<{ runs: RunView[] }>("/api/runs");
  }
}
