/** Thin typed client for the review server endpoints. */

import type {
  ExportPayload,
  ProgressPayload,
  ReviewItemPayload,
  VoteAck,
  VoteBody,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    message: string,
    readonly status: number | null,
  ) {
    super(message);
  }

  /** True for failures worth retrying (network down, 5xx). */
  get transient(): boolean {
    return this.status === null || this.status >= 500 || this.status === 429;
  }
}

type FetchLike = typeof fetch;

export class ReviewApi {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = fetch,
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchFn(`${this.baseUrl}${path}`, init);
    } catch (err) {
      throw new ApiError(`network failure: ${String(err)}`, null);
    }
    if (!response.ok) {
      throw new ApiError(`${path} -> HTTP ${response.status}`, response.status);
    }
    return (await response.json()) as T;
  }

  items(annotator: string, batch = 20): Promise<ReviewItemPayload[]> {
    const params = new URLSearchParams({ annotator, batch: String(batch) });
    return this.request<ReviewItemPayload[]>(`/api/items?${params}`);
  }

  submitVote(vote: VoteBody): Promise<VoteAck> {
    return this.request<VoteAck>("/api/votes", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(vote),
    });
  }

  progress(): Promise<ProgressPayload> {
    return this.request<ProgressPayload>("/api/progress");
  }

  exportSets(): Promise<ExportPayload> {
    return this.request<ExportPayload>("/api/export");
  }
}
