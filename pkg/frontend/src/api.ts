import type { AnnotatedDocument, ExposureEvent, MemorySummary } from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export interface AnnotateRequest {
  learner_id: string;
  text: string;
  density?: number;
  now?: number;
}

/** Thin typed wrapper over the service endpoints; the only network code. */
export class ApiClient {
  private readonly base: string;
  private readonly fetchFn: typeof fetch;

  constructor(baseUrl: string, fetchFn: typeof fetch = fetch) {
    this.base = baseUrl.replace(/\/+$/, "");
    this.fetchFn = fetchFn;
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const resp = await this.fetchFn(`${this.base}${path}`, {
      method,
      headers: body === undefined ? undefined : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!resp.ok) {
      let detail = resp.statusText;
      try {
        const payload = (await resp.json()) as { detail?: unknown };
        if (payload.detail !== undefined) detail = String(payload.detail);
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(resp.status, detail);
    }
    return (await resp.json()) as T;
  }

  annotate(req: AnnotateRequest): Promise<AnnotatedDocument> {
    return this.request<AnnotatedDocument>("POST", "/v1/annotate", req);
  }

  postEvents(events: ExposureEvent[]): Promise<{ accepted: number }> {
    return this.request<{ accepted: number }>("POST", "/v1/events", { events });
  }

  learnerState(learnerId: string, now?: number): Promise<MemorySummary> {
    const query = now === undefined ? "" : `?now=${encodeURIComponent(now)}`;
    return this.request<MemorySummary>(
      "GET",
      `/v1/learner/${encodeURIComponent(learnerId)}/state${query}`,
    );
  }

  async health(): Promise<boolean> {
    try {
      await this.request<{ status: string }>("GET", "/health");
      return true;
    } catch {
      return false;
    }
  }
}
