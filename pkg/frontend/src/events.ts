import type { ExposureEvent } from "./types.js";

/** Where flushed events go; ApiClient satisfies this. */
export interface EventSink {
  postEvents(events: ExposureEvent[]): Promise<{ accepted: number }>;
}

/** The subset of Storage the queue needs; null disables persistence. */
export interface QueueStorage {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
  removeItem(key: string): void;
}

export interface QueueOptions {
  storage?: QueueStorage | null;
  storageKey?: string;
  baseDelayMs?: number;
  maxDelayMs?: number;
  /** Injectable for tests; defaults to setTimeout. */
  schedule?: (fn: () => void, ms: number) => void;
}

/**
 * Local buffer between the reader and POST /v1/events.
 *
 * Events accumulate while reading and flush as batches in timestamp order
 * (one request per learner; the service rejects mixed batches).  A failed
 * flush keeps everything queued and schedules a retry with exponential
 * backoff.  The queue survives page reloads through the given storage.
 */
export class EventQueue {
  private pending: ExposureEvent[] = [];
  private flushing = false;
  private retryDelayMs: number;
  private retryScheduled = false;

  private readonly storage: QueueStorage | null;
  private readonly storageKey: string;
  private readonly baseDelayMs: number;
  private readonly maxDelayMs: number;
  private readonly schedule: (fn: () => void, ms: number) => void;

  constructor(
    private readonly sink: EventSink,
    options: QueueOptions = {},
  ) {
    this.storage = options.storage ?? null;
    this.storageKey = options.storageKey ?? "broccoli.event-queue";
    this.baseDelayMs = options.baseDelayMs ?? 1000;
    this.maxDelayMs = options.maxDelayMs ?? 30000;
    this.schedule = options.schedule ?? ((fn, ms) => setTimeout(fn, ms));
    this.retryDelayMs = this.baseDelayMs;
    this.restore();
  }

  get size(): number {
    return this.pending.length;
  }

  snapshot(): ExposureEvent[] {
    return [...this.pending];
  }

  enqueue(event: ExposureEvent): void {
    this.pending.push(event);
    // stable sort: equal timestamps keep their enqueue order
    this.pending.sort((a, b) => a.timestamp - b.timestamp);
    this.persist();
  }

  /**
   * Push everything pending to the service.  Resolves to the number of
   * events accepted; on failure the events stay queued and a retry is
   * scheduled.
   */
  async flush(): Promise<number> {
    if (this.flushing || this.pending.length === 0) return 0;
    this.flushing = true;
    let accepted = 0;
    try {
      while (this.pending.length > 0) {
        const learner = this.pending[0].learner_id;
        const batch = this.pending.filter((e) => e.learner_id === learner);
        const result = await this.sink.postEvents(batch);
        accepted += result.accepted;
        this.pending = this.pending.filter((e) => e.learner_id !== learner);
        this.persist();
      }
      this.retryDelayMs = this.baseDelayMs;
      return accepted;
    } catch {
      this.scheduleRetry();
      return accepted;
    } finally {
      this.flushing = false;
    }
  }

  private scheduleRetry(): void {
    if (this.retryScheduled) return;
    this.retryScheduled = true;
    const delay = this.retryDelayMs;
    this.retryDelayMs = Math.min(this.retryDelayMs * 2, this.maxDelayMs);
    this.schedule(() => {
      this.retryScheduled = false;
      void this.flush();
    }, delay);
  }

  private persist(): void {
    if (!this.storage) return;
    try {
      if (this.pending.length === 0) {
        this.storage.removeItem(this.storageKey);
      } else {
        this.storage.setItem(this.storageKey, JSON.stringify(this.pending));
      }
    } catch {
      // storage full or unavailable; the in-memory queue still works
    }
  }

  private restore(): void {
    if (!this.storage) return;
    try {
      const raw = this.storage.getItem(this.storageKey);
      if (!raw) return;
      const events = JSON.parse(raw) as ExposureEvent[];
      if (Array.isArray(events)) {
        this.pending = events;
        this.pending.sort((a, b) => a.timestamp - b.timestamp);
      }
    } catch {
      this.storage.removeItem(this.storageKey);
    }
  }
}
