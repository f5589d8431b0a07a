export const DEFAULT_DWELL_MS = 2000;

/**
 * Turns viewport visibility into at-most-one read signal per span.
 *
 * A span counts as read once it has been continuously visible for the dwell
 * threshold; flicking past it reports nothing.  Spans that were never
 * rendered are never reported, because nothing calls setVisible for them.
 * Time comes in through the callers, so tests can drive the clock.
 */
export class DwellTracker {
  private visibleSince = new Map<string, number>();
  private reported = new Set<string>();

  constructor(
    private readonly onRead: (spanId: string) => void,
    private readonly thresholdMs: number = DEFAULT_DWELL_MS,
  ) {}

  setVisible(spanId: string, visible: boolean, nowMs: number): void {
    if (visible) {
      if (!this.visibleSince.has(spanId)) {
        this.visibleSince.set(spanId, nowMs);
      }
      this.maybeReport(spanId, nowMs);
    } else {
      this.maybeReport(spanId, nowMs);
      this.visibleSince.delete(spanId);
    }
  }

  /** Sweep for spans that reached the threshold without leaving the view. */
  tick(nowMs: number): void {
    for (const spanId of [...this.visibleSince.keys()]) {
      this.maybeReport(spanId, nowMs);
    }
  }

  private maybeReport(spanId: string, nowMs: number): void {
    if (this.reported.has(spanId)) return;
    const since = this.visibleSince.get(spanId);
    if (since === undefined) return;
    if (nowMs - since >= this.thresholdMs) {
      this.reported.add(spanId);
      this.onRead(spanId);
    }
  }
}
