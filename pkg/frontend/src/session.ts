import { ApiClient, ApiError } from "./api.js";
import { DwellTracker } from "./dwell.js";
import { EventQueue } from "./events.js";
import { renderDocument, renderFallback, type RenderedDoc } from "./render.js";
import { RevealController } from "./reveal.js";
import type { AnnotatedDocument, EventKind } from "./types.js";

export interface SessionOptions {
  api: ApiClient;
  queue: EventQueue;
  learnerId: string;
  root: HTMLElement;
  density?: number;
  dwellMs?: number;
  /** Event timestamps, epoch seconds; injectable for tests. */
  nowSeconds?: () => number;
}

/**
 * One learner reading one document: annotate, render, reveal on click, and
 * report reads once a span has dwelled in the viewport.  All events go
 * through the queue; nothing here talks to the network directly except the
 * annotate call itself.
 */
export class ReaderSession {
  density: number;
  doc: AnnotatedDocument | null = null;

  private readonly api: ApiClient;
  private readonly queue: EventQueue;
  private readonly learnerId: string;
  private readonly root: HTMLElement;
  private readonly dwellMs: number | undefined;
  private readonly nowSeconds: () => number;

  private text = "";
  private rendered: RenderedDoc | null = null;
  private reveal: RevealController | null = null;
  private dwell: DwellTracker | null = null;

  constructor(options: SessionOptions) {
    this.api = options.api;
    this.queue = options.queue;
    this.learnerId = options.learnerId;
    this.root = options.root;
    this.density = options.density ?? 0.1;
    this.dwellMs = options.dwellMs;
    this.nowSeconds = options.nowSeconds ?? (() => Date.now() / 1000);
  }

  /** Annotate and render; on service failure show the raw text unannotated. */
  async load(text: string): Promise<void> {
    this.text = text;
    let doc: AnnotatedDocument;
    try {
      doc = await this.api.annotate({
        learner_id: this.learnerId,
        text,
        density: this.density,
      });
    } catch (err) {
      const message =
        err instanceof ApiError
          ? `annotation unavailable (${err.status}): showing plain text`
          : "annotation service unreachable: showing plain text";
      renderFallback(text, message, this.root);
      this.doc = null;
      this.rendered = null;
      this.reveal = null;
      this.dwell = null;
      return;
    }

    this.doc = doc;
    this.rendered = renderDocument(doc, this.root);
    this.reveal = new RevealController(this.rendered, (spanId, lemma) =>
      this.push("reveal_click", spanId, lemma),
    );
    this.dwell = new DwellTracker((spanId) => {
      const entry = this.rendered?.spanById.get(spanId);
      if (entry) this.push("segment_read", spanId, entry.lemma);
    }, this.dwellMs);
  }

  /** The density control re-annotates; selection is server-side state. */
  async setDensity(density: number): Promise<void> {
    this.density = density;
    if (this.text) await this.load(this.text);
  }

  spanCount(): number {
    return this.rendered ? this.rendered.spanById.size : 0;
  }

  /** Click dispatch: toggles reveal state when the click lands on a span. */
  handleClick(target: EventTarget | null): void {
    if (!this.reveal || !(target instanceof Element)) return;
    const spanEl = target.closest<HTMLElement>("[data-span-id]");
    const spanId = spanEl?.dataset.spanId;
    if (spanId) this.reveal.toggle(spanId);
  }

  setSpanVisible(spanId: string, visible: boolean, nowMs: number): void {
    this.dwell?.setVisible(spanId, visible, nowMs);
  }

  dwellTick(nowMs: number): void {
    this.dwell?.tick(nowMs);
  }

  flushEvents(): Promise<number> {
    return this.queue.flush();
  }

  private push(kind: EventKind, spanId: string, lemma: string): void {
    if (!this.doc) return;
    this.queue.enqueue({
      learner_id: this.learnerId,
      doc_id: this.doc.doc_id,
      kind,
      lemma,
      span_id: spanId,
      timestamp: this.nowSeconds(),
    });
  }
}
