import { REVEALED_CLASS, type RenderedDoc } from "./render.js";

/**
 * Per-span click-to-reveal state.
 *
 * Opening a span swaps the translation for the original text and reports it
 * once; closing restores the translation silently.  Each fresh open is a new
 * reading signal, so reopening reports again, but a single open state never
 * reports twice.
 */
export class RevealController {
  private open = new Set<string>();

  constructor(
    private readonly rendered: RenderedDoc,
    private readonly onReveal: (spanId: string, lemma: string) => void,
  ) {}

  isOpen(spanId: string): boolean {
    return this.open.has(spanId);
  }

  /** Returns the new open state; unknown span ids are a no-op. */
  toggle(spanId: string): boolean {
    const entry = this.rendered.spanById.get(spanId);
    if (!entry) return false;
    if (this.open.has(spanId)) {
      this.open.delete(spanId);
      entry.el.textContent = entry.target;
      entry.el.classList.remove(REVEALED_CLASS);
      return false;
    }
    this.open.add(spanId);
    entry.el.textContent = entry.original;
    entry.el.classList.add(REVEALED_CLASS);
    this.onReveal(spanId, entry.lemma);
    return true;
  }
}
