import type { AnnotatedDocument } from "./types.js";
import { isSpan } from "./types.js";

export interface SpanEntry {
  el: HTMLElement;
  original: string;
  target: string;
  lemma: string;
}

export interface RenderedDoc {
  spanById: Map<string, SpanEntry>;
}

export const SPAN_CLASS = "tr-span";
export const REVEALED_CLASS = "revealed";
export const BANNER_CLASS = "banner";

/**
 * Build the reading view: runs become text nodes, translation spans become
 * highlighted elements showing only the target text.  The original text
 * lives in the returned registry, never in the DOM, so it cannot leak into
 * the page before a reveal.
 */
export function renderDocument(doc: AnnotatedDocument, root: HTMLElement): RenderedDoc {
  root.textContent = "";
  const spanById = new Map<string, SpanEntry>();
  for (const segment of doc.segments) {
    if (isSpan(segment)) {
      const el = root.ownerDocument.createElement("mark");
      el.className = SPAN_CLASS;
      el.dataset.spanId = segment.span_id;
      el.textContent = segment.target_text;
      root.appendChild(el);
      spanById.set(segment.span_id, {
        el,
        original: segment.original_text,
        target: segment.target_text,
        lemma: segment.lemma,
      });
    } else {
      root.appendChild(root.ownerDocument.createTextNode(segment.text));
    }
  }
  return { spanById };
}

/** Unannotated view with an inline notice, for when the service fails. */
export function renderFallback(text: string, message: string, root: HTMLElement): void {
  root.textContent = "";
  const banner = root.ownerDocument.createElement("div");
  banner.className = BANNER_CLASS;
  banner.textContent = message;
  root.appendChild(banner);
  root.appendChild(root.ownerDocument.createTextNode(text));
}
