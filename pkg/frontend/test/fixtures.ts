import type { AnnotatedDocument, Segment } from "../src/types.js";

/** A document with n spans, each wrapping the word `word<i>`. */
export function docWithSpans(n: number): AnnotatedDocument {
  const segments: Segment[] = [];
  for (let i = 0; i < n; i++) {
    segments.push({ type: "run", text: i === 0 ? "Start " : " filler " });
    segments.push({
      type: "span",
      span_id: `s${i}`,
      original_text: `word${i}`,
      target_text: `sana${i}`,
      lemma: `word${i}`,
      sentence_index: 0,
    });
  }
  segments.push({ type: "run", text: " end." });
  return {
    doc_id: `doc-${n}`,
    segments,
    meta: {
      density_requested: n / 10,
      density_achieved: n / 10,
      word_token_count: 2 * n + 2,
    },
  };
}

export function jsonResponse(payload: unknown, status = 200): Response {
  return new Response(JSON.stringify(payload), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}
