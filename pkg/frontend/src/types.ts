// Wire types mirroring the service's JSON exactly; snake_case is the
// contract, not a style choice.

export interface TextRun {
  type: "run";
  text: string;
}

export interface TranslationSpan {
  type: "span";
  span_id: string;
  original_text: string;
  target_text: string;
  lemma: string;
  sentence_index: number;
}

export type Segment = TextRun | TranslationSpan;

export interface DocumentMeta {
  density_requested: number;
  density_achieved: number;
  word_token_count: number;
  warning?: string;
}

export interface AnnotatedDocument {
  doc_id: string;
  segments: Segment[];
  meta: DocumentMeta;
}

export type EventKind = "segment_read" | "reveal_click";

export interface ExposureEvent {
  learner_id: string;
  doc_id: string;
  kind: EventKind;
  lemma: string;
  span_id: string;
  /** Client clock, epoch seconds (fractional allowed). */
  timestamp: number;
}

export interface LemmaMemory {
  half_life: number;
  last_exposure: number;
  exposure_count: number;
  /** Null when the query time predates the last exposure. */
  recall: number | null;
}

export interface MemorySummary {
  learner_id: string;
  lemmas: Record<string, LemmaMemory>;
}

export function isSpan(segment: Segment): segment is TranslationSpan {
  return segment.type === "span";
}
