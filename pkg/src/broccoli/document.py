"""Annotated document: alternating text runs and translation spans.

A document is the source text cut into segments.  Translation spans carry
the replaced original text, so substituting originals back and concatenating
segments reproduces the input byte for byte.  Serialization is canonical
(sorted keys, no whitespace, raw UTF-8) so equal documents have equal JSON,
and the document id is a content hash of that canonical form.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from typing import Any, Union

from .textproc import Token


@dataclass(frozen=True)
class TextRun:
    text: str


@dataclass(frozen=True)
class TranslationSpan:
    span_id: str
    original_text: str
    target_text: str
    lemma: str
    sentence_index: int


Segment = Union[TextRun, TranslationSpan]


@dataclass(frozen=True)
class DocumentMeta:
    density_requested: float
    density_achieved: float
    word_token_count: int
    warning: str | None = None


@dataclass(frozen=True)
class AnnotatedDocument:
    doc_id: str
    segments: tuple[Segment, ...]
    meta: DocumentMeta

    def source_text(self) -> str:
        parts = [
            seg.text if isinstance(seg, TextRun) else seg.original_text
            for seg in self.segments
        ]
        return "".join(parts)

    def spans(self) -> list[TranslationSpan]:
        return [seg for seg in self.segments if isinstance(seg, TranslationSpan)]

    def to_payload(self) -> dict[str, Any]:
        return {"doc_id": self.doc_id, **_body_payload(self.segments, self.meta)}

    def to_json(self) -> str:
        return canonical_json(self.to_payload())

    @classmethod
    def from_payload(cls, payload: dict[str, Any]) -> "AnnotatedDocument":
        segments: list[Segment] = []
        for seg in payload["segments"]:
            if seg["type"] == "run":
                segments.append(TextRun(seg["text"]))
            elif seg["type"] == "span":
                segments.append(
                    TranslationSpan(
                        span_id=seg["span_id"],
                        original_text=seg["original_text"],
                        target_text=seg["target_text"],
                        lemma=seg["lemma"],
                        sentence_index=seg["sentence_index"],
                    )
                )
            else:
                raise ValueError(f"unknown segment type {seg['type']!r}")
        meta = payload["meta"]
        return cls(
            doc_id=payload["doc_id"],
            segments=tuple(segments),
            meta=DocumentMeta(
                density_requested=meta["density_requested"],
                density_achieved=meta["density_achieved"],
                word_token_count=meta["word_token_count"],
                warning=meta.get("warning"),
            ),
        )

    @classmethod
    def from_json(cls, text: str) -> "AnnotatedDocument":
        return cls.from_payload(json.loads(text))


def canonical_json(payload: Any) -> str:
    return json.dumps(payload, ensure_ascii=False, sort_keys=True, separators=(",", ":"))


def _body_payload(segments: tuple[Segment, ...], meta: DocumentMeta) -> dict[str, Any]:
    seg_payload: list[dict[str, Any]] = []
    for seg in segments:
        if isinstance(seg, TextRun):
            seg_payload.append({"type": "run", "text": seg.text})
        else:
            seg_payload.append(
                {
                    "type": "span",
                    "span_id": seg.span_id,
                    "original_text": seg.original_text,
                    "target_text": seg.target_text,
                    "lemma": seg.lemma,
                    "sentence_index": seg.sentence_index,
                }
            )
    meta_payload: dict[str, Any] = {
        "density_requested": meta.density_requested,
        "density_achieved": meta.density_achieved,
        "word_token_count": meta.word_token_count,
    }
    if meta.warning is not None:
        meta_payload["warning"] = meta.warning
    return {"segments": seg_payload, "meta": meta_payload}


def build_document(
    text: str,
    translated: list[tuple[Token, str, str]],
    meta: DocumentMeta,
) -> AnnotatedDocument:
    """Assemble segments from (token, lemma, target) triples sorted by position.

    Runs are the byte gaps between translated tokens; empty gaps are skipped.
    The doc id is a hash of the canonical payload, so identical annotations
    share an id.
    """
    raw = text.encode("utf-8")
    segments: list[Segment] = []
    pos = 0
    for n, (token, lemma, target) in enumerate(translated):
        if token.start < pos:
            raise ValueError("translated tokens overlap or are out of order")
        gap = raw[pos : token.start]
        if gap:
            segments.append(TextRun(gap.decode("utf-8")))
        segments.append(
            TranslationSpan(
                span_id=f"s{n}",
                original_text=token.surface,
                target_text=target,
                lemma=lemma,
                sentence_index=token.sentence_index,
            )
        )
        pos = token.end
    tail = raw[pos:]
    if tail:
        segments.append(TextRun(tail.decode("utf-8")))

    body = canonical_json(_body_payload(tuple(segments), meta))
    doc_id = hashlib.sha256(body.encode("utf-8")).hexdigest()[:16]
    return AnnotatedDocument(doc_id=doc_id, segments=tuple(segments), meta=meta)
