"""Target-language lookup for selected occurrences (pipeline stage 4).

Two provider styles: a lemma dictionary (the default, desk-scale) and an
aligned-sentence fixture that replays canned sentence translations with
token alignments, standing in for a live MT service.  Only the aligned style
can pick a context-dependent target, since it answers per occurrence rather
than per lemma.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol, Sequence, runtime_checkable

from .textproc import CandidateOccurrence, Token


class MissingTranslation(Exception):
    """No target text for this occurrence; the selector drops the lemma."""


class ProviderUnavailable(Exception):
    """Transient provider failure; surfaces as a service error, not a drop."""


@runtime_checkable
class TranslationProvider(Protocol):
    capabilities: frozenset[str]

    def translate(
        self, sentence: Sequence[Token], index: int, lemma: str
    ) -> str: ...


@dataclass
class DictionaryProvider:
    entries: dict[str, str] = field(default_factory=dict)
    capabilities: frozenset[str] = frozenset({"lemma_lookup"})

    def has(self, lemma: str) -> bool:
        return lemma in self.entries

    def translate(self, sentence: Sequence[Token], index: int, lemma: str) -> str:
        try:
            return self.entries[lemma]
        except KeyError:
            raise MissingTranslation(lemma) from None


@dataclass(frozen=True)
class AlignedTranslation:
    target_sentence: str
    # pairs of (source token index, target token index)
    alignment: frozenset[tuple[int, int]]


@dataclass
class AlignedFixtureProvider:
    """Canned sentence translations keyed by the source sentence's surfaces."""

    records: dict[str, AlignedTranslation] = field(default_factory=dict)
    capabilities: frozenset[str] = frozenset({"aligned_sentence"})

    @staticmethod
    def sentence_key(sentence: Sequence[Token]) -> str:
        return " ".join(t.surface for t in sentence)

    def translate(self, sentence: Sequence[Token], index: int, lemma: str) -> str:
        record = self.records.get(self.sentence_key(sentence))
        if record is None:
            raise MissingTranslation(lemma)
        targets = sorted(j for i, j in record.alignment if i == index)
        if not targets:
            raise MissingTranslation(lemma)
        words = record.target_sentence.split()
        return " ".join(words[j] for j in targets)


def translate_occurrence(
    provider: TranslationProvider,
    sentence: Sequence[Token],
    occurrence: CandidateOccurrence,
    sentence_offset: int = 0,
) -> str:
    """Translate one occurrence; index is document-level, offset locates the sentence."""
    index = occurrence.token_index - sentence_offset
    if not 0 <= index < len(sentence):
        raise ValueError(
            f"occurrence at token {occurrence.token_index} lies outside the sentence"
        )
    return provider.translate(sentence, index, occurrence.lemma)


def load_dictionary(path: Path | str) -> DictionaryProvider:
    """Parse a UTF-8 TSV of `source_lemma<TAB>target_surface`; '#' comments."""
    entries: dict[str, str] = {}
    for n, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise ValueError(f"{path}:{n}: expected 2 tab-separated fields, got {len(parts)}")
        source, target = parts[0].strip(), parts[1].strip()
        if not source or not target:
            raise ValueError(f"{path}:{n}: empty source or target")
        if source in entries:
            warnings.warn(f"{path}:{n}: duplicate entry for {source!r}, keeping the last")
        entries[source] = target
    return DictionaryProvider(entries)


def load_aligned_fixture(path: Path | str) -> AlignedFixtureProvider:
    """Parse `source<TAB>target<TAB>i-j i-j ...` records; '#' comments.

    Alignment pairs use token indices: i into the space-split source, j into
    the space-split target.
    """
    records: dict[str, AlignedTranslation] = {}
    for n, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise ValueError(f"{path}:{n}: expected 3 tab-separated fields, got {len(parts)}")
        source, target, pair_text = parts
        n_source = len(source.split())
        n_target = len(target.split())
        pairs: set[tuple[int, int]] = set()
        for chunk in pair_text.split():
            left, sep, right = chunk.partition("-")
            if not sep or not left.isdigit() or not right.isdigit():
                raise ValueError(f"{path}:{n}: bad alignment pair {chunk!r}")
            i, j = int(left), int(right)
            if i >= n_source or j >= n_target:
                raise ValueError(f"{path}:{n}: alignment pair {chunk!r} out of range")
            pairs.add((i, j))
        records[source] = AlignedTranslation(target, frozenset(pairs))
    return AlignedFixtureProvider(records)
