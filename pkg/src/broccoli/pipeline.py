"""End-to-end annotation: tokenize, score, select, translate, assemble.

The four scoring stages are pure given (text, learner state, scorer,
provider, config, clock), so the same inputs always produce the same
document regardless of entry point.
"""

from __future__ import annotations

from dataclasses import dataclass

from .document import AnnotatedDocument, DocumentMeta, build_document
from .memory import LearnerState, tutor_scores
from .ngram import ContextScorer
from .selection import SelectionConfig, select
from .textproc import (
    CandidateOccurrence,
    Lemmatizer,
    Token,
    TokenKind,
    bundled_stoplist,
    extract_candidates,
    tokenize,
)
from .translation import (
    MissingTranslation,
    TranslationProvider,
    translate_occurrence,
)


@dataclass(frozen=True)
class AnnotationDefaults:
    min_lemma_len: int = 3


def annotate(
    text: str,
    state: LearnerState,
    scorer: ContextScorer,
    provider: TranslationProvider,
    cfg: SelectionConfig,
    now: float,
    lemmatizer: Lemmatizer | None = None,
    stoplist: frozenset[str] | None = None,
    min_lemma_len: int = 3,
) -> AnnotatedDocument:
    """Annotate text for one learner at one instant.

    Does not record exposures; reading is what counts, and the reader
    reports it through events.
    """
    tokens = tokenize(text)
    word_count = sum(1 for t in tokens if t.kind is TokenKind.WORD)

    extraction = extract_candidates(
        tokens,
        stoplist=bundled_stoplist() if stoplist is None else stoplist,
        min_len=min_lemma_len,
        lemmatizer=lemmatizer,
    )
    candidates = extraction.candidates

    scores = tutor_scores(state, {c.lemma for c in candidates}, now)
    g_by_index = {s.token_index: s.G for s in scorer.score_tokens(tokens)}
    for cand in candidates:
        cand.R, cand.gamma = scores[cand.lemma]
        cand.G = g_by_index[cand.token_index]

    sentences = _sentences_with_offsets(tokens)
    by_lemma: dict[str, list[CandidateOccurrence]] = {}
    for cand in candidates:
        by_lemma.setdefault(cand.lemma, []).append(cand)

    # a lemma is usable only if every occurrence translates; otherwise the
    # greedy loop moves on without spending budget on it
    translations: dict[str, list[tuple[CandidateOccurrence, str]]] = {}

    def translatable(lemma: str) -> bool:
        done: list[tuple[CandidateOccurrence, str]] = []
        for cand in by_lemma[lemma]:
            sentence, offset = sentences[cand.sentence_index]
            try:
                target = translate_occurrence(provider, sentence, cand, offset)
            except MissingTranslation:
                return False
            done.append((cand, target))
        translations[lemma] = done
        return True

    result = select(candidates, cfg, word_count, translatable)

    chosen: list[tuple[Token, str, str]] = []
    for ranked in result.chosen_lemmas:
        for cand, target in translations[ranked.lemma]:
            chosen.append((tokens[cand.token_index], cand.lemma, target))
    chosen.sort(key=lambda item: item[0].start)

    warning = None
    if cfg.density > 0 and not chosen:
        warning = "no lemmas were translated"
    meta = DocumentMeta(
        density_requested=cfg.density,
        density_achieved=result.achieved_density,
        word_token_count=word_count,
        warning=warning,
    )
    return build_document(text, chosen, meta)


def _sentences_with_offsets(tokens: list[Token]) -> dict[int, tuple[list[Token], int]]:
    """Map sentence_index to (its tokens, document index of its first token)."""
    out: dict[int, tuple[list[Token], int]] = {}
    for i, tok in enumerate(tokens):
        if tok.sentence_index not in out:
            out[tok.sentence_index] = ([], i)
        out[tok.sentence_index][0].append(tok)
    return out
