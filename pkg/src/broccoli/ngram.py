"""Context-based word scoring: how guessable is a word from its left context.

A count-based n-gram model with add-k smoothing estimates, for each word
token, G = P(word | preceding context).  Contexts back off from order-1 items
to shorter suffixes until one was seen in training; if none was, the score is
the uniform 1/|vocab|.  Scores stay in (0, 1] by construction.

Words enter the model as lemmas so the scores line up with the lemma-keyed
memory model; numbers and punctuation participate as their surfaces.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Protocol

from .textproc import Lemmatizer, Token, TokenKind

PAD = "<s>"
UNK = "<unk>"

_MAGIC = "ngram-counts v1"


@dataclass(frozen=True)
class GuessabilityScore:
    token_index: int
    G: float


class ContextScorer(Protocol):
    def score_tokens(self, tokens: list[Token]) -> list[GuessabilityScore]: ...


def _sentence_streams(
    tokens: list[Token], lemmatizer: Lemmatizer
) -> list[list[tuple[int, str, bool]]]:
    """Group tokens by sentence as (token_index, stream item, is_word)."""
    sentences: list[list[tuple[int, str, bool]]] = []
    current = -1
    for i, tok in enumerate(tokens):
        if tok.sentence_index != current:
            sentences.append([])
            current = tok.sentence_index
        if tok.kind is TokenKind.WORD:
            sentences[-1].append((i, lemmatizer(tok.surface), True))
        else:
            sentences[-1].append((i, tok.surface, False))
    return sentences


@dataclass
class NGramModel:
    order: int
    smoothing_k: float
    vocab: frozenset[str]
    pair_counts: dict[tuple[tuple[str, ...], str], int]
    context_counts: dict[tuple[str, ...], int]
    lemmatizer: Lemmatizer = field(default_factory=Lemmatizer.bundled, repr=False)

    # context lengths used for counting and backoff; a unigram model uses
    # the empty context, everything else works on non-empty suffixes only
    def _context_lengths(self) -> list[int]:
        if self.order == 1:
            return [0]
        return list(range(self.order - 1, 0, -1))

    @classmethod
    def train(
        cls,
        tokens: list[Token],
        order: int = 3,
        smoothing_k: float = 1.0,
        lemmatizer: Lemmatizer | None = None,
    ) -> "NGramModel":
        if order < 1:
            raise ValueError("order must be >= 1")
        if smoothing_k < 0:
            raise ValueError("smoothing_k must be >= 0")
        lemmatizer = lemmatizer or Lemmatizer.bundled()
        sentences = _sentence_streams(tokens, lemmatizer)
        items = [[item for _, item, _ in sent] for sent in sentences]
        if not any(items):
            raise ValueError("cannot train on an empty corpus")

        vocab = {w for sent in items for w in sent} | {UNK}
        model = cls(
            order=order,
            smoothing_k=smoothing_k,
            vocab=frozenset(vocab),
            pair_counts={},
            context_counts={},
            lemmatizer=lemmatizer,
        )
        lengths = model._context_lengths()
        for sent in items:
            padded = [PAD] * (order - 1) + sent
            for i, w in enumerate(sent):
                pos = i + order - 1
                for length in lengths:
                    ctx = tuple(padded[pos - length : pos])
                    model.pair_counts[(ctx, w)] = model.pair_counts.get((ctx, w), 0) + 1
                    model.context_counts[ctx] = model.context_counts.get(ctx, 0) + 1
        return model

    def _map(self, item: str) -> str:
        return item if item in self.vocab else UNK

    def _score_position(self, padded: list[str], pos: int) -> float:
        """Score padded[pos] given its left context, with backoff."""
        v = len(self.vocab)
        w = padded[pos]
        for length in self._context_lengths():
            ctx = tuple(padded[pos - length : pos])
            ctx_count = self.context_counts.get(ctx, 0)
            if ctx_count == 0:
                continue
            pair = self.pair_counts.get((ctx, w), 0)
            if self.smoothing_k == 0 and pair == 0:
                # unsmoothed zero would leave the (0,1] range; keep backing off
                continue
            return (pair + self.smoothing_k) / (ctx_count + self.smoothing_k * v)
        return 1.0 / v

    def score_tokens(self, tokens: list[Token]) -> list[GuessabilityScore]:
        scores: list[GuessabilityScore] = []
        for sent in _sentence_streams(tokens, self.lemmatizer):
            padded = [PAD] * (self.order - 1) + [self._map(item) for _, item, _ in sent]
            for i, (token_index, _, is_word) in enumerate(sent):
                if not is_word:
                    continue
                g = self._score_position(padded, i + self.order - 1)
                scores.append(GuessabilityScore(token_index, g))
        return scores

    # -- persistence ------------------------------------------------------

    def save(self, path: Path | str) -> None:
        """Write counts as sorted tab-separated lines under a small header."""
        lines = [
            _MAGIC,
            f"order\t{self.order}",
            f"k\t{self.smoothing_k!r}",
            f"vocab\t{len(self.vocab)}",
        ]
        for (ctx, lemma), count in sorted(
            self.pair_counts.items(), key=lambda kv: (kv[0][0], kv[0][1])
        ):
            lines.append(f"{' '.join(ctx)}\t{lemma}\t{count}")
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: Path | str, lemmatizer: Lemmatizer | None = None) -> "NGramModel":
        text = Path(path).read_text(encoding="utf-8")
        lines = text.splitlines()
        if len(lines) < 4 or lines[0] != _MAGIC:
            raise ValueError(f"{path}: not a recognized count file")

        def header(i: int, key: str) -> str:
            name, _, value = lines[i].partition("\t")
            if name != key:
                raise ValueError(f"{path}: expected {key} on line {i + 1}")
            return value

        order = int(header(1, "order"))
        k = float(header(2, "k"))
        vocab_size = int(header(3, "vocab"))

        pair_counts: dict[tuple[tuple[str, ...], str], int] = {}
        context_counts: dict[tuple[str, ...], int] = {}
        targets: set[str] = set()
        min_length = 0 if order == 1 else 1
        for n, line in enumerate(lines[4:], start=5):
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ValueError(f"{path}:{n}: expected 3 tab-separated fields")
            ctx_str, lemma, count_str = parts
            ctx = tuple(ctx_str.split(" ")) if ctx_str else ()
            count = int(count_str)
            pair_counts[(ctx, lemma)] = count
            context_counts[ctx] = context_counts.get(ctx, 0) + count
            if len(ctx) == min_length:
                targets.add(lemma)

        vocab = frozenset(targets | {UNK})
        if len(vocab) != vocab_size:
            raise ValueError(
                f"{path}: vocab size mismatch (header {vocab_size}, counted {len(vocab)})"
            )
        return cls(
            order=order,
            smoothing_k=k,
            vocab=vocab,
            pair_counts=pair_counts,
            context_counts=context_counts,
            lemmatizer=lemmatizer or Lemmatizer.bundled(),
        )


@dataclass(frozen=True)
class ConstantScorer:
    """Fixed-G scorer for ablation runs."""

    g: float = 0.2

    def __post_init__(self) -> None:
        if not 0 < self.g <= 1:
            raise ValueError("constant guessability must be in (0, 1]")

    def score_tokens(self, tokens: list[Token]) -> list[GuessabilityScore]:
        return [
            GuessabilityScore(i, self.g)
            for i, tok in enumerate(tokens)
            if tok.kind is TokenKind.WORD
        ]


def train_ngram(
    tokens: list[Token],
    order: int = 3,
    smoothing_k: float = 1.0,
    lemmatizer: Lemmatizer | None = None,
) -> NGramModel:
    return NGramModel.train(tokens, order=order, smoothing_k=smoothing_k, lemmatizer=lemmatizer)


def score_tokens(model: ContextScorer, tokens: list[Token]) -> list[GuessabilityScore]:
    return model.score_tokens(tokens)
