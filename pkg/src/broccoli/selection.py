"""Priority scoring and density-constrained lemma selection (pipeline stage 3).

Each occurrence combines memory recall R and context guessability G into an
understanding probability

    P = R + G - R*G

(recall and guessing treated as independent), then into a priority P * gamma
that weighs how much the memory would gain from an exposure right now.  A
lemma's priority is the best of its occurrences.  Selection walks lemmas in
priority order, translating every occurrence of each chosen lemma, until the
requested share of word tokens is covered.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

from .textproc import CandidateOccurrence


@dataclass(frozen=True)
class SelectionConfig:
    density: float = 0.1
    max_lemmas: int | None = None

    def __post_init__(self) -> None:
        if not 0.0 <= self.density <= 1.0:
            raise ValueError("density must be in [0, 1]")
        if self.max_lemmas is not None and self.max_lemmas < 0:
            raise ValueError("max_lemmas must be >= 0")


@dataclass(frozen=True)
class RankedLemma:
    lemma: str
    priority: float


@dataclass
class SelectionResult:
    chosen_lemmas: list[RankedLemma] = field(default_factory=list)
    chosen_occurrences: list[CandidateOccurrence] = field(default_factory=list)
    achieved_density: float = 0.0


def understanding_probability(r: float, g: float) -> float:
    """P = R + G - R*G, the chance that recall or context carries the word."""
    if not (0.0 <= r <= 1.0 and 0.0 <= g <= 1.0):
        raise ValueError("R and G must be in [0, 1]")
    lo, hi = sorted((r, g))
    # same polynomial, but this form keeps the float result inside
    # [max(R, G), min(1, R+G)] and hits the R=1 / G=1 endpoints exactly
    return hi + lo * (1.0 - hi)


def priority(p: float, gamma: float) -> float:
    return p * gamma


def rank_lemmas(candidates: Sequence[CandidateOccurrence]) -> list[RankedLemma]:
    """Score occurrences in place and rank lemmas by their best occurrence.

    Ties are broken by lemma id ascending so annotation is reproducible.
    """
    best: dict[str, float] = {}
    for cand in candidates:
        if cand.R is None or cand.G is None or cand.gamma is None:
            raise ValueError(f"candidate {cand.lemma!r} is missing scores")
        cand.P = understanding_probability(cand.R, cand.G)
        cand.priority = priority(cand.P, cand.gamma)
        if cand.lemma not in best or cand.priority > best[cand.lemma]:
            best[cand.lemma] = cand.priority
    ranked = sorted(best.items(), key=lambda kv: (-kv[1], kv[0]))
    return [RankedLemma(lemma, prio) for lemma, prio in ranked]


def select(
    candidates: Sequence[CandidateOccurrence],
    cfg: SelectionConfig,
    total_word_tokens: int,
    translatable: Callable[[str], bool] | None = None,
) -> SelectionResult:
    """Greedily choose lemmas until the density budget is met.

    The density check runs before each addition, so a zero budget selects
    nothing.  Lemmas the dictionary cannot translate are skipped without
    consuming budget; every occurrence of a chosen lemma is selected.
    """
    result = SelectionResult()
    if total_word_tokens <= 0:
        return result

    by_lemma: dict[str, list[CandidateOccurrence]] = {}
    for cand in candidates:
        by_lemma.setdefault(cand.lemma, []).append(cand)

    covered = 0
    for ranked in rank_lemmas(candidates):
        if covered / total_word_tokens >= cfg.density:
            break
        if cfg.max_lemmas is not None and len(result.chosen_lemmas) >= cfg.max_lemmas:
            break
        if translatable is not None and not translatable(ranked.lemma):
            continue
        occs = by_lemma[ranked.lemma]
        result.chosen_lemmas.append(ranked)
        result.chosen_occurrences.extend(occs)
        covered += len(occs)

    result.chosen_occurrences.sort(key=lambda c: c.token_index)
    result.achieved_density = covered / total_word_tokens
    return result
