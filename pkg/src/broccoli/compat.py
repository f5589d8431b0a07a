"""Corpus compatibility analysis.

Answers "how often does a reader re-meet the words worth teaching?" for two
kinds of reading material: plain-text books and link-following browsing
sessions simulated from a clickstream graph.  The measurements are coverage
lemma sets, per-lemma revisitation times, and corpus-level percentiles over
those times.
"""

from __future__ import annotations

import csv
import io
import math
import random
import warnings
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .textproc import Lemmatizer, TokenKind, tokenize

# Distinguished `prev` value in clickstream TSVs: entries from outside the
# graph (search engines, direct visits). They feed visit counts only.
EXTERNAL_PREV = "<external>"

# A walk that keeps moving but emits nothing for this many consecutive steps
# is abandoned; guards against cycles of zero-length pages that never stop.
_MAX_BARREN_STEPS = 100_000

CSV_HEADER = ("corpus", "alpha", "N", "revisitation_days",
              "vocab_size", "tokens", "excluded")


@dataclass(frozen=True)
class CoverageConfig:
    """Reading-model knobs shared by all revisitation computations."""

    alpha: float
    reading_speed: float = 200.0  # words per minute
    reading_hours_per_day: float = 3.0
    percentile: float = 90.0

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must be in (0, 1], got {self.alpha}")
        if self.reading_speed <= 0:
            raise ValueError("reading_speed must be positive")
        if not 0.0 < self.reading_hours_per_day <= 24.0:
            raise ValueError("reading_hours_per_day must be in (0, 24]")
        if not 0.0 < self.percentile <= 100.0:
            raise ValueError("percentile must be in (0, 100]")

    def gap_to_days(self, gap_tokens: float) -> float:
        minutes = gap_tokens / self.reading_speed
        return minutes / (self.reading_hours_per_day * 60.0)


def nearest_rank(values: Sequence[float], percentile: float) -> float:
    """The ceil(p/100 * n)-th smallest value (nearest-rank percentile)."""
    if not values:
        raise ValueError("percentile of an empty sequence")
    if not 0.0 < percentile <= 100.0:
        raise ValueError("percentile must be in (0, 100]")
    n = len(values)
    # exact rank arithmetic: float p*n/100 can land a hair off an integer
    rank = math.ceil(Fraction(str(percentile)) * n / 100)
    return sorted(values)[rank - 1]


def coverage_lemma_set(corpus: Sequence[str], alpha: float) -> list[str]:
    """Smallest frequency-ranked lemma prefix covering >= alpha of tokens.

    Ties in frequency break by lemma ascending, so the set is deterministic.
    """
    if not corpus:
        raise ValueError("empty corpus")
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must be in (0, 1], got {alpha}")
    counts = Counter(corpus)
    threshold = Fraction(str(alpha)) * len(corpus)
    chosen: list[str] = []
    covered = 0
    for lemma, count in sorted(counts.items(), key=lambda kv: (-kv[1], kv[0])):
        chosen.append(lemma)
        covered += count
        if covered >= threshold:
            break
    return chosen


def lemma_revisitation(
    corpus: Sequence[str], lemma: str, cfg: CoverageConfig
) -> float | None:
    """Percentile of the gaps between consecutive occurrences, in days.

    Returns None when the lemma occurs fewer than twice (no gaps exist).
    """
    positions = [i for i, item in enumerate(corpus) if item == lemma]
    if len(positions) < 2:
        return None
    gap_days = [cfg.gap_to_days(b - a) for a, b in zip(positions, positions[1:])]
    return nearest_rank(gap_days, cfg.percentile)


@dataclass(frozen=True)
class CorpusRevisitation:
    days: float | None  # None when no coverage lemma had two occurrences
    vocab_size: int
    excluded: int  # coverage lemmas dropped for having < 2 occurrences
    token_count: int


def corpus_revisitation(
    corpus: Sequence[str], cfg: CoverageConfig
) -> CorpusRevisitation:
    """Percentile over per-lemma revisitation times of the coverage set."""
    if not corpus:
        return CorpusRevisitation(None, 0, 0, 0)
    positions: dict[str, list[int]] = {}
    for i, item in enumerate(corpus):
        positions.setdefault(item, []).append(i)

    lemmas = coverage_lemma_set(corpus, cfg.alpha)
    per_lemma: list[float] = []
    excluded = 0
    for lemma in lemmas:
        occ = positions[lemma]
        if len(occ) < 2:
            excluded += 1
            continue
        gaps = [cfg.gap_to_days(b - a) for a, b in zip(occ, occ[1:])]
        per_lemma.append(nearest_rank(gaps, cfg.percentile))
    days = nearest_rank(per_lemma, cfg.percentile) if per_lemma else None
    return CorpusRevisitation(days, len(lemmas), excluded, len(corpus))


def lemma_stream(text: str, lemmatizer: Lemmatizer | None = None) -> list[str]:
    """Lowercased lemma sequence of the word tokens of a text.

    Punctuation and numbers are discarded; nothing else is filtered, since
    coverage sets are taken over all running words.
    """
    lemmatizer = lemmatizer or Lemmatizer.bundled()
    return [
        lemmatizer(tok.surface)
        for tok in tokenize(text)
        if tok.kind is TokenKind.WORD
    ]


# --- clickstream browsing simulation ---------------------------------------


@dataclass
class ClickstreamGraph:
    """Page graph with link-follow counts and per-page stop probabilities."""

    pages: dict[str, int]  # page -> token length
    transitions: dict[tuple[str, str], int]  # (from, to) -> click count
    visits: dict[str, int]  # page -> total visit count
    no_click: dict[str, float]  # page -> probability the walk stops here

    def __post_init__(self) -> None:
        outgoing = Counter()
        for (src, dst), count in self.transitions.items():
            if src not in self.pages or dst not in self.pages:
                raise ValueError(f"transition {src!r}->{dst!r} references an unknown page")
            if count <= 0:
                raise ValueError(f"transition {src!r}->{dst!r} has non-positive count")
            outgoing[src] += count
        for page, length in self.pages.items():
            if length < 0:
                raise ValueError(f"page {page!r} has negative token length")
            if self.visits.get(page, 0) < 0:
                raise ValueError(f"page {page!r} has negative visit count")
            prob = self.no_click.get(page)
            if prob is None:
                raise ValueError(f"page {page!r} has no no-click probability")
            if not 0.0 <= prob <= 1.0:
                raise ValueError(f"no_click[{page!r}] = {prob} outside [0, 1]")
            # a page without outgoing links must always stop the walk
            if outgoing[page] == 0 and prob != 1.0:
                raise ValueError(f"page {page!r} has no outgoing links but no_click {prob}")


def load_page_lengths(path: Path | str) -> dict[str, int]:
    """Read a `page<TAB>token_count` TSV. '#' comments and blanks allowed."""
    lengths: dict[str, int] = {}
    with open(path, encoding="utf-8") as handle:
        for n, line in enumerate(handle, start=1):
            line = line.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ValueError(f"{path}:{n}: expected page<TAB>token_count")
            page, raw = parts
            try:
                length = int(raw)
            except ValueError:
                raise ValueError(f"{path}:{n}: token count {raw!r} is not an integer") from None
            if length < 0:
                raise ValueError(f"{path}:{n}: negative token count")
            if page in lengths:
                warnings.warn(f"{path}:{n}: duplicate length for {page!r}, keeping the last")
            lengths[page] = length
    return lengths


def load_clickstream_graph(
    path: Path | str,
    lengths: Mapping[str, int],
    external_prev: str = EXTERNAL_PREV,
    no_click: Mapping[str, float] | None = None,
) -> ClickstreamGraph:
    """Read a `prev<TAB>curr<TAB>count` TSV into a ClickstreamGraph.

    Rows whose prev equals `external_prev` only feed visit counts.  Unless
    supplied explicitly, no_click[p] is the share of visits to p that did not
    continue through an outgoing link.
    """
    transitions: dict[tuple[str, str], int] = {}
    visits: Counter[str] = Counter()
    with open(path, encoding="utf-8") as handle:
        for n, line in enumerate(handle, start=1):
            line = line.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ValueError(f"{path}:{n}: expected prev<TAB>curr<TAB>count")
            prev, curr, raw = parts
            try:
                count = int(raw)
            except ValueError:
                raise ValueError(f"{path}:{n}: count {raw!r} is not an integer") from None
            if count <= 0:
                raise ValueError(f"{path}:{n}: count must be positive")
            if curr not in lengths:
                raise ValueError(f"{path}:{n}: page {curr!r} missing from the lengths table")
            visits[curr] += count
            if prev != external_prev:
                if prev not in lengths:
                    raise ValueError(f"{path}:{n}: page {prev!r} missing from the lengths table")
                key = (prev, curr)
                transitions[key] = transitions.get(key, 0) + count

    pages = dict(lengths)
    if no_click is None:
        outgoing = Counter()
        for (src, _), count in transitions.items():
            outgoing[src] += count
        no_click = {}
        for page in pages:
            out = outgoing[page]
            if out == 0:
                no_click[page] = 1.0
            else:
                # filtered dumps can report more clicks out than visits in;
                # the max() clamp keeps the probability in [0, 1]
                no_click[page] = 1.0 - out / max(visits[page], out)
    return ClickstreamGraph(pages, transitions, dict(visits), dict(no_click))


@dataclass(frozen=True)
class WalkConfig:
    session_tokens: int  # target length of one reading session
    total_tokens: int = 2_000_000  # corpus size the walk accumulates
    seed: int = 0
    restart_stall_limit: int = 100

    def __post_init__(self) -> None:
        if self.session_tokens < 1:
            raise ValueError("session_tokens must be >= 1")
        if self.total_tokens < self.session_tokens:
            raise ValueError("total_tokens must be >= session_tokens")
        if self.restart_stall_limit < 1:
            raise ValueError("restart_stall_limit must be >= 1")


@dataclass(frozen=True)
class WalkResult:
    pages: tuple[str, ...]  # pages in emission order
    tokens: tuple[str, ...]
    sessions: int
    stalls: int


def synthetic_page_tokens(page: str, length: int) -> list[str]:
    return [f"{page}/{i}" for i in range(length)]


def simulate_sessions(
    graph: ClickstreamGraph,
    cfg: WalkConfig,
    page_tokens: Mapping[str, Sequence[str]] | None = None,
) -> WalkResult:
    """Simulate reading sessions by random walk until total_tokens is reached.

    Each session starts at a page sampled proportional to visit counts,
    emitting that page's text once.  Every step either stops the walk (with
    the page's no-click probability), restarting at the start page without
    re-emitting it, or follows an outgoing link sampled proportional to click
    counts and emits the target page's text.  A session ends once it has
    emitted session_tokens tokens; too many consecutive zero-progress
    restarts abandon it as a stall.  Deterministic for a given seed.
    """
    token_of: dict[str, list[str]] = {}
    for page, length in graph.pages.items():
        if page_tokens is not None and page in page_tokens:
            token_of[page] = list(page_tokens[page])
        else:
            token_of[page] = synthetic_page_tokens(page, length)
    if all(not toks for toks in token_of.values()):
        raise ValueError("no page yields any tokens")

    start_pages = sorted(p for p in graph.pages if graph.visits.get(p, 0) > 0)
    if not start_pages:
        raise ValueError("no visit counts to sample start pages from")
    start_weights = [graph.visits[p] for p in start_pages]

    outgoing: dict[str, tuple[list[str], list[int]]] = {}
    for (src, dst), count in sorted(graph.transitions.items()):
        targets, weights = outgoing.setdefault(src, ([], []))
        targets.append(dst)
        weights.append(count)

    rng = random.Random(cfg.seed)
    pages_out: list[str] = []
    tokens_out: list[str] = []
    sessions = 0
    stalls = 0
    barren_sessions = 0

    while len(tokens_out) < cfg.total_tokens:
        start = rng.choices(start_pages, start_weights)[0]
        sessions += 1
        emitted_before = len(tokens_out)
        pages_out.append(start)
        tokens_out.extend(token_of[start])
        session_tokens = len(tokens_out) - emitted_before

        current = start
        idle_restarts = 0
        tokens_at_last_restart = session_tokens
        barren_steps = 0
        while session_tokens < cfg.session_tokens:
            if rng.random() < graph.no_click[current]:
                if session_tokens == tokens_at_last_restart:
                    idle_restarts += 1
                else:
                    idle_restarts = 0
                tokens_at_last_restart = session_tokens
                if idle_restarts >= cfg.restart_stall_limit:
                    stalls += 1
                    break
                current = start  # restart; the start page is emitted only once
                continue
            targets, weights = outgoing[current]
            current = rng.choices(targets, weights)[0]
            pages_out.append(current)
            emitted = token_of[current]
            tokens_out.extend(emitted)
            session_tokens += len(emitted)
            if emitted:
                barren_steps = 0
            else:
                barren_steps += 1
                if barren_steps >= _MAX_BARREN_STEPS:
                    stalls += 1
                    break

        if len(tokens_out) == emitted_before:
            barren_sessions += 1
            if barren_sessions >= cfg.restart_stall_limit:
                raise RuntimeError(
                    "walk cannot make token progress; "
                    "check page lengths and no-click probabilities"
                )
        else:
            barren_sessions = 0

    return WalkResult(tuple(pages_out), tuple(tokens_out), sessions, stalls)


# --- result tables ----------------------------------------------------------


@dataclass(frozen=True)
class AnalysisRow:
    corpus: str
    alpha: float
    session_tokens: int | None  # None for book corpora
    revisitation_days: float | None
    vocab_size: int
    token_count: int
    excluded: int


def format_csv(rows: Iterable[AnalysisRow]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow(
            [
                row.corpus,
                f"{row.alpha:g}",
                "" if row.session_tokens is None else row.session_tokens,
                "" if row.revisitation_days is None else f"{row.revisitation_days:.6g}",
                row.vocab_size,
                row.token_count,
                row.excluded,
            ]
        )
    return out.getvalue()


def analyze_books(
    paths: Sequence[Path | str],
    alphas: Sequence[float],
    speed: float = 200.0,
    hours: float = 3.0,
    percentile: float = 90.0,
    lemmatizer: Lemmatizer | None = None,
) -> tuple[list[AnalysisRow], list[str]]:
    """One row per (book, alpha). Unreadable files become errors, not aborts."""
    lemmatizer = lemmatizer or Lemmatizer.bundled()
    rows: list[AnalysisRow] = []
    errors: list[str] = []
    for path in paths:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as exc:
            errors.append(f"{path}: {exc}")
            continue
        corpus = lemma_stream(text, lemmatizer)
        for alpha in alphas:
            cfg = CoverageConfig(alpha, speed, hours, percentile)
            result = corpus_revisitation(corpus, cfg)
            rows.append(
                AnalysisRow(
                    Path(path).name,
                    alpha,
                    None,
                    result.days,
                    result.vocab_size,
                    result.token_count,
                    result.excluded,
                )
            )
    return rows, errors


def analyze_clickstream(
    graph: ClickstreamGraph,
    name: str,
    alphas: Sequence[float],
    walk_cfg: WalkConfig,
    speed: float = 200.0,
    hours: float = 3.0,
    percentile: float = 90.0,
    page_tokens: Mapping[str, Sequence[str]] | None = None,
) -> list[AnalysisRow]:
    """Simulate a browsing corpus once, then one row per alpha."""
    walk = simulate_sessions(graph, walk_cfg, page_tokens)
    corpus = list(walk.tokens)
    rows = []
    for alpha in alphas:
        cfg = CoverageConfig(alpha, speed, hours, percentile)
        result = corpus_revisitation(corpus, cfg)
        rows.append(
            AnalysisRow(
                name,
                alpha,
                walk_cfg.session_tokens,
                result.days,
                result.vocab_size,
                result.token_count,
                result.excluded,
            )
        )
    return rows
