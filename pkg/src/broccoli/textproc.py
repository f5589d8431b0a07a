"""Tokenization, rule-based lemmatization, and candidate filtering.

Everything here is pure and deterministic: the same text always yields the
same tokens, lemmas, and candidate set. Token char spans are byte offsets
into the UTF-8 encoding of the source text, so documents can be rebuilt
byte-exactly around translated spans.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable


class TokenKind(str, Enum):
    WORD = "word"
    PUNCTUATION = "punctuation"
    NUMBER = "number"


@dataclass(frozen=True)
class Token:
    surface: str
    kind: TokenKind
    start: int  # byte offset into the UTF-8 source
    end: int    # exclusive byte offset
    sentence_index: int

    @property
    def char_span(self) -> tuple[int, int]:
        return (self.start, self.end)


# Longest-match alternation; every non-whitespace character lands in exactly
# one branch (punct catches the single-char remainder).
_TOKEN_RE = re.compile(
    r"(?P<number>\d+(?:[.,]\d+)*)"
    r"|(?P<word>[^\W\d_]+(?:['’][^\W\d_]+)*)"
    r"|(?P<punct>\S)",
)

_SENTENCE_END = frozenset(".!?")


def tokenize(text: str) -> list[Token]:
    """Split text into word / number / punctuation tokens.

    Sentence boundaries sit at '.', '!' or '?' followed by whitespace and a
    capital letter, or at end of text. Abbreviations are not special-cased.
    """
    tokens: list[Token] = []
    sentence_index = 0
    byte_pos = 0
    char_pos = 0
    n = len(text)
    for m in _TOKEN_RE.finditer(text):
        surface = m.group()
        if m.lastgroup == "word":
            kind = TokenKind.WORD
        elif m.lastgroup == "number":
            kind = TokenKind.NUMBER
        else:
            kind = TokenKind.PUNCTUATION
        start = byte_pos + len(text[char_pos : m.start()].encode("utf-8"))
        end = start + len(surface.encode("utf-8"))
        byte_pos, char_pos = end, m.end()
        tokens.append(Token(surface, kind, start, end, sentence_index))
        if kind is TokenKind.PUNCTUATION and surface in _SENTENCE_END:
            j = m.end()
            saw_ws = False
            while j < n and text[j].isspace():
                saw_ws = True
                j += 1
            if j >= n or (saw_ws and text[j].isupper()):
                sentence_index += 1
    return tokens


def detokenize(text: str, tokens: list[Token]) -> str:
    """Rebuild the source from token surfaces plus inter-token whitespace.

    Raises ValueError if the tokens do not cover every non-whitespace byte,
    so it doubles as the round-trip check used in tests.
    """
    raw = text.encode("utf-8")
    out = bytearray()
    pos = 0
    for tok in tokens:
        gap = raw[pos : tok.start]
        # bytes.strip only knows ASCII whitespace; gaps sit on codepoint
        # boundaries, so decode before checking.
        if gap.decode("utf-8").strip():
            raise ValueError(f"non-whitespace bytes between tokens at {pos}..{tok.start}")
        out += gap
        out += tok.surface.encode("utf-8")
        pos = tok.end
    tail = raw[pos:]
    if tail.decode("utf-8").strip():
        raise ValueError(f"non-whitespace bytes after last token at {pos}")
    out += tail
    return out.decode("utf-8")


# ---------------------------------------------------------------------------
# Lemmatization
# ---------------------------------------------------------------------------

_DATA = resources.files(__package__) / "data"


def _read_lines(source) -> Iterable[str]:
    for raw in source.read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if line and not line.startswith("#"):
            yield line


def load_exception_table(path: Path | str) -> dict[str, str]:
    """Read a surface<TAB>lemma table; '#' comment lines ignored."""
    table: dict[str, str] = {}
    source = Path(path) if not hasattr(path, "read_text") else path
    for lineno, line in enumerate(_read_lines(source), start=1):
        parts = line.split("\t")
        if len(parts) != 2:
            raise ValueError(f"{path}: line {lineno}: expected 2 tab-separated fields")
        table[parts[0].lower()] = parts[1].lower()
    return table


def load_wordlist(path: Path | str) -> frozenset[str]:
    """Read a one-word-per-line list; '#' comment lines ignored."""
    source = Path(path) if not hasattr(path, "read_text") else path
    return frozenset(w.lower() for w in _read_lines(source))


# Consonants that un-double after -ing/-ed stripping (running -> run).
# 'l' stays doubled (telling -> tell) and so do s/f/z (passing, stuffing).
_UNDOUBLE = frozenset("bdgmnprt")


class Lemmatizer:
    """Rule-based English lemmatizer: exception table first, then ordered
    suffix rules (-ies, -es, -s, -ing, -ed) with an e-restore list, applied
    to a fixed point so the mapping is idempotent.

    Built for consistent lemma keys across inflections, not linguistic
    perfection; irregulars live in the bundled exception table.
    """

    def __init__(self, exceptions: dict[str, str], e_restore: frozenset[str]):
        self.exceptions = dict(exceptions)
        self.e_restore = frozenset(e_restore)

    @classmethod
    def bundled(cls) -> "Lemmatizer":
        return _bundled_lemmatizer()

    def __call__(self, surface: str) -> str:
        lemma = surface.lower()
        for _ in range(16):  # rules strictly shrink; 16 bounds any real word
            step = self._step(lemma)
            if step == lemma:
                return lemma
            lemma = step
        return lemma

    def _step(self, w: str) -> str:
        exc = self.exceptions.get(w)
        if exc is not None:
            return exc
        if len(w) > 2 and (w.endswith("'s") or w.endswith("’s")):
            return w[:-2]
        if len(w) > 1 and w[-1] in "'’":
            return w[:-1]
        if w.endswith("ies") and len(w) >= 5:
            return w[:-3] + "y"
        if w.endswith("ied") and len(w) >= 5:
            return w[:-3] + "y"
        if w.endswith("es") and w[:-2].endswith(("ss", "x", "zz", "ch", "sh")):
            return self._finish(w[:-2])
        if w.endswith("s") and len(w) >= 4 and not w.endswith(("ss", "us", "is")):
            return w[:-1]
        if w.endswith("ing") and len(w) >= 6:
            return self._finish(w[:-3])
        if w.endswith("ed") and len(w) >= 4 and not w.endswith("eed"):
            return self._finish(w[:-2])
        return w

    def _finish(self, stem: str) -> str:
        if stem in self.e_restore:
            return stem + "e"
        # regular silent-e families: raise/organize/close, -ate, compute
        if len(stem) >= 3 and stem.endswith(("is", "iz", "os")):
            return stem + "e"
        if len(stem) >= 7 and stem.endswith("at") and not stem.endswith(("eat", "oat")):
            return stem + "e"
        if len(stem) >= 6 and stem.endswith("ut"):
            return stem + "e"
        if len(stem) >= 3 and stem[-1] == stem[-2] and stem[-1] in _UNDOUBLE:
            return stem[:-1]
        return stem


@lru_cache(maxsize=1)
def _bundled_lemmatizer() -> Lemmatizer:
    return Lemmatizer(
        exceptions=load_exception_table(_DATA / "lemma_exceptions.tsv"),
        e_restore=load_wordlist(_DATA / "e_restore.txt"),
    )


@lru_cache(maxsize=1)
def bundled_stoplist() -> frozenset[str]:
    return load_wordlist(_DATA / "stopwords_en.txt")


@lru_cache(maxsize=1)
def bundled_common_words() -> frozenset[str]:
    return load_wordlist(_DATA / "common_words_en.txt")


def lemmatize(surface: str) -> str:
    """Lemmatize one word surface with the bundled tables."""
    return Lemmatizer.bundled()(surface)


# ---------------------------------------------------------------------------
# Candidate extraction
# ---------------------------------------------------------------------------


class ExclusionReason(str, Enum):
    PUNCTUATION = "punctuation"
    NUMBER = "number"
    PROPER_NOUN = "proper_noun"
    STOPWORD = "stopword"
    TOO_SHORT = "too_short"


@dataclass
class CandidateOccurrence:
    token_index: int
    lemma: str
    sentence_index: int
    # scores filled by the pipeline
    R: float | None = None
    G: float | None = None
    gamma: float | None = None
    P: float | None = None
    priority: float | None = None


@dataclass(frozen=True)
class ExcludedToken:
    token_index: int
    reason: ExclusionReason


@dataclass
class ExtractionResult:
    candidates: list[CandidateOccurrence] = field(default_factory=list)
    excluded: list[ExcludedToken] = field(default_factory=list)


def extract_candidates(
    tokens: list[Token],
    stoplist: frozenset[str],
    min_len: int = 3,
    lemmatizer: Lemmatizer | None = None,
    known_words: frozenset[str] | None = None,
) -> ExtractionResult:
    """Filter tokens down to translation candidates.

    Exclusion rules, applied in order so every excluded token has exactly
    one reason: non-word kind; proper noun (capitalized off sentence start,
    or sentence-initial capital whose lowercase form appears neither later
    in the document nor in the known-word lexicon); stoplist lemma; lemma
    shorter than min_len.
    """
    lemmatizer = lemmatizer or Lemmatizer.bundled()
    if known_words is None:
        known_words = bundled_common_words()
    lexicon = stoplist | known_words

    lowercase_surfaces = {
        t.surface
        for t in tokens
        if t.kind is TokenKind.WORD and t.surface == t.surface.lower()
    }

    result = ExtractionResult()
    sentences_started: set[int] = set()
    for i, tok in enumerate(tokens):
        if tok.kind is TokenKind.PUNCTUATION:
            result.excluded.append(ExcludedToken(i, ExclusionReason.PUNCTUATION))
            continue
        if tok.kind is TokenKind.NUMBER:
            result.excluded.append(ExcludedToken(i, ExclusionReason.NUMBER))
            continue
        sentence_initial = tok.sentence_index not in sentences_started
        sentences_started.add(tok.sentence_index)
        if tok.surface[0].isupper():
            lower = tok.surface.lower()
            rescued = sentence_initial and (
                lower in lowercase_surfaces or lower in lexicon
            )
            if not rescued:
                result.excluded.append(ExcludedToken(i, ExclusionReason.PROPER_NOUN))
                continue
        lemma = lemmatizer(tok.surface)
        if lemma in stoplist:
            result.excluded.append(ExcludedToken(i, ExclusionReason.STOPWORD))
            continue
        if len(lemma) < min_len:
            result.excluded.append(ExcludedToken(i, ExclusionReason.TOO_SHORT))
            continue
        result.candidates.append(CandidateOccurrence(i, lemma, tok.sentence_index))
    return result
