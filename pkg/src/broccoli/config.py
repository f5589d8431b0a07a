"""Service configuration: key=value file with BROCCOLI_* env overrides.

Example file:

    host = 127.0.0.1
    port = 8000
    state_dir = ./state
    dictionary = dict.tsv
    lm_model = counts.tsv
    density = 0.1
    tutor_d = 1.0

Every key can be overridden by an environment variable named BROCCOLI_<KEY>
(upper-cased), e.g. BROCCOLI_PORT=9001.  Unknown keys are rejected so typos
fail loudly.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, fields
from pathlib import Path

from .memory import TutorParams
from .ngram import ConstantScorer, ContextScorer, NGramModel
from .selection import SelectionConfig
from .translation import DictionaryProvider, load_dictionary

ENV_PREFIX = "BROCCOLI_"


@dataclass
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8000
    state_dir: Path = Path("state")
    dictionary: Path | None = None
    lm_model: Path | None = None
    constant_g: float = 0.2
    density: float = 0.1
    max_lemmas: int | None = None
    min_lemma_len: int = 3
    tutor_a: float = 1.0
    tutor_b: float = 1.0
    tutor_c: float = 2.0
    tutor_d: float = 1.0
    initial_half_life: float = 0.25
    reveal_counts_as_exposure: bool = False
    snapshot_every: int | None = 500

    def tutor_params(self) -> TutorParams:
        return TutorParams(
            a=self.tutor_a,
            b=self.tutor_b,
            c=self.tutor_c,
            d=self.tutor_d,
            initial_half_life=self.initial_half_life,
        )

    def selection_config(self, density: float | None = None) -> SelectionConfig:
        return SelectionConfig(
            density=self.density if density is None else density,
            max_lemmas=self.max_lemmas,
        )

    def build_scorer(self) -> ContextScorer:
        if self.lm_model is not None:
            if not self.lm_model.is_file():
                raise ValueError(f"language model file not found: {self.lm_model}")
            return NGramModel.load(self.lm_model)
        return ConstantScorer(self.constant_g)

    def build_provider(self) -> DictionaryProvider:
        if self.dictionary is not None:
            if not self.dictionary.is_file():
                raise ValueError(f"dictionary file not found: {self.dictionary}")
            return load_dictionary(self.dictionary)
        return DictionaryProvider({})

    def validate(self) -> "ServiceConfig":
        # constructing these runs their own range checks
        self.tutor_params()
        self.selection_config()
        ConstantScorer(self.constant_g)
        if not 1 <= self.port <= 65535:
            raise ValueError(f"port out of range: {self.port}")
        if self.min_lemma_len < 1:
            raise ValueError("min_lemma_len must be >= 1")
        if self.snapshot_every is not None and self.snapshot_every < 1:
            raise ValueError("snapshot_every must be >= 1 or unset")
        return self


_OPTIONAL_INT = {"max_lemmas", "snapshot_every"}
_OPTIONAL_PATH = {"dictionary", "lm_model"}
_BOOL_TRUE = {"1", "true", "yes", "on"}
_BOOL_FALSE = {"0", "false", "no", "off"}


def _parse_value(name: str, kind: type, raw: str, source: str):
    raw = raw.strip()
    if name in _OPTIONAL_INT or name in _OPTIONAL_PATH:
        if raw == "":
            return None
        return int(raw) if name in _OPTIONAL_INT else Path(raw)
    if kind is bool:
        lowered = raw.lower()
        if lowered in _BOOL_TRUE:
            return True
        if lowered in _BOOL_FALSE:
            return False
        raise ValueError(f"{source}: expected a boolean for {name}, got {raw!r}")
    try:
        if kind is int:
            return int(raw)
        if kind is float:
            return float(raw)
    except ValueError:
        raise ValueError(f"{source}: expected a number for {name}, got {raw!r}") from None
    if kind is Path:
        return Path(raw)
    return raw


def load_config(path: Path | str | None = None, env: dict | None = None) -> ServiceConfig:
    """Build a config from defaults, then a file, then the environment."""
    env = os.environ if env is None else env
    by_name = {f.name: f for f in fields(ServiceConfig)}
    kinds: dict[str, type] = {
        "host": str, "port": int, "state_dir": Path, "dictionary": Path,
        "lm_model": Path, "constant_g": float, "density": float,
        "max_lemmas": int, "min_lemma_len": int, "tutor_a": float,
        "tutor_b": float, "tutor_c": float, "tutor_d": float,
        "initial_half_life": float, "reveal_counts_as_exposure": bool,
        "snapshot_every": int,
    }
    values: dict[str, object] = {}

    if path is not None:
        path = Path(path)
        if not path.is_file():
            raise ValueError(f"config file not found: {path}")
        for n, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            key, sep, value = stripped.partition("=")
            if not sep:
                raise ValueError(f"{path}:{n}: expected key = value")
            key = key.strip()
            if key not in by_name:
                raise ValueError(f"{path}:{n}: unknown key {key!r}")
            values[key] = _parse_value(key, kinds[key], value, f"{path}:{n}")

    for key in by_name:
        raw = env.get(ENV_PREFIX + key.upper())
        if raw is not None:
            values[key] = _parse_value(key, kinds[key], raw, f"${ENV_PREFIX}{key.upper()}")

    return ServiceConfig(**values).validate()
