"""Per-lemma memory model: recall decay, half-life boosting, exposure updates.

Recall of a lemma decays exponentially with time since the last exposure,
halving once per half-life:

    R = 2^(-t / H)

Each exposure multiplies the half-life by a boost factor that shrinks as the
memory gets stronger (larger H) or fresher (larger R):

    gamma = a * H^(-b) * c^(-R) + d
    H <- gamma * H

All durations are fractional days; timestamps are seconds since the epoch and
converted at the boundary.  The shipped constants are placeholders meant to be
tuned per deployment, not fitted values.
"""

from __future__ import annotations

from dataclasses import dataclass, field

SECONDS_PER_DAY = 86400.0


@dataclass(frozen=True)
class TutorParams:
    a: float = 1.0
    b: float = 1.0
    c: float = 2.0
    d: float = 1.0
    initial_half_life: float = 0.25  # days

    def __post_init__(self) -> None:
        if not (self.a > 0 and self.b > 0 and self.c > 0):
            raise ValueError("a, b, c must be positive")
        # d >= 1 keeps gamma >= 1, so exposures never shrink a half-life
        if not self.d >= 1:
            raise ValueError("d must be >= 1")
        if not self.initial_half_life > 0:
            raise ValueError("initial_half_life must be positive")


@dataclass
class LemmaMemory:
    lemma: str
    half_life: float        # H, days
    last_exposure: float    # seconds since epoch
    exposure_count: int = 1


@dataclass
class LearnerState:
    learner_id: str
    params: TutorParams = field(default_factory=TutorParams)
    memories: dict[str, LemmaMemory] = field(default_factory=dict)


def elapsed_days(mem: LemmaMemory, now: float) -> float:
    t = (now - mem.last_exposure) / SECONDS_PER_DAY
    if t < 0:
        raise ValueError(
            f"timestamp regression for {mem.lemma!r}: now precedes last exposure"
        )
    return t


def recall_probability(mem: LemmaMemory, now: float) -> float:
    """R = 2^(-t/H) with t measured in days since the last exposure."""
    return 2.0 ** (-elapsed_days(mem, now) / mem.half_life)


def boost_factor(half_life: float, recall: float, params: TutorParams) -> float:
    """gamma = a * H^(-b) * c^(-R) + d, decreasing in both H and R."""
    if half_life <= 0:
        raise ValueError("half_life must be positive")
    return params.a * half_life ** (-params.b) * params.c ** (-recall) + params.d


def apply_exposure(state: LearnerState, lemma: str, now: float) -> LearnerState:
    """Record one successful exposure of lemma at time now.

    First exposure seeds the memory at initial_half_life; later ones grow the
    half-life by the boost factor.  Mutates state in place and returns it.
    """
    mem = state.memories.get(lemma)
    if mem is None:
        state.memories[lemma] = LemmaMemory(
            lemma=lemma,
            half_life=state.params.initial_half_life,
            last_exposure=now,
        )
        return state
    r = recall_probability(mem, now)  # raises on time regression
    mem.half_life *= boost_factor(mem.half_life, r, state.params)
    mem.last_exposure = now
    mem.exposure_count += 1
    return state


def tutor_scores(
    state: LearnerState, lemmas: set[str], now: float
) -> dict[str, tuple[float, float]]:
    """Map each lemma to (R, gamma) under the learner's current memory.

    Unseen lemmas score R = 0 with the boost a fresh memory would get, which
    leaves them maximal room in the downstream priority.
    """
    unseen_gamma = boost_factor(state.params.initial_half_life, 0.0, state.params)
    scores: dict[str, tuple[float, float]] = {}
    for lemma in lemmas:
        mem = state.memories.get(lemma)
        if mem is None:
            scores[lemma] = (0.0, unseen_gamma)
        else:
            r = recall_probability(mem, now)
            scores[lemma] = (r, boost_factor(mem.half_life, r, state.params))
    return scores
