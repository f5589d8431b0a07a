"""Durable learner state: append-only event log plus atomic snapshots.

Layout: one directory per learner holding `events.log` (one JSON record per
line) and `snapshot.json`.  Events are fsynced before acknowledgment;
snapshots are written to a temp file and renamed into place.  Recovery loads
the snapshot and replays the log tail, which must reproduce the pre-crash
state bit for bit (floats round-trip exactly through JSON repr).

A torn trailing record (crash mid-write) is truncated away with a warning.
All mutations for one learner are serialized through a per-learner lock.
"""

from __future__ import annotations

import json
import logging
import os
import re
import threading
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from .document import canonical_json
from .memory import (
    LearnerState,
    LemmaMemory,
    TutorParams,
    apply_exposure,
    recall_probability,
)

log = logging.getLogger(__name__)

_LEARNER_ID_RE = re.compile(r"^[A-Za-z0-9][A-Za-z0-9._-]{0,63}$")

SNAPSHOT_VERSION = 1


class EventKind(str, Enum):
    SEGMENT_READ = "segment_read"
    REVEAL_CLICK = "reveal_click"


class TimestampRegression(ValueError):
    """An event batch goes backwards in time for this learner."""


@dataclass(frozen=True)
class ExposureEvent:
    learner_id: str
    doc_id: str
    kind: EventKind
    lemma: str
    span_id: str
    timestamp: float

    def to_payload(self) -> dict:
        return {
            "learner_id": self.learner_id,
            "doc_id": self.doc_id,
            "kind": self.kind.value,
            "lemma": self.lemma,
            "span_id": self.span_id,
            "timestamp": self.timestamp,
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "ExposureEvent":
        try:
            return cls(
                learner_id=payload["learner_id"],
                doc_id=payload["doc_id"],
                kind=EventKind(payload["kind"]),
                lemma=payload["lemma"],
                span_id=payload["span_id"],
                timestamp=float(payload["timestamp"]),
            )
        except (KeyError, ValueError, TypeError) as exc:
            raise ValueError(f"malformed event: {exc}") from exc


def validate_learner_id(learner_id: str) -> str:
    if not _LEARNER_ID_RE.match(learner_id):
        raise ValueError(f"invalid learner id {learner_id!r}")
    return learner_id


@dataclass
class _Learner:
    state: LearnerState
    applied_events: int          # events folded into state (snapshot + replayed)
    last_timestamp: float | None
    lock: threading.Lock


class LearnerStore:
    def __init__(
        self,
        root: Path | str,
        params: TutorParams | None = None,
        reveal_counts_as_exposure: bool = False,
        snapshot_every: int | None = None,
    ) -> None:
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.params = params or TutorParams()
        self.reveal_counts_as_exposure = reveal_counts_as_exposure
        self.snapshot_every = snapshot_every
        self._learners: dict[str, _Learner] = {}
        self._registry_lock = threading.Lock()

    # -- paths --------------------------------------------------------------

    def _dir(self, learner_id: str) -> Path:
        return self.root / learner_id

    def _log_path(self, learner_id: str) -> Path:
        return self._dir(learner_id) / "events.log"

    def _snapshot_path(self, learner_id: str) -> Path:
        return self._dir(learner_id) / "snapshot.json"

    # -- lifecycle ----------------------------------------------------------

    def learner_exists(self, learner_id: str) -> bool:
        validate_learner_id(learner_id)
        with self._registry_lock:
            if learner_id in self._learners:
                return True
        return self._dir(learner_id).is_dir()

    def _entry(self, learner_id: str) -> _Learner:
        validate_learner_id(learner_id)
        with self._registry_lock:
            entry = self._learners.get(learner_id)
            if entry is None:
                entry = self._recover(learner_id)
                self._learners[learner_id] = entry
            return entry

    def _fold(self, state: LearnerState, event: ExposureEvent) -> None:
        if event.kind is EventKind.SEGMENT_READ or (
            event.kind is EventKind.REVEAL_CLICK and self.reveal_counts_as_exposure
        ):
            apply_exposure(state, event.lemma, event.timestamp)

    def _recover(self, learner_id: str) -> _Learner:
        state = LearnerState(learner_id, params=self.params)
        applied = 0
        last_ts: float | None = None

        snap_path = self._snapshot_path(learner_id)
        if snap_path.exists():
            payload = json.loads(snap_path.read_text(encoding="utf-8"))
            if payload.get("version") != SNAPSHOT_VERSION:
                raise ValueError(f"{snap_path}: unsupported snapshot version")
            applied = payload["applied_events"]
            last_ts = payload["last_timestamp"]
            for lemma, mem in payload["memories"].items():
                state.memories[lemma] = LemmaMemory(
                    lemma=lemma,
                    half_life=mem["half_life"],
                    last_exposure=mem["last_exposure"],
                    exposure_count=mem["exposure_count"],
                )

        log_path = self._log_path(learner_id)
        if log_path.exists():
            applied, last_ts = self._replay_log(log_path, state, applied, last_ts)
        return _Learner(state, applied, last_ts, threading.Lock())

    def _replay_log(
        self,
        log_path: Path,
        state: LearnerState,
        skip: int,
        last_ts: float | None,
    ) -> tuple[int, float | None]:
        """Fold log records after the first `skip` into state.

        On the first undecodable record the file is truncated to the last
        valid boundary; a crash can only tear the tail.
        """
        applied = skip
        valid_bytes = 0
        seen = 0
        with log_path.open("rb") as fh:
            for raw in fh:
                if not raw.endswith(b"\n"):
                    log.warning("%s: torn trailing record, truncating", log_path)
                    break
                try:
                    event = ExposureEvent.from_payload(json.loads(raw.decode("utf-8")))
                except ValueError:
                    log.warning("%s: corrupt record %d, truncating", log_path, seen + 1)
                    break
                valid_bytes += len(raw)
                seen += 1
                if seen > skip:
                    self._fold(state, event)
                    applied = seen
                    last_ts = event.timestamp
            else:
                return applied, last_ts
        # loop broke: drop everything at and after the bad record
        with log_path.open("r+b") as fh:
            fh.truncate(valid_bytes)
            fh.flush()
            os.fsync(fh.fileno())
        return applied, last_ts

    # -- reads ----------------------------------------------------------------

    def get_state(self, learner_id: str) -> LearnerState:
        """Live state; auto-creates an empty learner."""
        return self._entry(learner_id).state

    def memory_summary(self, learner_id: str, now: float) -> dict:
        """Stable JSON-ready snapshot of per-lemma memory at `now`."""
        entry = self._entry(learner_id)
        with entry.lock:
            lemmas = {}
            for lemma, mem in sorted(entry.state.memories.items()):
                elapsed_ok = now >= mem.last_exposure
                lemmas[lemma] = {
                    "half_life": mem.half_life,
                    "last_exposure": mem.last_exposure,
                    "exposure_count": mem.exposure_count,
                    "recall": recall_probability(mem, now) if elapsed_ok else None,
                }
            return {"learner_id": learner_id, "lemmas": lemmas}

    # -- writes ---------------------------------------------------------------

    def append_events(self, learner_id: str, events: list[ExposureEvent]) -> int:
        """Durably append a batch, then fold it.  All-or-nothing.

        The batch must be internally ordered and not regress behind the log;
        violations raise TimestampRegression before anything is written.
        """
        if not events:
            return 0
        entry = self._entry(learner_id)
        with entry.lock:
            previous = entry.last_timestamp
            for event in events:
                if previous is not None and event.timestamp < previous:
                    raise TimestampRegression(
                        f"event at {event.timestamp} precedes {previous} "
                        f"for learner {learner_id!r}"
                    )
                previous = event.timestamp

            self._dir(learner_id).mkdir(parents=True, exist_ok=True)
            lines = "".join(
                canonical_json(event.to_payload()) + "\n" for event in events
            )
            with self._log_path(learner_id).open("ab") as fh:
                fh.write(lines.encode("utf-8"))
                fh.flush()
                os.fsync(fh.fileno())

            for event in events:
                self._fold(entry.state, event)
            entry.applied_events += len(events)
            entry.last_timestamp = previous

            if self.snapshot_every is not None:
                before = (entry.applied_events - len(events)) // self.snapshot_every
                if entry.applied_events // self.snapshot_every != before:
                    self._write_snapshot(learner_id, entry)
        return len(events)

    def snapshot(self, learner_id: str) -> None:
        entry = self._entry(learner_id)
        with entry.lock:
            self._write_snapshot(learner_id, entry)

    def snapshot_all(self) -> None:
        with self._registry_lock:
            ids = list(self._learners)
        for learner_id in ids:
            self.snapshot(learner_id)

    def _write_snapshot(self, learner_id: str, entry: _Learner) -> None:
        payload = {
            "version": SNAPSHOT_VERSION,
            "learner_id": learner_id,
            "applied_events": entry.applied_events,
            "last_timestamp": entry.last_timestamp,
            "memories": {
                lemma: {
                    "half_life": mem.half_life,
                    "last_exposure": mem.last_exposure,
                    "exposure_count": mem.exposure_count,
                }
                for lemma, mem in sorted(entry.state.memories.items())
            },
        }
        directory = self._dir(learner_id)
        directory.mkdir(parents=True, exist_ok=True)
        tmp = directory / "snapshot.json.tmp"
        with tmp.open("w", encoding="utf-8") as fh:
            fh.write(canonical_json(payload))
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, self._snapshot_path(learner_id))
