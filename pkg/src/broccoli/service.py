"""HTTP annotation service: annotate text, ingest reader events, report state.

The annotate endpoint returns the document's canonical JSON bytes unchanged,
so the HTTP body is byte-identical to the CLI output for the same inputs.
Reading, not annotating, is what counts as an exposure: memory changes only
through the events endpoint.
"""

from __future__ import annotations

import time
from contextlib import asynccontextmanager

from fastapi import FastAPI, HTTPException, Response
from pydantic import BaseModel

from . import __version__
from .config import ServiceConfig
from .pipeline import annotate
from .store import (
    ExposureEvent,
    LearnerStore,
    TimestampRegression,
    validate_learner_id,
)
from .translation import ProviderUnavailable


class AnnotateRequest(BaseModel):
    learner_id: str
    text: str
    density: float | None = None
    # reserved selector for multi-dictionary deployments; single-provider
    # servers accept and ignore it
    target_profile: str | None = None
    # explicit clock for reproducible annotation; defaults to server time
    now: float | None = None


class EventsRequest(BaseModel):
    events: list[dict]


def create_app(config: ServiceConfig | None = None) -> FastAPI:
    config = (config or ServiceConfig()).validate()
    store = LearnerStore(
        config.state_dir,
        params=config.tutor_params(),
        reveal_counts_as_exposure=config.reveal_counts_as_exposure,
        snapshot_every=config.snapshot_every,
    )
    scorer = config.build_scorer()
    provider = config.build_provider()

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        yield
        store.snapshot_all()

    app = FastAPI(title="annotation service", version=__version__, lifespan=lifespan)
    app.state.store = store
    app.state.config = config

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok"}

    @app.post("/v1/annotate")
    def annotate_endpoint(req: AnnotateRequest) -> Response:
        try:
            validate_learner_id(req.learner_id)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        density = config.density if req.density is None else req.density
        if not 0.0 <= density <= 1.0:
            raise HTTPException(status_code=400, detail="density must be in [0, 1]")
        if not req.text.strip():
            raise HTTPException(status_code=422, detail="text is empty")

        state = store.get_state(req.learner_id)
        now = time.time() if req.now is None else req.now
        try:
            doc = annotate(
                req.text,
                state,
                scorer,
                provider,
                config.selection_config(density),
                now=now,
                min_lemma_len=config.min_lemma_len,
            )
        except ProviderUnavailable as exc:
            raise HTTPException(status_code=503, detail=str(exc))
        return Response(content=doc.to_json(), media_type="application/json")

    @app.post("/v1/events")
    def events_endpoint(req: EventsRequest) -> dict:
        if not req.events:
            return {"accepted": 0}
        try:
            events = [ExposureEvent.from_payload(e) for e in req.events]
            learner_ids = {e.learner_id for e in events}
            if len(learner_ids) != 1:
                raise ValueError("batch must target a single learner")
            learner_id = validate_learner_id(events[0].learner_id)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        if not store.learner_exists(learner_id):
            raise HTTPException(status_code=404, detail=f"unknown learner {learner_id!r}")
        try:
            accepted = store.append_events(learner_id, events)
        except TimestampRegression as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        return {"accepted": accepted}

    @app.get("/v1/learner/{learner_id}/state")
    def learner_state(learner_id: str, now: float | None = None) -> dict:
        try:
            validate_learner_id(learner_id)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        if not store.learner_exists(learner_id):
            raise HTTPException(status_code=404, detail=f"unknown learner {learner_id!r}")
        return store.memory_summary(learner_id, time.time() if now is None else now)

    return app
