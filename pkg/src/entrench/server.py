"""HTTP API over a directory of profiles.

One process owns the profile files.  Reads serve immutable in-memory
snapshots; each profile's mutations are serialized by a non-blocking
lock, so a second concurrent judgment gets 409 instead of queueing.
Formulas cross the wire as canonical grammar text and ranks as 3-decimal
strings, exactly as they appear in the profile files.
"""

from __future__ import annotations

import threading
from functools import reduce
from pathlib import Path

from fastapi import Depends, FastAPI, HTTPException, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import __version__
from .agent import (
    PROFILE_FILE,
    AgentProfile,
    Document,
    ProfileError,
    UNJUDGED,
    dequeue,
    enqueue,
    filter_document,
    learn,
    load_profile,
    load_queue,
    save_profile,
    save_queue,
)
from .classifier import ClassifierError
from .logic import ParseError, render
from .ranking import RankingError, format_rank

POLL_MS = 2000

_JUDGMENTS = {
    "R": True, "relevant": True, "true": True,
    "N": False, "nonrelevant": False, "false": False,
}


class FeedbackIn(BaseModel):
    judgment: str
    doc_id: str | None = None
    keywords: list[str] | None = None


class FilterIn(BaseModel):
    keywords: list[str] | None = None
    formula: str | None = None


class QueueDocIn(BaseModel):
    id: str
    keywords: list[str]


class QueueIn(BaseModel):
    documents: list[QueueDocIn]


class _Store:
    """Profiles and queues under one root directory."""

    def __init__(self, root: Path):
        self.root = Path(root)
        self.profiles: dict[str, AgentProfile] = {}
        self.queues: dict[str, list[Document]] = {}
        self.locks: dict[str, threading.Lock] = {}
        self._registry = threading.Lock()

    def ids(self) -> list[str]:
        if not self.root.is_dir():
            return []
        return sorted(
            p.name for p in self.root.iterdir() if (p / PROFILE_FILE).is_file()
        )

    def get(self, profile_id: str) -> AgentProfile:
        if profile_id not in self.profiles:
            directory = self.root / profile_id
            if not (directory / PROFILE_FILE).is_file():
                raise HTTPException(404, f"unknown profile {profile_id!r}")
            with self._registry:
                if profile_id not in self.profiles:
                    self.profiles[profile_id] = load_profile(directory)
                    self.queues[profile_id] = load_queue(directory)
                    self.locks[profile_id] = threading.Lock()
        return self.profiles[profile_id]

    def queue(self, profile_id: str) -> list[Document]:
        self.get(profile_id)
        return self.queues[profile_id]

    def lock(self, profile_id: str) -> threading.Lock:
        self.get(profile_id)
        return self.locks[profile_id]

    def put(self, profile_id: str, profile: AgentProfile,
            queue: list[Document]) -> None:
        directory = self.root / profile_id
        save_profile(profile, directory)
        save_queue(queue, directory)
        self.profiles[profile_id] = profile
        self.queues[profile_id] = queue


def _belief_snapshot(profile: AgentProfile) -> dict:
    ranking = profile.ranking
    cut = set(ranking.consistent_cut())
    last: dict[str, dict] = {}
    for report in profile.history:
        for change in report.changes:
            last[render(change.sentence)] = {
                "before": format_rank(change.before),
                "after": format_rank(change.after),
            }
    return {
        "beliefs": [
            {
                "formula": render(f),
                "rank": format_rank(rank),
                "protected": ranking.is_protected(f),
                "in_cut": f in cut,
                "last_change": last.get(render(f)),
            }
            for f, rank in ranking.items()
        ],
        "incons": format_rank(ranking.inconsistency_degree()),
        "cut_size": len(cut),
        "mode": profile.mode,
    }


def create_app(root: Path, *, token: str | None = None,
               debug: bool = False) -> FastAPI:
    store = _Store(root)
    app = FastAPI(title="entrench", version=__version__)
    app.state.store = store
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"],
        allow_headers=["*"],
    )

    def authorized(request: Request) -> None:
        if token is None:
            return
        header = request.headers.get("authorization", "")
        if header != f"Bearer {token}":
            raise HTTPException(401, "missing or wrong bearer token")

    guard = Depends(authorized)

    @app.exception_handler(RequestValidationError)
    async def malformed_body(request, exc):
        # The interface contract promises 400 for malformed payloads.
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.exception_handler(ParseError)
    @app.exception_handler(ProfileError)
    @app.exception_handler(ClassifierError)
    @app.exception_handler(RankingError)
    async def bad_domain_input(request, exc):
        # Covers protected-knowledge conflicts too: the judgment is
        # unprocessable against this profile, not a server fault.
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.get("/config", dependencies=[guard])
    def config():
        return {
            "profiles": store.ids(),
            "poll_ms": POLL_MS,
            "version": __version__,
        }

    @app.get("/profiles/{profile_id}/beliefs", dependencies=[guard])
    def beliefs(profile_id: str):
        return _belief_snapshot(store.get(profile_id))

    @app.get("/profiles/{profile_id}/queue", dependencies=[guard])
    def queue(profile_id: str):
        return {
            "documents": [
                {"id": d.doc_id, "keywords": list(d.keywords)}
                for d in store.queue(profile_id)
            ]
        }

    @app.post("/profiles/{profile_id}/queue", dependencies=[guard])
    def extend_queue(profile_id: str, body: QueueIn):
        incoming = [
            Document(d.id, tuple(d.keywords), UNJUDGED) for d in body.documents
        ]
        merged = enqueue(store.queue(profile_id), incoming)
        store.put(profile_id, store.get(profile_id), merged)
        return {"pending": len(merged)}

    @app.get("/profiles/{profile_id}/history", dependencies=[guard])
    def history(profile_id: str):
        profile = store.get(profile_id)
        return {"reports": [r.to_dict() for r in profile.history]}

    @app.post("/profiles/{profile_id}/filter", dependencies=[guard])
    def run_filter(profile_id: str, body: FilterIn):
        profile = store.get(profile_id)
        if body.formula is not None:
            verdict = filter_document(profile, body.formula)
        elif body.keywords:
            verdict = filter_document(profile, Document("query", tuple(body.keywords)))
        else:
            raise HTTPException(400, "provide keywords or a formula")
        return verdict.to_dict()

    @app.post("/profiles/{profile_id}/feedback", dependencies=[guard])
    def feedback(profile_id: str, body: FeedbackIn):
        if body.judgment not in _JUDGMENTS:
            raise HTTPException(
                400, f"judgment must be one of {sorted(_JUDGMENTS)}"
            )
        lock = store.lock(profile_id)
        if not lock.acquire(blocking=False):
            raise HTTPException(409, "another judgment is being folded in")
        try:
            before = store.get(profile_id)
            pending = store.queue(profile_id)
            keywords = body.keywords
            doc_id = body.doc_id or "adhoc"
            if not keywords:
                queued = {d.doc_id: d for d in pending}
                if body.doc_id not in queued:
                    raise HTTPException(
                        400, "keywords required unless doc_id is queued"
                    )
                keywords = list(queued[body.doc_id].keywords)
            document = Document(doc_id, tuple(keywords))
            after, reports = learn(before, document, _JUDGMENTS[body.judgment])
            if debug:
                folded = reduce(
                    lambda r, rep: rep.apply_to(r), reports, before.ranking
                )
                if folded != after.ranking:
                    raise HTTPException(
                        500, "debug: reports do not replay to the new snapshot"
                    )
            store.put(profile_id, after, dequeue(pending, document.doc_id))
            return {
                "doc": document.doc_id,
                "reports": [r.to_dict() for r in reports],
                "incons": format_rank(after.ranking.inconsistency_degree()),
            }
        finally:
            lock.release()

    return app
