"""HTTP service backing the annotation workflow.

Endpoints (JSON in, JSON out; errors are {"code", "message"}):

    POST /sessions                {annotator_id, dataset_path, n, seed}
    GET  /sessions/{id}/next      current question, or a completion marker
    POST /sessions/{id}/scores    {question_id, rubric: {six 0..3 scores}}
    GET  /reports?dataset=&n=&seed=

Sessions walk a seeded sample of a merged-question dataset strictly in
order: GET next never advances, each accepted score advances the cursor by
one, and a question can only be scored while it is current. Scores append to
a JSONL store; all math behind /reports is delegated to the agreement
module, the service adds none of its own. Annotator ids are trusted as
given; put real authentication in front of this before any non-lab use.
"""

from __future__ import annotations

import json
import threading
import uuid
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .agreement import (
    AnnotationRecord,
    Rubric,
    agreement_report,
    append_annotation,
    read_annotations,
    sample_questions,
)
from .merge import MergedQuestion, merged_to_obj, read_merged

STORE_FILENAME = "annotations.jsonl"
SESSIONS_FILENAME = "sessions.json"


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


@dataclass
class ReviewSession:
    session_id: str
    annotator_id: str
    dataset_path: str
    n: int
    seed: int
    cursor: int

    @property
    def status(self) -> str:
        return "complete" if self.cursor >= self.n else "open"

    def sample_key(self) -> tuple[str, int, int]:
        return (self.dataset_path, self.n, self.seed)

    def public(self) -> dict:
        data = asdict(self)
        data["status"] = self.status
        return data


class CreateSessionRequest(BaseModel):
    annotator_id: str
    dataset_path: str
    n: int
    seed: int


class SubmitScoreRequest(BaseModel):
    question_id: str
    rubric: dict[str, int]


class ServiceState:
    """Sessions plus the append-only annotation store, under one writer lock."""

    def __init__(self, data_dir: Path):
        self.data_dir = data_dir
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self.store_path = self.data_dir / STORE_FILENAME
        self.sessions_path = self.data_dir / SESSIONS_FILENAME
        self.lock = threading.Lock()
        self.sessions: dict[str, ReviewSession] = {}
        self._samples: dict[tuple[str, int, int], list[MergedQuestion]] = {}
        if self.sessions_path.exists():
            raw = json.loads(self.sessions_path.read_text("utf-8"))
            for obj in raw["sessions"]:
                obj.pop("status", None)
                sess = ReviewSession(**obj)
                self.sessions[sess.session_id] = sess

    def persist_sessions(self) -> None:
        payload = {"sessions": [s.public() for s in self.sessions.values()]}
        self.sessions_path.write_text(
            json.dumps(payload, indent=2, sort_keys=True) + "\n", "utf-8"
        )

    def sample_for(self, dataset_path: str, n: int, seed: int) -> list[MergedQuestion]:
        key = (dataset_path, n, seed)
        if key not in self._samples:
            path = Path(dataset_path)
            if not path.exists():
                raise ApiError(404, "dataset_not_found", f"no dataset at {dataset_path}")
            items = read_merged(path)
            if n > len(items):
                raise ApiError(
                    400, "sample_too_large", f"asked for {n} of {len(items)} questions"
                )
            self._samples[key] = sample_questions(items, n, seed)
        return self._samples[key]

    def store_records(self) -> list[AnnotationRecord]:
        if not self.store_path.exists():
            return []
        return read_annotations(self.store_path)


def create_app(data_dir: str | Path) -> FastAPI:
    state = ServiceState(Path(data_dir))
    app = FastAPI(title="twohop review service")
    app.state.review = state
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.exception_handler(ApiError)
    async def on_api_error(_: Request, exc: ApiError) -> JSONResponse:
        return JSONResponse(
            status_code=exc.status, content={"code": exc.code, "message": exc.message}
        )

    @app.exception_handler(RequestValidationError)
    async def on_validation_error(_: Request, exc: RequestValidationError) -> JSONResponse:
        return JSONResponse(
            status_code=400, content={"code": "validation_error", "message": str(exc)}
        )

    def get_session(session_id: str) -> ReviewSession:
        sess = state.sessions.get(session_id)
        if sess is None:
            raise ApiError(404, "session_not_found", f"no session {session_id!r}")
        return sess

    @app.post("/sessions", status_code=201)
    def create_session(req: CreateSessionRequest) -> dict:
        if not req.annotator_id:
            raise ApiError(400, "invalid_annotator", "annotator_id must be non-empty")
        if req.n < 0:
            raise ApiError(400, "invalid_sample", "n must be >= 0")
        with state.lock:
            for sess in state.sessions.values():
                if (
                    sess.annotator_id == req.annotator_id
                    and sess.sample_key() == (req.dataset_path, req.n, req.seed)
                    and sess.status == "open"
                ):
                    raise ApiError(
                        409,
                        "duplicate_session",
                        f"annotator {req.annotator_id!r} already has an open "
                        "session on this sample",
                    )
            state.sample_for(req.dataset_path, req.n, req.seed)
            sess = ReviewSession(
                session_id=uuid.uuid4().hex[:12],
                annotator_id=req.annotator_id,
                dataset_path=req.dataset_path,
                n=req.n,
                seed=req.seed,
                cursor=0,
            )
            state.sessions[sess.session_id] = sess
            state.persist_sessions()
        return sess.public()

    @app.get("/sessions/{session_id}/next")
    def next_item(session_id: str) -> dict:
        sess = get_session(session_id)
        base = {
            "session_id": sess.session_id,
            "annotator_id": sess.annotator_id,
            "index": sess.cursor,
            "total": sess.n,
        }
        if sess.status == "complete":
            return {**base, "done": True, "question": None}
        mq = state.sample_for(*sess.sample_key())[sess.cursor]
        question = {"question_id": mq.question_id, **merged_to_obj(mq)}
        return {**base, "done": False, "question": question}

    @app.post("/sessions/{session_id}/scores")
    def submit_score(session_id: str, req: SubmitScoreRequest) -> dict:
        with state.lock:
            sess = get_session(session_id)
            if sess.status == "complete":
                raise ApiError(409, "session_complete", "all questions already scored")
            current = state.sample_for(*sess.sample_key())[sess.cursor]
            if req.question_id != current.question_id:
                raise ApiError(
                    409,
                    "out_of_order",
                    f"expected {current.question_id!r}, got {req.question_id!r}",
                )
            try:
                rubric = Rubric(**req.rubric)
            except (TypeError, ValueError) as exc:
                raise ApiError(400, "invalid_rubric", str(exc)) from exc
            for rec in state.store_records():
                if (
                    rec.annotator_id == sess.annotator_id
                    and rec.question_id == req.question_id
                ):
                    raise ApiError(
                        409,
                        "already_scored",
                        f"{sess.annotator_id!r} already scored {req.question_id!r}",
                    )
            append_annotation(
                state.store_path,
                AnnotationRecord(
                    annotator_id=sess.annotator_id,
                    question_id=req.question_id,
                    rubric=rubric,
                    created_at=datetime.now(timezone.utc).isoformat(),
                ),
            )
            sess.cursor += 1
            state.persist_sessions()
            return {"ok": True, "cursor": sess.cursor, "status": sess.status}

    @app.get("/reports")
    def report(dataset: str, n: int, seed: int) -> dict:
        sample_key = (dataset, n, seed)
        on_sample = [s for s in state.sessions.values() if s.sample_key() == sample_key]
        if not any(s.status == "complete" for s in on_sample):
            raise ApiError(
                404, "no_sessions", "no completed session on that sample yet"
            )
        sample_ids = {mq.question_id for mq in state.sample_for(*sample_key)}
        annotators = {s.annotator_id for s in on_sample}
        records = [
            rec
            for rec in state.store_records()
            if rec.question_id in sample_ids and rec.annotator_id in annotators
        ]
        if not records:
            raise ApiError(404, "no_annotations", "no scores recorded for that sample")
        return agreement_report(records).to_dict()

    return app
