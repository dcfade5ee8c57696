"""HTTP API: upload, schema, analysis, example rerolls, and audit records.

Sessions are in-memory (optional JSON write-through via ``persist_dir``) and
expire after a TTL.  Within a session at most one analysis job runs at a
time; a second concurrent request gets 409.  Results are cached per
(question, filter, grouping, seed) so identical analyze requests return
byte-identical payloads.
"""

from __future__ import annotations

import json
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from fastapi import FastAPI, File, Form, HTTPException, UploadFile
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field

from .analysis import (
    AUTO_GROUPING,
    AnalysisResult,
    CallCounter,
    Providers,
    build_providers,
    run_analysis,
)
from .config import AppConfig, load_config
from .errors import (
    EmptyInput,
    MalformedLine,
    NonCategoricalColumn,
    NonCategoricalFilter,
    NonOpenEndedQuestion,
    ProviderUnavailable,
    UnknownColumn,
    UnparsableCsv,
)
from .ingest import RawTable, SamplingPolicy, parse_csv, parse_jsonl, sample_rows
from .schema import ColumnProfile, FilterSpec, profile_columns
from .summarize import interesting_examples


@dataclass
class AnalysisSession:
    session_id: str
    table: RawTable                      # already sampled
    profiles: list[ColumnProfile]
    seed: int
    created_at: float
    audit: list[dict[str, Any]] = field(default_factory=list)
    # One cached analysis: (key, result, payload), swapped as a single
    # reference so concurrent readers never see a torn key/payload pair.
    artifact: tuple[tuple, AnalysisResult, dict[str, Any]] | None = None
    latest_examples: dict[str, Any] | None = None
    job_lock: threading.Lock = field(default_factory=threading.Lock)

    def log(self, event: str, **detail: Any) -> None:
        self.audit.append({"ts": time.time(), "event": event, **detail})


class SessionStore:
    def __init__(self, ttl_seconds: int, persist_dir: str | None = None):
        self._sessions: dict[str, AnalysisSession] = {}
        self._lock = threading.RLock()
        self._ttl = ttl_seconds
        self._persist_dir = Path(persist_dir) if persist_dir else None
        if self._persist_dir:
            self._persist_dir.mkdir(parents=True, exist_ok=True)

    def create(self, table: RawTable, profiles: list[ColumnProfile], seed: int) -> AnalysisSession:
        session = AnalysisSession(
            session_id=uuid.uuid4().hex,
            table=table,
            profiles=profiles,
            seed=seed,
            created_at=time.time(),
        )
        with self._lock:
            self._sessions[session.session_id] = session
        return session

    def get(self, session_id: str) -> AnalysisSession:
        with self._lock:
            session = self._sessions.get(session_id)
            if session is None:
                raise HTTPException(status_code=404, detail="unknown session")
            if time.time() - session.created_at > self._ttl:
                del self._sessions[session_id]
                raise HTTPException(status_code=404, detail="session expired")
            return session

    def snapshot(self, session: AnalysisSession) -> None:
        """Write-through JSON snapshot (best effort, never fatal)."""
        if not self._persist_dir:
            return
        doc = {
            "session_id": session.session_id,
            "created_at": session.created_at,
            "seed": session.seed,
            "columns": list(session.table.columns),
            "row_ids": list(session.table.row_ids),
            "rows": list(session.table.rows),
            "profiles": [p.to_json_dict() for p in session.profiles],
            "audit": session.audit,
        }
        path = self._persist_dir / f"{session.session_id}.json"
        try:
            path.write_text(json.dumps(doc, ensure_ascii=False), encoding="utf-8")
        except OSError:
            pass


class AnalyzeRequest(BaseModel):
    question: str
    filter: dict[str, list[str]] = Field(default_factory=dict)
    grouping: str = AUTO_GROUPING
    seed: int | None = None


class RerollRequest(BaseModel):
    seed: int


def _detect_format(filename: str | None, hint: str, data: bytes) -> str:
    if hint in ("csv", "jsonl"):
        return hint
    if filename and filename.lower().endswith((".jsonl", ".ndjson", ".json")):
        return "jsonl"
    if filename and filename.lower().endswith(".csv"):
        return "csv"
    stripped = data.lstrip()[:1]
    return "jsonl" if stripped == b"{" else "csv"


def create_app(
    config: AppConfig | None = None,
    providers: Providers | None = None,
    static_dir: str | None = None,
) -> FastAPI:
    config = config or AppConfig()
    base_providers = providers if providers is not None else build_providers(config)
    store = SessionStore(config.session_ttl_seconds, config.persist_dir)

    app = FastAPI(title="surveyscope", version="0.1.0")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    app.state.store = store
    app.state.config = config

    @app.post("/surveys")
    def upload_survey(
        file: UploadFile = File(...),
        format: str = Form("auto"),
        seed: int = Form(0),
    ) -> dict[str, Any]:
        data = file.file.read(config.max_upload_bytes + 1)
        if len(data) > config.max_upload_bytes:
            raise HTTPException(status_code=413, detail="upload exceeds size limit")
        fmt = _detect_format(file.filename, format, data)
        try:
            table = parse_csv(data) if fmt == "csv" else parse_jsonl(data)
        except (EmptyInput, UnparsableCsv, MalformedLine) as exc:
            raise HTTPException(status_code=400, detail=f"{type(exc).__name__}: {exc}") from exc

        sampled_table = sample_rows(table, SamplingPolicy(max_rows=config.sampling.max_rows, seed=seed))
        profiles = profile_columns(sampled_table, config.schema_thresholds)
        session = store.create(sampled_table, profiles, seed)
        session.log("upload", format=fmt, original_rows=len(table))
        session.log(
            "sample",
            analyzed_rows=len(sampled_table),
            seed=seed,
            sampled=len(sampled_table) < len(table),
        )
        store.snapshot(session)
        return {
            "session_id": session.session_id,
            "profiles": [p.to_json_dict() for p in profiles],
            "sampled": len(sampled_table) < len(table),
            "original_rows": len(table),
            "analyzed_rows": len(sampled_table),
        }

    @app.post("/surveys/{session_id}/analyze")
    def analyze(session_id: str, request: AnalyzeRequest) -> dict[str, Any]:
        session = store.get(session_id)
        seed = request.seed if request.seed is not None else session.seed
        filter_spec = FilterSpec.from_dict(request.filter)
        key = (request.question, json.dumps(filter_spec.canonical()), request.grouping, seed)

        cached = session.artifact
        if cached is not None and cached[0] == key:
            return cached[2]

        if not session.job_lock.acquire(blocking=False):
            raise HTTPException(status_code=409, detail="analysis already running for this session")
        try:
            # Re-check: another thread may have filled the cache meanwhile.
            cached = session.artifact
            if cached is not None and cached[0] == key:
                return cached[2]
            session.log("analyze_start", question=request.question, grouping=request.grouping, seed=seed)
            counter = CallCounter(
                on_call=lambda kind, detail: session.log("provider_call", kind=kind, **detail),
                include_texts=config.log_prompts,
            )
            wrapped = counter.wrap(base_providers)
            try:
                result = run_analysis(
                    table=session.table,
                    profiles=session.profiles,
                    question=request.question,
                    filter_spec=filter_spec,
                    grouping=request.grouping,
                    seed=seed,
                    providers=wrapped,
                    config=config,
                )
            except (UnknownColumn, NonOpenEndedQuestion, NonCategoricalColumn, NonCategoricalFilter) as exc:
                raise HTTPException(status_code=422, detail=f"{type(exc).__name__}: {exc}") from exc
            except ProviderUnavailable as exc:
                raise HTTPException(status_code=502, detail=f"provider unavailable: {exc}") from exc

            session.artifact = (key, result, result.payload)
            session.latest_examples = result.payload["interesting_examples"]
            session.log(
                "analyze_complete",
                question=request.question,
                embed_calls=counter.embed_calls,
                lm_calls=counter.lm_calls,
            )
            store.snapshot(session)
            return result.payload
        finally:
            session.job_lock.release()

    @app.post("/surveys/{session_id}/examples/reroll")
    def reroll(session_id: str, request: RerollRequest) -> dict[str, Any]:
        session = store.get(session_id)
        cached = session.artifact
        if cached is None:
            raise HTTPException(status_code=409, detail="no analysis to reroll; run /analyze first")
        counter = CallCounter(
            on_call=lambda kind, detail: session.log("provider_call", kind=kind, **detail),
            include_texts=config.log_prompts,
        )
        wrapped = counter.wrap(base_providers)
        result = interesting_examples(
            cached[1].responses, wrapped.lm, request.seed, config.prompts.interesting
        )
        payload = result.to_json_dict()
        session.latest_examples = payload
        session.log("reroll", seed=request.seed)
        return {"interesting_examples": payload}

    @app.get("/surveys/{session_id}/audit")
    def audit(session_id: str) -> dict[str, Any]:
        session = store.get(session_id)
        return {"session_id": session.session_id, "events": list(session.audit)}

    if static_dir and Path(static_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="client")

    return app


def main() -> None:
    import argparse

    import uvicorn

    parser = argparse.ArgumentParser(description="Run the survey analysis API")
    parser.add_argument("--config", help="path to JSON config file")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8000)
    parser.add_argument("--static-dir", help="serve a built web client from this directory")
    args = parser.parse_args()

    config = load_config(args.config) if args.config else AppConfig()
    uvicorn.run(create_app(config, static_dir=args.static_dir), host=args.host, port=args.port)
