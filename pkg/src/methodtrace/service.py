"""HTTP facade over the tracer: asynchronous trace jobs, job polling, result
retrieval, and per-commit file diffs for client UIs.

Traces can run for minutes on large repositories, so submission returns a
job id immediately; identical in-flight requests coalesce onto one job. The
bounded in-flight window (default 32) yields 429 when full.
"""

from __future__ import annotations

import json
import os
import threading
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Any, Callable

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles

from .errors import MethodTraceError
from .gitrepo import diff_file, open_repository, resolve_commit
from .matching import MatchThresholds
from .report import build_history_document, serialize
from .tracing import TracerConfig, TraversalNode, trace

DEFAULT_PORT = 8475
DEFAULT_WORKERS = 4
DEFAULT_QUEUE_CAP = 32


class JobState(str, Enum):
    QUEUED = "Queued"
    CLONING = "Cloning"
    TRACING = "Tracing"
    DONE = "Done"
    FAILED = "Failed"


_STATE_ORDER = [JobState.QUEUED, JobState.CLONING, JobState.TRACING, JobState.DONE, JobState.FAILED]
_TERMINAL = {JobState.DONE, JobState.FAILED}


def _now() -> str:
    return datetime.now(tz=timezone.utc).strftime("%Y-%m-%dT%H:%M:%S.%fZ")


@dataclass
class TraceJob:
    id: str
    request: dict[str, Any]
    state: JobState = JobState.QUEUED
    result_bytes: bytes | None = None
    error: dict[str, str] | None = None
    submitted_at: str = field(default_factory=_now)
    finished_at: str | None = None
    transitions: list[str] = field(default_factory=lambda: [JobState.QUEUED.value])

    def advance(self, state: JobState) -> None:
        if _STATE_ORDER.index(state) < _STATE_ORDER.index(self.state):
            raise RuntimeError(f"job state may not regress: {self.state} -> {state}")
        self.state = state
        self.transitions.append(state.value)
        if state in _TERMINAL:
            self.finished_at = _now()

    def status_payload(self) -> dict[str, Any]:
        payload: dict[str, Any] = {
            "id": self.id,
            "state": self.state.value,
            "submitted_at": self.submitted_at,
            "finished_at": self.finished_at,
            "transitions": list(self.transitions),
        }
        if self.error is not None:
            payload["error"] = self.error
        return payload


def _validate_request(body: Any) -> tuple[dict[str, Any] | None, dict[str, str]]:
    """Normalized request dict, or field-level error messages."""
    errors: dict[str, str] = {}
    if not isinstance(body, dict):
        return None, {"body": "request body must be a JSON object"}
    normalized: dict[str, Any] = {}
    for key in ("repo", "commit", "file", "method"):
        value = body.get(key)
        if not isinstance(value, str) or not value.strip():
            errors[key] = "required non-empty string"
        else:
            normalized[key] = value
    line = body.get("line")
    if not isinstance(line, int) or isinstance(line, bool) or line < 1:
        errors["line"] = "required integer >= 1"
    else:
        normalized["line"] = line
    config = body.get("config", {})
    if config is None:
        config = {}
    if not isinstance(config, dict):
        errors["config"] = "must be an object"
        config = {}
    known = {
        "threshold_same": (float, int),
        "threshold_cross": (float, int),
        "include_formatting": bool,
        "include_javadoc": bool,
        "include_annotations": bool,
        "max_commits": int,
    }
    clean_config: dict[str, Any] = {}
    for key, types in known.items():
        if key in config and config[key] is not None:
            if not isinstance(config[key], types) or isinstance(config[key], bool) != (types is bool):
                errors[f"config.{key}"] = f"invalid type"
            else:
                clean_config[key] = config[key]
    unknown = set(config) - set(known)
    if unknown:
        errors["config"] = f"unknown keys: {', '.join(sorted(unknown))}"
    if errors:
        return None, errors
    normalized["config"] = clean_config
    return normalized, {}


def _config_from_request(config: dict[str, Any]) -> TracerConfig:
    return TracerConfig(
        thresholds=MatchThresholds(
            config.get("threshold_same", 0.70), config.get("threshold_cross", 0.75)
        ),
        include_formatting=config.get("include_formatting", True),
        include_javadoc=config.get("include_javadoc", True),
        include_annotations=config.get("include_annotations", True),
        max_commits=config.get("max_commits"),
    )


def default_pipeline(request: dict[str, Any], cache_dir: str,
                     advance: Callable[[JobState], None]) -> bytes:
    """Open (possibly clone), trace, and serialize: the CLI-identical path."""
    advance(JobState.CLONING)
    repo = open_repository(request["repo"], cache_dir)
    advance(JobState.TRACING)
    config = _config_from_request(request["config"])
    locator = TraversalNode(
        commit=request["commit"], file=request["file"],
        name=request["method"], line=request["line"],
    )
    history = trace(repo, locator, config)
    document = build_history_document(repo, history, request["repo"], config)
    return serialize(document).encode("utf-8")


def create_app(
    cache_dir: str | os.PathLike = ".methodtrace-cache",
    workers: int = DEFAULT_WORKERS,
    queue_cap: int = DEFAULT_QUEUE_CAP,
    static_dir: str | os.PathLike | None = None,
    pipeline: Callable[..., bytes] | None = None,
) -> FastAPI:
    app = FastAPI(title="methodtrace service")
    jobs: dict[str, TraceJob] = {}
    inflight: dict[str, str] = {}  # request fingerprint -> job id
    lock = threading.Lock()
    pool = ThreadPoolExecutor(max_workers=workers)
    run_pipeline = pipeline or default_pipeline

    def execute(job: TraceJob) -> None:
        def advance(state: JobState) -> None:
            with lock:
                job.advance(state)

        try:
            result = run_pipeline(job.request, str(cache_dir), advance)
        except MethodTraceError as exc:
            with lock:
                job.error = {"code": exc.code, "message": str(exc)}
                job.advance(JobState.FAILED)
        except Exception as exc:  # noqa: BLE001 - survives worker crashes
            with lock:
                job.error = {"code": "InternalError", "message": str(exc)}
                job.advance(JobState.FAILED)
        else:
            with lock:
                job.result_bytes = result
                job.advance(JobState.DONE)

    @app.post("/api/v1/trace", status_code=202)
    async def submit_trace(request: Request) -> Response:
        try:
            body = await request.json()
        except json.JSONDecodeError:
            return JSONResponse({"error": "invalid_json"}, status_code=400)
        normalized, errors = _validate_request(body)
        if errors:
            return JSONResponse(
                {"error": "invalid_request", "fields": errors}, status_code=400
            )
        fingerprint = json.dumps(normalized, sort_keys=True)
        with lock:
            existing_id = inflight.get(fingerprint)
            if existing_id is not None and jobs[existing_id].state not in _TERMINAL:
                return JSONResponse({"job_id": existing_id}, status_code=202)
            active = sum(1 for j in jobs.values() if j.state not in _TERMINAL)
            if active >= queue_cap:
                return JSONResponse(
                    {"error": "queue_full", "message": f"{active} jobs in flight"},
                    status_code=429,
                )
            job = TraceJob(id=uuid.uuid4().hex, request=normalized)
            jobs[job.id] = job
            inflight[fingerprint] = job.id
        pool.submit(execute, job)
        return JSONResponse({"job_id": job.id}, status_code=202)

    @app.get("/api/v1/jobs/{job_id}")
    async def job_status(job_id: str) -> Response:
        with lock:
            job = jobs.get(job_id)
            if job is None:
                return JSONResponse({"error": "unknown_job"}, status_code=404)
            return JSONResponse(job.status_payload())

    @app.get("/api/v1/jobs/{job_id}/result")
    async def job_result(job_id: str) -> Response:
        with lock:
            job = jobs.get(job_id)
            if job is None:
                return JSONResponse({"error": "unknown_job"}, status_code=404)
            if job.state == JobState.FAILED:
                return JSONResponse(
                    {"error": job.error["code"], "message": job.error["message"]},
                    status_code=409,
                )
            if job.state != JobState.DONE or job.result_bytes is None:
                return JSONResponse(
                    {"error": "not_finished", "state": job.state.value}, status_code=409
                )
            return Response(content=job.result_bytes, media_type="application/json")

    @app.get("/api/v1/diff")
    async def file_diff(repo: str, commit: str, file: str, parent: str = "") -> Response:
        """Unified diff of one file; an empty parent means the root commit's
        content shown as pure additions."""
        try:
            handle = open_repository(repo, cache_dir)
            commit_id = resolve_commit(handle, commit).id
            parent_id = resolve_commit(handle, parent).id if parent else None
            absent_at_commit = handle.blob_id(commit_id, file) is None
            absent_at_parent = parent_id is None or handle.blob_id(parent_id, file) is None
            if absent_at_commit and absent_at_parent:
                return JSONResponse(
                    {"error": "FileAbsentAtCommit", "message": f"{file} absent on both sides"},
                    status_code=404,
                )
            text = diff_file(handle, commit_id, parent_id, file)
        except MethodTraceError as exc:
            return JSONResponse(
                {"error": exc.code, "message": str(exc)}, status_code=404
            )
        return PlainTextResponse(text)

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    app.state.jobs = jobs
    return app


def main() -> None:
    import uvicorn

    port = int(os.environ.get("HF_PORT", DEFAULT_PORT))
    cache_dir = os.environ.get("HF_CACHE_DIR", ".methodtrace-cache")
    workers = int(os.environ.get("HF_WORKERS", DEFAULT_WORKERS))
    queue_cap = int(os.environ.get("HF_QUEUE_CAP", DEFAULT_QUEUE_CAP))
    static_dir = os.environ.get("HF_STATIC_DIR")
    if static_dir is None:
        bundled = Path(__file__).resolve().parent.parent.parent / "frontend" / "dist"
        static_dir = str(bundled) if bundled.is_dir() else None
    app = create_app(cache_dir, workers, queue_cap, static_dir)
    uvicorn.run(app, host="0.0.0.0", port=port)


if __name__ == "__main__":
    main()
