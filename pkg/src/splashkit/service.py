"""HTTP service: explanation endpoint plus annotation-session management
backed by an append-only record store."""

from __future__ import annotations

import json
import os
import random
import threading
import time
from dataclasses import dataclass, field
from typing import Optional

from fastapi import FastAPI
from fastapi.responses import JSONResponse

from .dataset import load_dataset
from .explain import ExplainError, NonExplainableError, explain
from .library import load_library
from .parser import (
    ParseError,
    ResolutionError,
    UnsupportedConstructError,
    parse_sql,
)
from .schema import Schema, load_schemas
from .tokens import TokenizeError, tokenize

MAX_FEEDBACK_TOKENS = 15


@dataclass(frozen=True)
class ServiceConfig:
    port: int
    dataset_path: str
    schemas_path: str
    templates_path: str
    store_path: str
    session_seed: int = 0
    include_paraphrase_tasks: bool = False

    @staticmethod
    def from_file(path: str) -> "ServiceConfig":
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
        return ServiceConfig(
            port=int(doc["port"]),
            dataset_path=doc["dataset_path"],
            schemas_path=doc["schemas_path"],
            templates_path=doc["templates_path"],
            store_path=doc["store_path"],
            session_seed=int(doc.get("session_seed", 0)),
            include_paraphrase_tasks=bool(doc.get("include_paraphrase_tasks", False)),
        )


class AnnotationStore:
    """Append-only JSON-lines record log; the append happens (and is flushed
    to disk) before the caller acks, so an acked record is never lost."""

    def __init__(self, path: str):
        self.path = path
        self._lock = threading.Lock()

    def append(self, record: dict) -> None:
        line = json.dumps(record, sort_keys=True)
        with self._lock:
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(line + "\n")
                fh.flush()
                os.fsync(fh.fileno())

    def replay(self) -> list[dict]:
        if not os.path.exists(self.path):
            return []
        records = []
        with open(self.path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    records.append(json.loads(line))
        return records


@dataclass
class _Session:
    session_id: str
    task_order: list  # of task ids
    submitted: set = field(default_factory=set)

    def next_task_id(self) -> Optional[str]:
        for task_id in self.task_order:
            if task_id not in self.submitted:
                return task_id
        return None


def _schema_preview(schema: Schema) -> dict:
    return {
        "db_id": schema.db_id,
        "tables": [
            {
                "name": t.name,
                "columns": [{"name": c.name, "type": c.type} for c in t.columns],
                "sample_rows": [list(row) for row in t.sample_rows],
            }
            for t in schema.tables
        ],
    }


def _error(status: int, code: str, message: str, **extra) -> JSONResponse:
    return JSONResponse(status_code=status, content={"code": code, "message": message, **extra})


def create_app(config: ServiceConfig) -> FastAPI:
    schemas = load_schemas(config.schemas_path)
    library = load_library(config.templates_path)
    examples = load_dataset(config.dataset_path, schemas)
    store = AnnotationStore(config.store_path)

    # Annotator-facing tasks; gold/predicted SQL never leaves this mapping.
    tasks: dict[str, dict] = {}
    for index, example in enumerate(examples):
        task_id = f"task-{index:05d}"
        steps = explain(example.predicted, schemas[example.db_id], library)
        tasks[task_id] = {
            "task_id": task_id,
            "type": "annotate",
            "question": example.question,
            "schema_preview": _schema_preview(schemas[example.db_id]),
            "steps": list(steps.steps),
        }
        if config.include_paraphrase_tasks:
            tasks[f"para-{index:05d}"] = {
                "task_id": f"para-{index:05d}",
                "type": "paraphrase",
                "question": example.question,
                "feedback": example.feedback,
            }

    sessions: dict[str, _Session] = {}
    sessions_lock = threading.Lock()

    app = FastAPI(title="splashkit correction service")

    @app.get("/v1/health")
    def health():
        return {"status": "ok", "tasks": len(tasks)}

    @app.post("/v1/explain")
    def explain_endpoint(payload: dict):
        sql = payload.get("sql")
        db_id = payload.get("db_id")
        if not sql or not db_id:
            return _error(400, "bad_request", "both 'sql' and 'db_id' are required")
        schema = schemas.get(db_id)
        if schema is None:
            return _error(404, "unknown_db", f"no schema for db_id {db_id!r}")
        try:
            query = parse_sql(sql, schema)
        except UnsupportedConstructError as exc:
            return _error(400, "unsupported", str(exc), position=exc.position)
        except ResolutionError as exc:
            return _error(400, "resolution_error", str(exc), position=exc.position)
        except (ParseError, TokenizeError) as exc:
            return _error(400, "syntax_error", str(exc),
                          position=getattr(exc, "position", None))
        try:
            steps = explain(query, schema, library)
        except NonExplainableError as exc:
            return _error(400, "non_explainable", str(exc))
        except ExplainError as exc:
            return _error(400, "explain_error", str(exc))
        return {"steps": list(steps.steps)}

    @app.post("/v1/session")
    def create_session(payload: Optional[dict] = None):
        with sessions_lock:
            session_id = f"session-{len(sessions):04d}"
            rng = random.Random(f"{config.session_seed}:{session_id}")
            order = sorted(tasks)
            rng.shuffle(order)
            sessions[session_id] = _Session(session_id=session_id, task_order=order)
        return {"session_id": session_id, "tasks": len(order)}

    @app.get("/v1/session/{session_id}/next")
    def next_task(session_id: str):
        session = sessions.get(session_id)
        if session is None:
            return _error(404, "unknown_session", f"no session {session_id!r}")
        task_id = session.next_task_id()
        if task_id is None:
            return {"done": True}
        return {"done": False, "task": tasks[task_id]}

    @app.post("/v1/session/{session_id}/annotation")
    def submit_annotation(session_id: str, payload: dict):
        session = sessions.get(session_id)
        if session is None:
            return _error(404, "unknown_session", f"no session {session_id!r}")
        task_id = payload.get("task_id")
        if task_id not in tasks:
            return _error(404, "unknown_task", f"no task {task_id!r}")
        if task_id in session.submitted:
            return _error(409, "duplicate_submission",
                          f"task {task_id!r} was already submitted in this session")
        verdict = payload.get("verdict")
        feedback = payload.get("feedback", "") or ""
        if verdict not in ("correct", "incorrect"):
            return _error(400, "bad_verdict", "verdict must be 'correct' or 'incorrect'")
        token_count = len(tokenize(feedback, mode="feedback"))
        if verdict == "correct" and feedback.strip():
            return _error(400, "feedback_not_allowed",
                          "a 'correct' verdict must not carry feedback")
        if verdict == "incorrect" and not feedback.strip():
            return _error(400, "feedback_required",
                          "an 'incorrect' verdict requires feedback")
        if token_count > MAX_FEEDBACK_TOKENS:
            return _error(400, "feedback_too_long",
                          f"feedback has {token_count} tokens (limit {MAX_FEEDBACK_TOKENS})",
                          count=token_count)
        record = {
            "session_id": session_id,
            "task_id": task_id,
            "task_type": tasks[task_id]["type"],
            "annotator_id": payload.get("annotator_id", "anonymous"),
            "verdict": verdict,
            "feedback": feedback,
            "feedback_tokens": token_count,
            "elapsed_seconds": float(payload.get("elapsed_seconds", 0.0)),
            "timestamp": payload.get("timestamp") or time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        }
        store.append(record)  # durable before ack
        session.submitted.add(task_id)
        return {"ok": True, "task_id": task_id}

    @app.get("/v1/stats")
    def stats():
        return compute_stats(store.replay())

    app.state.store = store
    app.state.tasks = tasks
    return app


def compute_stats(records: list[dict]) -> dict:
    verdicts: dict[str, int] = {"correct": 0, "incorrect": 0}
    elapsed = []
    feedback_tokens = []
    for record in records:
        verdicts[record["verdict"]] = verdicts.get(record["verdict"], 0) + 1
        elapsed.append(record.get("elapsed_seconds", 0.0))
        if record["verdict"] == "incorrect":
            feedback_tokens.append(record.get("feedback_tokens", 0))
    return {
        "completed": len(records),
        "verdicts": verdicts,
        "mean_elapsed_seconds": sum(elapsed) / len(elapsed) if elapsed else 0.0,
        "mean_feedback_tokens": (
            sum(feedback_tokens) / len(feedback_tokens) if feedback_tokens else 0.0
        ),
    }


def serve(config: ServiceConfig) -> None:
    import uvicorn

    uvicorn.run(create_app(config), host="127.0.0.1", port=config.port)
