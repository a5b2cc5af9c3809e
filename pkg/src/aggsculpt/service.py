"""HTTP session service exposing the engine to the UI and to scripts.

Sessions live in an in-process LRU store. Mutations (ops, undo, redo) are
serialized per session by a lock; reads serve whatever consistent state the
session reference currently points to.
"""

from __future__ import annotations

import json
import os
import tempfile
import threading
import time
import uuid
from collections import OrderedDict
from typing import Optional

from fastapi import FastAPI, File, Form, Query, Request, UploadFile
from fastapi.responses import JSONResponse, Response
from fastapi.staticfiles import StaticFiles

from . import history, ops
from .derive import category_counts
from .errors import SculptError
from .ingest import EdgeColumns, IngestConfig, open_session
from .layout import compute_layout
from .model import SculptOp, Session

DEFAULT_MAX_SESSIONS = 32
DEFAULT_MAX_UPLOAD = 512 * 1024 * 1024  # bytes

_CONFLICT_CODES = {"nothing_to_undo", "nothing_to_redo"}
_NOT_FOUND_CODES = {"unknown_session", "unknown_substrate"}


def _status_for(code: str) -> int:
    if code in _NOT_FOUND_CODES:
        return 404
    if code in _CONFLICT_CODES:
        return 409
    return 400


class SessionStore:
    """Thread-safe LRU map of session id -> (lock, session)."""

    def __init__(self, max_sessions: int = DEFAULT_MAX_SESSIONS):
        self.max_sessions = max_sessions
        self._lock = threading.Lock()
        self._entries: "OrderedDict[str, dict]" = OrderedDict()

    def create(self, session: Session) -> str:
        session_id = uuid.uuid4().hex
        with self._lock:
            self._entries[session_id] = {
                "lock": threading.Lock(),
                "session": session,
                "created_at": time.time(),
            }
            while len(self._entries) > self.max_sessions:
                self._entries.popitem(last=False)
        return session_id

    def entry(self, session_id: str) -> dict:
        with self._lock:
            entry = self._entries.get(session_id)
            if entry is None:
                raise SculptError("unknown_session", f"no session {session_id!r}")
            self._entries.move_to_end(session_id)
            return entry


def _substrate_summary(session: Session) -> list:
    return [
        {
            "id": sub.id,
            "name": sub.name,
            "liveCount": sub.live_count,
            "prunedCount": sub.pruned_count,
            "hAxis": list(sub.h_axis),
            "vAxis": list(sub.v_axis),
            "piles": [
                {"attribute": p.attribute, "members": list(p.members), "name": p.name}
                for p in sub.piles
            ],
            "peek": sub.peek,
            "showLinks": sub.show_links,
            "showArrows": sub.show_arrows,
        }
        for sub in session.substrates
    ]


def _log_summary(session: Session) -> dict:
    return {
        "cursor": session.log.cursor,
        "length": len(session.log.entries),
        "entries": [e.op.to_dict() for e in session.log.entries],
    }


def _session_response(session_id: str, entry: dict) -> dict:
    session = entry["session"]
    dataset = session.dataset
    return {
        "sessionId": session_id,
        "createdAt": entry["created_at"],
        "dataset": {
            "rowCount": dataset.row_count,
            "columns": [
                {"name": name, "kind": session.specs[name].kind}
                for name in dataset.column_names
            ],
            "hasEdges": dataset.has_edges,
        },
        "substrates": _substrate_summary(session),
        "log": _log_summary(session),
    }


async def _spool_upload(upload: UploadFile, cap: int) -> str:
    """Stream an upload to a temp file, enforcing the size cap."""
    fd, path = tempfile.mkstemp(suffix=".csv")
    size = 0
    try:
        with os.fdopen(fd, "wb") as out:
            while chunk := await upload.read(1 << 20):
                size += len(chunk)
                if size > cap:
                    raise SculptError("upload_too_large", f"upload exceeds {cap} bytes")
                out.write(chunk)
    except Exception:
        os.unlink(path)
        raise
    return path


def create_app(
    store: Optional[SessionStore] = None,
    static_dir: Optional[str] = None,
    max_upload: Optional[int] = None,
) -> FastAPI:
    app = FastAPI(title="aggsculpt", version="0.1.0")
    app.state.store = store or SessionStore()
    app.state.max_upload = max_upload or int(os.environ.get("AGGSCULPT_MAX_UPLOAD", DEFAULT_MAX_UPLOAD))

    @app.exception_handler(SculptError)
    async def _sculpt_error(_request: Request, exc: SculptError):
        return JSONResponse(
            status_code=_status_for(exc.code),
            content={"error": {"code": exc.code, "message": exc.message}},
        )

    @app.post("/sessions")
    async def create_session(
        nodes: UploadFile = File(...),
        edges: Optional[UploadFile] = File(None),
        config: Optional[str] = Form(None),
    ):
        try:
            raw = json.loads(config) if config else {}
        except json.JSONDecodeError as exc:
            raise SculptError("bad_config", f"config is not valid JSON: {exc}")
        ec = raw.get("edgeColumns", {})
        node_path = await _spool_upload(nodes, app.state.max_upload)
        edge_path = await _spool_upload(edges, app.state.max_upload) if edges is not None else None
        try:
            session = open_session(IngestConfig(
                node_file=node_path,
                edge_file=edge_path,
                edge_columns=EdgeColumns(
                    source=ec.get("source", "source"),
                    target=ec.get("target", "target"),
                    weight=ec.get("weight"),
                ),
                key_column=raw.get("keyColumn"),
                type_overrides=raw.get("typeOverrides", {}),
                sample=raw.get("sample"),
                seed=raw.get("seed", 0),
            ))
        finally:
            os.unlink(node_path)
            if edge_path:
                os.unlink(edge_path)
        session_id = app.state.store.create(session)
        return _session_response(session_id, app.state.store.entry(session_id))

    @app.get("/sessions/{session_id}")
    async def get_session(session_id: str):
        return _session_response(session_id, app.state.store.entry(session_id))

    def _mutate(session_id: str, fn):
        entry = app.state.store.entry(session_id)
        with entry["lock"]:
            entry["session"] = fn(entry["session"])
            session = entry["session"]
        return {"substrates": _substrate_summary(session), "log": _log_summary(session)}

    @app.post("/sessions/{session_id}/ops")
    async def post_op(session_id: str, request: Request):
        try:
            data = await request.json()
        except json.JSONDecodeError as exc:
            raise SculptError("bad_request", f"body is not valid JSON: {exc}")
        if not isinstance(data, dict) or "kind" not in data:
            raise SculptError("bad_request", "expected a JSON op object with a 'kind'")
        op = SculptOp.from_dict({"timestamp": time.time(), **data})
        return _mutate(session_id, lambda session: ops.apply(session, op))

    @app.post("/sessions/{session_id}/undo")
    async def post_undo(session_id: str):
        return _mutate(session_id, history.undo)

    @app.post("/sessions/{session_id}/redo")
    async def post_redo(session_id: str):
        return _mutate(session_id, history.redo)

    @app.get("/sessions/{session_id}/substrates/{substrate_id}/layout")
    async def get_layout(
        session_id: str,
        substrate_id: int,
        w: float = Query(800.0, gt=0),
        h: float = Query(600.0, gt=0),
    ):
        session = app.state.store.entry(session_id)["session"]
        return compute_layout(session, substrate_id, w, h).to_dict()

    @app.get("/sessions/{session_id}/substrates/{substrate_id}/histogram")
    async def get_histogram(session_id: str, substrate_id: int, attr: str):
        session = app.state.store.entry(session_id)["session"]
        counts = category_counts(session, substrate_id, attr)
        return {
            "attribute": attr,
            "bins": [{"category": c, "count": n} for c, n in counts],
        }

    @app.get("/sessions/{session_id}/substrates/{substrate_id}/export")
    async def get_export(session_id: str, substrate_id: int):
        session = app.state.store.entry(session_id)["session"]
        payload = history.export_csv(session, substrate_id)
        name = session.substrate(substrate_id).name.replace(" ", "_").lower()
        return Response(
            content=payload,
            media_type="text/csv; charset=utf-8",
            headers={"Content-Disposition": f'attachment; filename="{name}.csv"'},
        )

    if static_dir:
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="static")

    return app
