"""HTTP facade over datasets, sessions, recommendations, and tree snapshots.

Handlers hold no business logic: each endpoint is one call into the engine
plus serialization. Sessions live in memory; with a data directory every
mutation appends its event to a per-session JSONL file and a restart rebuilds
state by replay.
"""

from __future__ import annotations

import hashlib
import json
import logging
import threading
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, RedirectResponse
from fastapi.staticfiles import StaticFiles

from .charts import render_data
from .config import DEFAULT_CONFIG, EngineConfig
from .dataset import Table, load_table
from .errors import EngineError, UnknownDataset, UnknownSession
from .insights import InsightSpace
from .miner import mine_all
from .session import (
    CellKind,
    Session,
    append_event_jsonl,
    create_session,
    read_events_jsonl,
    replay,
    to_dot,
)

logger = logging.getLogger(__name__)

_STATUS_BY_CODE = {
    "EmptyInput": 400,
    "RaggedRows": 400,
    "DuplicateColumnName": 400,
    "CorruptLog": 400,
    "VersionMismatch": 400,
    "InvalidChartSpec": 400,
    "UnknownDataset": 404,
    "UnknownSession": 404,
    "UnknownCell": 404,
    "UnknownColumn": 404,
    "ArchivedCell": 409,
    "AlreadyArchived": 409,
    "NotArchived": 409,
    "CannotDeleteRoot": 409,
}
_DEFAULT_STATUS = 422   # remaining engine errors are unprocessable requests


def _status_for(exc: EngineError) -> int:
    return _STATUS_BY_CODE.get(exc.code, _DEFAULT_STATUS)


@dataclass
class DatasetEntry:
    dataset_id: str
    raw: bytes
    table: Table
    space: InsightSpace


@dataclass
class SessionEntry:
    session: Session
    dataset_id: str
    lock: threading.Lock = field(default_factory=threading.Lock)


class ServiceState:
    """All in-memory state plus the optional on-disk event store."""

    def __init__(self, config: EngineConfig, data_dir: str | None = None):
        self.config = config
        self.datasets: dict = {}
        self.sessions: dict = {}
        self.registry_lock = threading.Lock()
        self._session_counter = 0
        self.data_dir = Path(data_dir) if data_dir else None
        if self.data_dir:
            (self.data_dir / "datasets").mkdir(parents=True, exist_ok=True)
            (self.data_dir / "sessions").mkdir(parents=True, exist_ok=True)
            self._load_from_disk()

    # -- datasets ---------------------------------------------------------

    def add_dataset(self, raw: bytes, name: str, persist: bool = True) -> DatasetEntry:
        dataset_id = "d" + hashlib.sha256(raw).hexdigest()[:12]
        with self.registry_lock:
            existing = self.datasets.get(dataset_id)
        if existing is not None:
            return existing
        table = load_table(raw, name=name, config=self.config)
        space = mine_all(table, self.config)
        entry = DatasetEntry(dataset_id=dataset_id, raw=raw, table=table, space=space)
        with self.registry_lock:
            self.datasets[dataset_id] = entry
        if persist and self.data_dir:
            base = self.data_dir / "datasets" / dataset_id
            base.with_suffix(".csv").write_bytes(raw)
            base.with_suffix(".json").write_text(
                json.dumps({"name": name}), encoding="utf-8"
            )
        return entry

    def dataset(self, dataset_id: str) -> DatasetEntry:
        with self.registry_lock:
            entry = self.datasets.get(dataset_id)
        if entry is None:
            raise UnknownDataset(f"no dataset with id {dataset_id!r}",
                                 dataset_id=dataset_id)
        return entry

    # -- sessions ---------------------------------------------------------

    def create_session(self, dataset_id: str, root_selector=None) -> SessionEntry:
        ds = self.dataset(dataset_id)
        with self.registry_lock:
            self._session_counter += 1
            session_id = f"s{self._session_counter}"
        session = create_session(ds.table, ds.space, self.config,
                                 root_selector=root_selector, session_id=session_id)
        entry = SessionEntry(session=session, dataset_id=dataset_id)
        with self.registry_lock:
            self.sessions[session_id] = entry
        if self.data_dir:
            path = self._session_path(session_id)
            append_event_jsonl(path, {"meta": {"sessionId": session_id,
                                               "datasetId": dataset_id}})
            for event in session.event_log:
                append_event_jsonl(path, event)
        return entry

    def session(self, session_id: str) -> SessionEntry:
        with self.registry_lock:
            entry = self.sessions.get(session_id)
        if entry is None:
            raise UnknownSession(f"no session with id {session_id!r}",
                                 session_id=session_id)
        return entry

    def apply_event(self, session_id: str, event: dict):
        """Serialize mutations per session; persist the event only after it
        applied cleanly."""
        entry = self.session(session_id)
        with entry.lock:
            result = entry.session.apply(event)
            if self.data_dir:
                append_event_jsonl(self._session_path(session_id), event)
        return result

    def _session_path(self, session_id: str) -> Path:
        return self.data_dir / "sessions" / f"{session_id}.jsonl"

    def _load_from_disk(self) -> None:
        for meta_path in sorted((self.data_dir / "datasets").glob("*.json")):
            raw = meta_path.with_suffix(".csv").read_bytes()
            name = json.loads(meta_path.read_text(encoding="utf-8"))["name"]
            try:
                self.add_dataset(raw, name, persist=False)
            except EngineError:
                logger.exception("skipping unloadable dataset %s", meta_path.stem)
        for log_path in sorted((self.data_dir / "sessions").glob("*.jsonl")):
            records = read_events_jsonl(log_path)
            if not records or "meta" not in records[0]:
                logger.error("skipping session log without meta line: %s", log_path)
                continue
            meta = records[0]["meta"]
            try:
                ds = self.dataset(meta["datasetId"])
                session = replay(records[1:], ds.table, ds.space, self.config,
                                 session_id=meta["sessionId"])
            except EngineError:
                logger.exception("skipping unreplayable session %s", log_path.stem)
                continue
            with self.registry_lock:
                self.sessions[meta["sessionId"]] = SessionEntry(
                    session=session, dataset_id=meta["datasetId"]
                )
                number = int(meta["sessionId"][1:]) if meta["sessionId"][1:].isdigit() else 0
                self._session_counter = max(self._session_counter, number)


def _cell_doc(session: Session, cell) -> dict:
    """Cell as JSON plus everything the UI needs to render it: plot-ready
    rows for each chart and the cell's question panel."""
    doc = cell.to_dict()
    if cell.kind == CellKind.VISUALIZATION:
        for entry, ins_doc in zip(cell.entries, doc["content"]["insights"]):
            ins_doc["data"] = render_data(session.table, entry.chart)
        if not cell.archived:
            doc["panel"] = [q.to_dict() for q in session.recommendations(cell.id)]
    return doc


def _tree_doc(session: Session) -> dict:
    """Tree snapshot with plot rows on chart-bearing nodes (archived ones
    included) so hover previews never need another request."""
    tree = session.tree_snapshot()
    for node in tree["nodes"]:
        if node["chart"] is not None:
            spec = session.cell(node["id"]).entries[0].chart
            node["data"] = render_data(session.table, spec)
    return tree


def _session_doc(entry: SessionEntry) -> dict:
    session = entry.session
    return {
        "sessionId": session.id,
        "datasetId": entry.dataset_id,
        "dataset": session.table.name,
        "cells": [_cell_doc(session, c) for c in session.notebook_cells()],
        "tree": _tree_doc(session),
    }


def create_app(
    config: EngineConfig = DEFAULT_CONFIG,
    data_dir: str | None = None,
    ui_dir: str | None = None,
) -> FastAPI:
    app = FastAPI(title="edaguide", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"],
    )
    state = ServiceState(config, data_dir=data_dir)
    app.state.engine = state

    @app.exception_handler(EngineError)
    async def engine_error_handler(_request: Request, exc: EngineError):
        detail = {k: v for k, v in exc.details.items()
                  if isinstance(v, (str, int, float, bool, type(None)))}
        return JSONResponse(
            status_code=_status_for(exc),
            content={"code": exc.code, "message": exc.message, "details": detail},
        )

    @app.post("/datasets")
    async def upload_dataset(request: Request):
        content_type = request.headers.get("content-type", "")
        if content_type.startswith("application/json"):
            body = await request.json()
            raw = str(body.get("csv", "")).encode("utf-8")
            name = body.get("name") or "dataset"
        else:
            raw = await request.body()
            name = request.query_params.get("name", "dataset")
        entry = state.add_dataset(raw, name)
        return {
            "datasetId": entry.dataset_id,
            "name": entry.table.name,
            "rowCount": entry.table.row_count,
            "schema": entry.table.schema_dict(),
            "insightCount": len(entry.space.insights),
        }

    @app.get("/datasets/{dataset_id}")
    async def get_dataset(dataset_id: str):
        entry = state.dataset(dataset_id)
        return {
            "datasetId": entry.dataset_id,
            "name": entry.table.name,
            "rowCount": entry.table.row_count,
            "schema": entry.table.schema_dict(),
            "insightCount": len(entry.space.insights),
        }

    @app.post("/sessions")
    async def post_session(request: Request):
        body = await request.json()
        entry = state.create_session(body["datasetId"], body.get("rootSelector"))
        return _session_doc(entry)

    @app.get("/sessions/{session_id}")
    async def get_session(session_id: str):
        return _session_doc(state.session(session_id))

    @app.get("/sessions/{session_id}/cells/{cell_id}/recommendations")
    async def get_recommendations(session_id: str, cell_id: int):
        entry = state.session(session_id)
        questions = entry.session.recommendations(cell_id)
        return {"cellId": cell_id, "questions": [q.to_dict() for q in questions]}

    @app.post("/sessions/{session_id}/cells/{cell_id}/select")
    async def post_select(session_id: str, cell_id: int, request: Request):
        body = await request.json()
        if "questionId" in body:
            event = {"type": "SelectQuestion", "cellId": cell_id,
                     "questionId": body["questionId"]}
        else:
            event = {"type": "SelectAction", "cellId": cell_id,
                     "actionIndex": body.get("actionIndex")}
        cell = state.apply_event(session_id, event)
        entry = state.session(session_id)
        return {"cell": _cell_doc(entry.session, cell),
                "tree": _tree_doc(entry.session)}

    @app.delete("/sessions/{session_id}/cells/{cell_id}")
    async def delete_cell(session_id: str, cell_id: int):
        state.apply_event(session_id, {"type": "Delete", "cellId": cell_id})
        return {"tree": _tree_doc(state.session(session_id).session)}

    @app.post("/sessions/{session_id}/cells/{cell_id}/restore")
    async def restore_cell(session_id: str, cell_id: int):
        state.apply_event(session_id, {"type": "Restore", "cellId": cell_id})
        return {"tree": _tree_doc(state.session(session_id).session)}

    @app.get("/sessions/{session_id}/export")
    async def export_session(session_id: str):
        entry = state.session(session_id)
        return Response(content=entry.session.export_json(),
                        media_type="application/json")

    @app.get("/sessions/{session_id}/tree")
    async def get_tree(session_id: str, format: str = "json"):
        entry = state.session(session_id)
        if format == "dot":
            return Response(content=to_dot(entry.session),
                            media_type="text/vnd.graphviz")
        return _tree_doc(entry.session)

    if ui_dir:
        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")

        @app.get("/")
        async def index():
            return RedirectResponse(url="/ui/")

    return app
