"""HTTP JSON API over the session service.

All analytics happen server side; clients receive ready-to-render
payloads. A static token (env SCSIM_API_TOKEN) optionally guards every
route; when unset the API is open, which is the expected mode for
local use.
"""

from __future__ import annotations

import logging
import os
import threading
from pathlib import Path

from fastapi import Body, Depends, FastAPI, Header, HTTPException, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles

from ..errors import (
    DegenerateChance,
    EdgeAbsent,
    InvalidConfig,
    InvalidReference,
    MissingFile,
    NodeNotSimulated,
    ParseError,
    PolicyFailure,
    ScsimError,
    TransportError,
    UnknownCompany,
    UnknownFeature,
    UnknownMetric,
    UnknownModel,
    UnknownNode,
    UnknownSession,
    UnknownView,
)
from ..ingest import dataset_from_doc, dataset_from_strings
from .service import Adjustment, RunState, SessionConfig, SessionService

log = logging.getLogger(__name__)

ENV_API_TOKEN = "SCSIM_API_TOKEN"

_STATUS_BY_TYPE = (
    ((UnknownSession, UnknownNode, UnknownCompany, UnknownView, UnknownMetric,
      UnknownFeature, UnknownModel, MissingFile), 404),
    ((NodeNotSimulated,), 409),
    ((TransportError, PolicyFailure), 502),
    ((InvalidConfig, InvalidReference, ParseError, EdgeAbsent, DegenerateChance), 400),
)


def _status_for(error: ScsimError) -> int:
    for types, status in _STATUS_BY_TYPE:
        if isinstance(error, types):
            return status
    return 400


def require_token(authorization: str | None = Header(default=None)) -> None:
    token = os.environ.get(ENV_API_TOKEN)
    if not token:
        return
    if authorization != f"Bearer {token}":
        raise HTTPException(status_code=401, detail="missing or wrong API token")


def create_app(service: SessionService | None = None, static_dir: str | None = None) -> FastAPI:
    service = service or SessionService()
    app = FastAPI(title="scsim", version="0.1.0", dependencies=[Depends(require_token)])
    app.state.service = service
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(ScsimError)
    async def scsim_error_handler(_: Request, error: ScsimError) -> JSONResponse:
        return JSONResponse(
            status_code=_status_for(error),
            content={"error": type(error).__name__, "detail": str(error)},
        )

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok"}

    @app.post("/datasets")
    def post_dataset(payload: dict = Body(...)) -> dict:
        if "doc" in payload:
            dataset = dataset_from_doc(payload["doc"])
        else:
            dataset = dataset_from_strings(
                payload.get("companies", ""),
                payload.get("edges", ""),
                payload.get("knowledge", ""),
            )
        dataset_id = service.add_dataset(dataset)
        return {
            "datasetId": dataset_id,
            "companies": len(dataset.companies),
            "timestamps": dataset.n_timestamps,
            "features": list(dataset.feature_names),
        }

    @app.post("/sessions")
    def post_session(payload: dict = Body(...)) -> dict:
        config = SessionConfig.from_doc(payload.get("config", {}))
        session_id = service.create_session(payload["datasetId"], config)
        return {"sessionId": session_id, "tree": service.tree_doc(session_id)}

    @app.post("/sessions/import")
    def post_import(payload: dict = Body(...)) -> dict:
        session_id = service.import_log(payload["log"])
        return {"sessionId": session_id, "tree": service.tree_doc(session_id)}

    @app.post("/sessions/{session_id}/run")
    def post_run(session_id: str, payload: dict = Body(default={})) -> dict:
        from_node = payload.get("fromNode")
        turns = payload.get("turns")
        wait = payload.get("wait", True)
        if wait:
            run = service.run_simulation(session_id, from_node, turns)
            return run.to_doc()
        session = service.session(session_id)
        with session.lock:
            run = RunState(run_id=f"r{len(session.runs) + 1}")
            session.runs[run.run_id] = run

        def worker() -> None:
            try:
                service.run_simulation(session_id, from_node, turns, run_id=run.run_id)
            except Exception as e:  # noqa: BLE001 - surfaced via run state
                log.warning("background run %s failed: %s", run.run_id, e)

        threading.Thread(target=worker, daemon=True).start()
        return run.to_doc()

    @app.get("/sessions/{session_id}/runs/{run_id}")
    def get_run(session_id: str, run_id: str) -> dict:
        return service.run_state(session_id, run_id).to_doc()

    @app.get("/sessions/{session_id}/tree")
    def get_tree(session_id: str) -> dict:
        return service.tree_doc(session_id)

    @app.get("/sessions/{session_id}/nodes/{node_id}/view/{kind}")
    def get_view(session_id: str, node_id: str, kind: str, request: Request) -> dict:
        return service.fetch_view(session_id, node_id, kind, dict(request.query_params))

    @app.post("/sessions/{session_id}/nodes/{node_id}/adjustments")
    def post_adjustment(session_id: str, node_id: str, payload: dict = Body(...)) -> dict:
        staged = service.stage_adjustment(
            session_id, node_id, Adjustment.from_dict(payload)
        )
        return {"nodeId": node_id, "staged": [a.to_dict() for a in staged]}

    @app.get("/sessions/{session_id}/nodes/{node_id}/adjustments")
    def get_adjustments(session_id: str, node_id: str) -> dict:
        staged = service.staged_adjustments(session_id, node_id)
        return {"nodeId": node_id, "staged": [a.to_dict() for a in staged]}

    @app.post("/sessions/{session_id}/nodes/{node_id}/adjustments:apply")
    def post_apply(session_id: str, node_id: str) -> dict:
        new_node = service.apply_adjustments(session_id, node_id)
        return {"nodeId": new_node, "tree": service.tree_doc(session_id)}

    @app.post("/sessions/{session_id}/nodes/{node_id}/adjustments:reset")
    def post_reset(session_id: str, node_id: str) -> dict:
        service.reset_adjustments(session_id, node_id)
        return {"nodeId": node_id, "staged": []}

    @app.put("/sessions/{session_id}/knowledge")
    def put_knowledge(session_id: str, payload: dict = Body(...)) -> dict:
        service.knowledge_update(session_id, payload["scope"], payload.get("text", ""))
        return {"scope": payload["scope"]}

    @app.get("/sessions/{session_id}/export")
    def get_export(session_id: str) -> PlainTextResponse:
        text = service.export_log(session_id)
        return PlainTextResponse(
            text,
            media_type="application/x-ndjson",
            headers={"Content-Disposition": "attachment; filename=session-log.jsonl"},
        )

    static = Path(static_dir) if static_dir else Path("frontend") / "dist"
    if static.is_dir():
        app.mount("/ui", StaticFiles(directory=str(static), html=True), name="ui")

    return app


app = create_app()
