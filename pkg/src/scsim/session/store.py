"""Write-through persistence for datasets, sessions, and nodes.

Layout under the base directory (env SCSIM_DATA_DIR, default
``./scsim-data``):

    datasets/<datasetId>.json
    sessions/<sessionId>/session.json       config, active pointer
    sessions/<sessionId>/journal.jsonl      append-mirrored event log
    sessions/<sessionId>/nodes/<nodeId>.json

The in-memory service is the source of truth while the process lives;
the store exists so state survives restarts and is inspectable.
"""

from __future__ import annotations

import json
import os
from pathlib import Path

ENV_DATA_DIR = "SCSIM_DATA_DIR"
DEFAULT_DIR = "scsim-data"


def _dump(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


class SessionStore:
    def __init__(self, base_dir: str | Path | None = None) -> None:
        if base_dir is None:
            base_dir = os.environ.get(ENV_DATA_DIR, DEFAULT_DIR)
        self.base = Path(base_dir)

    def _session_dir(self, session_id: str) -> Path:
        return self.base / "sessions" / session_id

    # --- datasets ----------------------------------------------------

    def save_dataset(self, dataset_id: str, doc: dict) -> Path:
        path = self.base / "datasets" / f"{dataset_id}.json"
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(_dump(doc) + "\n", encoding="utf-8")
        return path

    def load_dataset(self, dataset_id: str) -> dict | None:
        path = self.base / "datasets" / f"{dataset_id}.json"
        if not path.is_file():
            return None
        return json.loads(path.read_text(encoding="utf-8"))

    # --- sessions ----------------------------------------------------

    def save_session(self, session_id: str, doc: dict) -> Path:
        base = self._session_dir(session_id)
        base.mkdir(parents=True, exist_ok=True)
        journal = doc.get("journal", [])
        (base / "session.json").write_text(
            _dump({k: v for k, v in doc.items() if k != "journal"}) + "\n",
            encoding="utf-8",
        )
        # rewritten whole each time; entries are append-only upstream
        (base / "journal.jsonl").write_text(
            "".join(_dump(entry) + "\n" for entry in journal), encoding="utf-8"
        )
        return base

    def save_node(self, session_id: str, node_doc: dict) -> Path:
        path = self._session_dir(session_id) / "nodes" / f"{node_doc['nodeId']}.json"
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(_dump(node_doc) + "\n", encoding="utf-8")
        return path

    def load_node(self, session_id: str, node_id: str) -> dict | None:
        path = self._session_dir(session_id) / "nodes" / f"{node_id}.json"
        if not path.is_file():
            return None
        return json.loads(path.read_text(encoding="utf-8"))
