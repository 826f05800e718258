"""Single-file relational store for all service metadata.

Holds projects, pages, snapshots, the full prompt transcript, and job
tickets. File bytes live in the content-addressed object directory, not
here. Writes are serialized by a store-level lock and committed per
mutation, so any response the API has acknowledged is already durable.
"""

from __future__ import annotations

import json
import sqlite3
import threading
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path

from .errors import ConflictError, NotFoundError
from .model import Page, Project, utc_now

_SCHEMA = """
CREATE TABLE IF NOT EXISTS projects (
    id TEXT PRIMARY KEY,
    name TEXT NOT NULL UNIQUE,
    context_description TEXT NOT NULL,
    stack_profile_id TEXT NOT NULL,
    created_at TEXT NOT NULL,
    head_snapshot TEXT
);
CREATE TABLE IF NOT EXISTS pages (
    id TEXT PRIMARY KEY,
    project_id TEXT NOT NULL REFERENCES projects(id),
    position INTEGER NOT NULL,
    name TEXT NOT NULL,
    description TEXT NOT NULL,
    status TEXT NOT NULL,
    manifest TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS snapshots (
    id TEXT PRIMARY KEY,
    project_id TEXT NOT NULL REFERENCES projects(id),
    parent TEXT,
    tree_digest TEXT NOT NULL,
    prompt_record_id INTEGER,
    label TEXT,
    created_at TEXT NOT NULL,
    seq INTEGER NOT NULL
);
CREATE TABLE IF NOT EXISTS requests (
    id INTEGER PRIMARY KEY AUTOINCREMENT,
    project_id TEXT NOT NULL,
    page_id TEXT,
    kind TEXT NOT NULL,
    messages TEXT NOT NULL,
    injected_paths TEXT NOT NULL,
    model_id TEXT NOT NULL,
    temperature REAL NOT NULL,
    max_tokens INTEGER,
    sent_at TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS responses (
    id INTEGER PRIMARY KEY AUTOINCREMENT,
    request_id INTEGER NOT NULL UNIQUE REFERENCES requests(id),
    text TEXT NOT NULL,
    prompt_tokens INTEGER NOT NULL,
    completion_tokens INTEGER NOT NULL,
    latency_ms INTEGER NOT NULL,
    finish_reason TEXT NOT NULL,
    received_at TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS jobs (
    id TEXT PRIMARY KEY,
    project_id TEXT NOT NULL,
    kind TEXT NOT NULL,
    state TEXT NOT NULL,
    result TEXT,
    error TEXT,
    created_at TEXT NOT NULL,
    updated_at TEXT NOT NULL
);
CREATE INDEX IF NOT EXISTS idx_snapshots_project ON snapshots(project_id, seq);
CREATE INDEX IF NOT EXISTS idx_requests_project ON requests(project_id, id);
"""


@dataclass(frozen=True)
class SnapshotRecord:
    id: str
    project_id: str
    parent: str | None
    tree_digest: str
    prompt_record_id: int | None
    label: str | None
    created_at: str
    seq: int


class Store:
    def __init__(self, db_path: Path):
        db_path.parent.mkdir(parents=True, exist_ok=True)
        self._conn = sqlite3.connect(str(db_path), check_same_thread=False)
        self._conn.row_factory = sqlite3.Row
        self._lock = threading.RLock()
        with self._lock:
            self._conn.executescript(_SCHEMA)
            self._conn.commit()

    def close(self) -> None:
        self._conn.close()

    # -- projects ---------------------------------------------------------

    def create_project(self, project: Project) -> None:
        with self._lock:
            try:
                self._conn.execute(
                    "INSERT INTO projects (id, name, context_description, stack_profile_id,"
                    " created_at, head_snapshot) VALUES (?, ?, ?, ?, ?, ?)",
                    (
                        project.id,
                        project.name,
                        project.context_description,
                        project.stack_profile_id,
                        project.created_at.isoformat(),
                        project.head_snapshot,
                    ),
                )
            except sqlite3.IntegrityError as exc:
                raise ConflictError(f"project named {project.name!r} already exists") from exc
            self._conn.commit()

    def load_project(self, project_id: str) -> Project:
        with self._lock:
            row = self._conn.execute(
                "SELECT * FROM projects WHERE id = ?", (project_id,)
            ).fetchone()
            if row is None:
                raise NotFoundError(f"unknown project: {project_id}")
            pages = self._conn.execute(
                "SELECT * FROM pages WHERE project_id = ? ORDER BY position", (project_id,)
            ).fetchall()
        project = Project(
            id=row["id"],
            name=row["name"],
            context_description=row["context_description"],
            stack_profile_id=row["stack_profile_id"],
            created_at=datetime.fromisoformat(row["created_at"]),
            head_snapshot=row["head_snapshot"],
        )
        for page_row in pages:
            project.pages.append(
                Page(
                    id=page_row["id"],
                    name=page_row["name"],
                    description=page_row["description"],
                    status=page_row["status"],
                    file_manifest=set(json.loads(page_row["manifest"])),
                )
            )
        return project

    def project_id_by_name(self, name: str) -> str | None:
        with self._lock:
            row = self._conn.execute(
                "SELECT id FROM projects WHERE name = ?", (name,)
            ).fetchone()
        return row["id"] if row else None

    def list_project_ids(self) -> list[str]:
        with self._lock:
            rows = self._conn.execute(
                "SELECT id FROM projects ORDER BY created_at, id"
            ).fetchall()
        return [r["id"] for r in rows]

    def set_head(self, project_id: str, snapshot_id: str | None) -> None:
        with self._lock:
            self._conn.execute(
                "UPDATE projects SET head_snapshot = ? WHERE id = ?",
                (snapshot_id, project_id),
            )
            self._conn.commit()

    # -- pages ------------------------------------------------------------

    def insert_page(self, project_id: str, page: Page, position: int) -> None:
        with self._lock:
            self._conn.execute(
                "INSERT INTO pages (id, project_id, position, name, description, status,"
                " manifest) VALUES (?, ?, ?, ?, ?, ?, ?)",
                (
                    page.id,
                    project_id,
                    position,
                    page.name,
                    page.description,
                    page.status,
                    json.dumps(sorted(page.file_manifest)),
                ),
            )
            self._conn.commit()

    def update_page(self, page: Page) -> None:
        with self._lock:
            self._conn.execute(
                "UPDATE pages SET status = ?, manifest = ? WHERE id = ?",
                (page.status, json.dumps(sorted(page.file_manifest)), page.id),
            )
            self._conn.commit()

    # -- snapshots ---------------------------------------------------------

    def insert_snapshot(self, snap: SnapshotRecord) -> None:
        with self._lock:
            self._conn.execute(
                "INSERT INTO snapshots (id, project_id, parent, tree_digest,"
                " prompt_record_id, label, created_at, seq) VALUES (?, ?, ?, ?, ?, ?, ?, ?)",
                (
                    snap.id,
                    snap.project_id,
                    snap.parent,
                    snap.tree_digest,
                    snap.prompt_record_id,
                    snap.label,
                    snap.created_at,
                    snap.seq,
                ),
            )
            self._conn.commit()

    def get_snapshot(self, snapshot_id: str) -> SnapshotRecord:
        with self._lock:
            row = self._conn.execute(
                "SELECT * FROM snapshots WHERE id = ?", (snapshot_id,)
            ).fetchone()
        if row is None:
            raise NotFoundError(f"unknown snapshot: {snapshot_id}")
        return _snapshot_from_row(row)

    def snapshots_for(self, project_id: str) -> list[SnapshotRecord]:
        with self._lock:
            rows = self._conn.execute(
                "SELECT * FROM snapshots WHERE project_id = ? ORDER BY seq", (project_id,)
            ).fetchall()
        return [_snapshot_from_row(r) for r in rows]

    def snapshot_count(self, project_id: str) -> int:
        with self._lock:
            row = self._conn.execute(
                "SELECT COUNT(*) AS n FROM snapshots WHERE project_id = ?", (project_id,)
            ).fetchone()
        return int(row["n"])

    # -- prompt transcript -------------------------------------------------

    def insert_request(
        self,
        project_id: str,
        page_id: str | None,
        kind: str,
        messages_json: str,
        injected_paths_json: str,
        model_id: str,
        temperature: float,
        max_tokens: int | None,
    ) -> int:
        with self._lock:
            cursor = self._conn.execute(
                "INSERT INTO requests (project_id, page_id, kind, messages, injected_paths,"
                " model_id, temperature, max_tokens, sent_at) VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?)",
                (
                    project_id,
                    page_id,
                    kind,
                    messages_json,
                    injected_paths_json,
                    model_id,
                    temperature,
                    max_tokens,
                    utc_now().isoformat(),
                ),
            )
            self._conn.commit()
            return int(cursor.lastrowid)

    def insert_response(
        self,
        request_id: int,
        text: str,
        prompt_tokens: int,
        completion_tokens: int,
        latency_ms: int,
        finish_reason: str,
    ) -> int:
        with self._lock:
            cursor = self._conn.execute(
                "INSERT INTO responses (request_id, text, prompt_tokens, completion_tokens,"
                " latency_ms, finish_reason, received_at) VALUES (?, ?, ?, ?, ?, ?, ?)",
                (
                    request_id,
                    text,
                    prompt_tokens,
                    completion_tokens,
                    latency_ms,
                    finish_reason,
                    utc_now().isoformat(),
                ),
            )
            self._conn.commit()
            return int(cursor.lastrowid)

    def transcript_rows(self, project_id: str) -> list[tuple[sqlite3.Row, sqlite3.Row | None]]:
        with self._lock:
            requests = self._conn.execute(
                "SELECT * FROM requests WHERE project_id = ? ORDER BY id", (project_id,)
            ).fetchall()
            pairs = []
            for request in requests:
                response = self._conn.execute(
                    "SELECT * FROM responses WHERE request_id = ?", (request["id"],)
                ).fetchone()
                pairs.append((request, response))
        return pairs

    def request_count(self, project_id: str) -> int:
        with self._lock:
            row = self._conn.execute(
                "SELECT COUNT(*) AS n FROM requests WHERE project_id = ?", (project_id,)
            ).fetchone()
        return int(row["n"])

    def request_page_ids(self, project_id: str) -> dict[int, str | None]:
        """request id -> page id, for snapshot attribution."""
        with self._lock:
            rows = self._conn.execute(
                "SELECT id, page_id FROM requests WHERE project_id = ?", (project_id,)
            ).fetchall()
        return {int(r["id"]): r["page_id"] for r in rows}

    def all_request_temperatures(self) -> list[float]:
        with self._lock:
            rows = self._conn.execute("SELECT temperature FROM requests").fetchall()
        return [float(r["temperature"]) for r in rows]

    # -- jobs ---------------------------------------------------------------

    def insert_job(self, job_id: str, project_id: str, kind: str, state: str) -> None:
        now = utc_now().isoformat()
        with self._lock:
            self._conn.execute(
                "INSERT INTO jobs (id, project_id, kind, state, created_at, updated_at)"
                " VALUES (?, ?, ?, ?, ?, ?)",
                (job_id, project_id, kind, state, now, now),
            )
            self._conn.commit()

    def update_job(
        self, job_id: str, state: str, result: dict | None = None, error: str | None = None
    ) -> None:
        with self._lock:
            self._conn.execute(
                "UPDATE jobs SET state = ?, result = ?, error = ?, updated_at = ? WHERE id = ?",
                (
                    state,
                    json.dumps(result) if result is not None else None,
                    error,
                    utc_now().isoformat(),
                    job_id,
                ),
            )
            self._conn.commit()

    def get_job(self, job_id: str) -> sqlite3.Row:
        with self._lock:
            row = self._conn.execute("SELECT * FROM jobs WHERE id = ?", (job_id,)).fetchone()
        if row is None:
            raise NotFoundError(f"unknown job: {job_id}")
        return row


def _snapshot_from_row(row: sqlite3.Row) -> SnapshotRecord:
    return SnapshotRecord(
        id=row["id"],
        project_id=row["project_id"],
        parent=row["parent"],
        tree_digest=row["tree_digest"],
        prompt_record_id=row["prompt_record_id"],
        label=row["label"],
        created_at=row["created_at"],
        seq=row["seq"],
    )
