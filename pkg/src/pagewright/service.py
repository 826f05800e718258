"""Orchestration core behind the HTTP API and the replay harness.

Owns persistence, the per-project writer lock, and the long-running
prompt pipeline (compose -> send -> parse -> project -> commit), which runs
on a worker pool and is observed through polling job tickets.
"""

from __future__ import annotations

import json
import logging
import threading
import time
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .errors import (
    ConflictError,
    NotFoundError,
    PagewrightError,
    ValidationError,
)
from .gateway import ModelGateway, ProviderConfig
from .model import Page, Project
from .profiles import ProfileRegistry
from .projector import apply_projection, parse_response
from .prompts import PromptComposer, PromptKind
from .runner import AppRunner, InstallReport, RunHandle
from .store import Store
from .versioning import ObjectStore, VersionGraph, VersionStore

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ServiceConfig:
    data_root: Path
    provider: ProviderConfig = ProviderConfig(mode="mock", fixtures_dir=Path("."))
    host: str = "127.0.0.1"
    port_range: tuple[int, int] = (4300, 4399)
    api_token: str | None = None
    worker_count: int = 2
    auto_install: bool = True
    extra_profile_dirs: tuple[Path, ...] = ()
    readiness_deadline_s: float = 30.0
    supervision_interval_s: float = 0.25


@dataclass
class JobTicket:
    id: str
    project_id: str
    kind: str
    state: str  # queued | running | done | failed
    result: dict | None = None
    error: str | None = None

    def as_dict(self) -> dict:
        return {
            "id": self.id,
            "project_id": self.project_id,
            "kind": self.kind,
            "state": self.state,
            "result": self.result,
            "error": self.error,
        }


@dataclass
class _ProjectSlot:
    lock: threading.Lock = field(default_factory=threading.Lock)
    busy: bool = False


class ServiceCore:
    def __init__(self, config: ServiceConfig):
        self.config = config
        data_root = Path(config.data_root)
        self.store = Store(data_root / "pagewright.db")
        self.objects = ObjectStore(data_root / "objects")
        self.versions = VersionStore(self.store, self.objects, data_root / "workspaces")
        self.profiles = ProfileRegistry.bundled(list(config.extra_profile_dirs))
        self.composer = PromptComposer(self.profiles)
        self.gateway = ModelGateway(self.store, config.provider)
        self.runner = AppRunner(
            self.versions,
            self.profiles,
            host=config.host,
            port_range=config.port_range,
            readiness_deadline_s=config.readiness_deadline_s,
            supervision_interval_s=config.supervision_interval_s,
        )
        self._executor = ThreadPoolExecutor(max_workers=config.worker_count)
        self._slots: dict[str, _ProjectSlot] = {}
        self._slots_guard = threading.Lock()

    def close(self) -> None:
        self.runner.stop_all()
        self._executor.shutdown(wait=True)
        self.store.close()

    # -- writer-lock plumbing ---------------------------------------------------

    def _slot(self, project_id: str) -> _ProjectSlot:
        with self._slots_guard:
            if project_id not in self._slots:
                self._slots[project_id] = _ProjectSlot()
            return self._slots[project_id]

    def _acquire_busy(self, project_id: str) -> _ProjectSlot:
        slot = self._slot(project_id)
        with self._slots_guard:
            if slot.busy:
                raise ConflictError("another job is running for this project")
            slot.busy = True
        return slot

    def _release_busy(self, slot: _ProjectSlot) -> None:
        with self._slots_guard:
            slot.busy = False

    # -- projects & pages ---------------------------------------------------------

    def create_project(self, name: str, context_description: str, stack_profile_id: str) -> Project:
        """Create, persist, and scaffold a project in one synchronous step."""
        if not self.profiles.has(stack_profile_id):
            raise ValidationError(f"unknown stack profile: {stack_profile_id!r}")
        project = Project.create(name, context_description, stack_profile_id)
        self.store.create_project(project)
        slot = self._acquire_busy(project.id)
        try:
            with slot.lock:
                self.runner.scaffold(project)
                profile = self.profiles.get(stack_profile_id)
                if self.config.auto_install and profile.install_commands:
                    self.runner.install(project)
        finally:
            self._release_busy(slot)
        return project

    def get_project(self, project_id: str) -> Project:
        return self.store.load_project(project_id)

    def find_project(self, name_or_id: str) -> Project:
        by_name = self.store.project_id_by_name(name_or_id)
        return self.store.load_project(by_name or name_or_id)

    def list_projects(self) -> list[Project]:
        return [self.store.load_project(pid) for pid in self.store.list_project_ids()]

    def add_page(self, project_id: str, name: str, description: str) -> Page:
        project = self.get_project(project_id)
        page = project.add_page(name, description)
        self.store.insert_page(project.id, page, position=len(project.pages) - 1)
        return page

    # -- prompt pipeline -----------------------------------------------------------

    def submit_prompt(
        self,
        project_id: str,
        page_id: str | None,
        kind: str | PromptKind,
        text: str,
        target_page_id: str | None = None,
        label: str | None = None,
    ) -> JobTicket:
        """Queue the full generation pipeline; observe it via the ticket."""
        project = self.get_project(project_id)
        try:
            prompt_kind = kind if isinstance(kind, PromptKind) else PromptKind.parse(kind)
        except ValueError as exc:
            raise ValidationError(str(exc)) from exc
        if prompt_kind in (PromptKind.PREDEFINED, PromptKind.OTHER):
            raise ValidationError(f"kind {prompt_kind.value} cannot be submitted directly")
        if not text.strip():
            raise ValidationError("prompt text must be non-empty")
        page = self._require_page(project, page_id)
        target = None
        if prompt_kind is PromptKind.TRANSITION:
            if target_page_id is None:
                raise ValidationError("transition prompts require target_page_id")
            target = self._require_page(project, target_page_id)

        slot = self._acquire_busy(project.id)
        ticket = JobTicket(
            id=uuid.uuid4().hex[:12],
            project_id=project.id,
            kind=prompt_kind.value,
            state="queued",
        )
        self.store.insert_job(ticket.id, project.id, ticket.kind, ticket.state)
        self._executor.submit(
            self._run_pipeline, slot, ticket.id, project.id, page.id,
            target.id if target else None, prompt_kind, text, label,
        )
        return ticket

    def _run_pipeline(
        self,
        slot: _ProjectSlot,
        ticket_id: str,
        project_id: str,
        page_id: str,
        target_page_id: str | None,
        kind: PromptKind,
        text: str,
        label: str | None,
    ) -> None:
        try:
            with slot.lock:
                self.store.update_job(ticket_id, "running")
                result = self._execute_prompt(project_id, page_id, target_page_id, kind, text, label)
                self.store.update_job(ticket_id, "done", result=result)
        except PagewrightError as exc:
            logger.info("job %s failed: %s", ticket_id, exc.message)
            self._mark_page_failed(project_id, page_id, kind)
            self.store.update_job(ticket_id, "failed", error=f"{exc.code}: {exc.message}")
        except Exception as exc:  # pragma: no cover - defensive
            logger.exception("job %s crashed", ticket_id)
            self.store.update_job(ticket_id, "failed", error=f"internal-error: {exc}")
        finally:
            self._release_busy(slot)

    def _execute_prompt(
        self,
        project_id: str,
        page_id: str,
        target_page_id: str | None,
        kind: PromptKind,
        text: str,
        label: str | None,
    ) -> dict:
        project = self.get_project(project_id)
        page = self._require_page(project, page_id)
        head = self.versions.head_workspace(project)

        if kind is PromptKind.INITIAL:
            composed = self.composer.page_creation(project, page, head)
        elif kind is PromptKind.TRANSITION:
            target = self._require_page(project, target_page_id)
            composed = self.composer.transition(project, page, target, text, head)
        else:
            composed = self.composer.refinement(project, page, text, kind, head)

        response = self.gateway.send(project.id, composed)
        parsed = parse_response(response.text)

        flags: list[str] = []
        snapshot_id = None
        applied: list[tuple[str, str]] = []
        rejected: list[tuple[str, str]] = []

        if parsed.blocks:
            workspace = self.versions.materialize(project, project.head_snapshot)
            projection = apply_projection(workspace, parsed.blocks, page, parsed.narrative)
            applied, rejected = projection.applied, projection.rejected
            if projection.is_empty:
                flags.append("no_files_emitted")
            else:
                try:
                    snapshot = self.versions.commit_snapshot(
                        project, workspace, prompt_record_id=response.request_id, label=label
                    )
                    snapshot_id = snapshot.id
                    if page.status != "generated":
                        page.status = "generated"
                    self.store.update_page(page)
                except PagewrightError as exc:
                    if exc.code != "no-change":
                        raise
                    flags.append("no_change")
                    self.store.update_page(page)  # manifest may have gained paths
        else:
            flags.append("no_files_emitted")

        return {
            "snapshot_id": snapshot_id,
            "narrative": parsed.narrative,
            "applied": [list(pair) for pair in applied],
            "rejected": [list(pair) for pair in rejected],
            "warnings": parsed.warnings,
            "flags": flags,
            "request_id": response.request_id,
        }

    def _mark_page_failed(self, project_id: str, page_id: str, kind: PromptKind) -> None:
        if kind is not PromptKind.INITIAL:
            return
        try:
            project = self.get_project(project_id)
            page = project.page_by_id(page_id)
            if page is not None and page.status == "pending":
                page.status = "failed"
                self.store.update_page(page)
        except PagewrightError:
            pass

    def get_job(self, ticket_id: str) -> JobTicket:
        row = self.store.get_job(ticket_id)
        return JobTicket(
            id=row["id"],
            project_id=row["project_id"],
            kind=row["kind"],
            state=row["state"],
            result=json.loads(row["result"]) if row["result"] else None,
            error=row["error"],
        )

    def wait_for_job(self, ticket_id: str, timeout_s: float = 60.0) -> JobTicket:
        """Poll a ticket to completion; used by the replay harness and tests."""
        deadline = time.monotonic() + timeout_s
        while True:
            ticket = self.get_job(ticket_id)
            if ticket.state in ("done", "failed"):
                return ticket
            if time.monotonic() > deadline:
                raise PagewrightError(f"job {ticket_id} did not finish within {timeout_s}s")
            time.sleep(0.01)

    # -- version operations ----------------------------------------------------------

    def rollback(self, project_id: str) -> dict:
        project = self.get_project(project_id)
        slot = self._acquire_busy(project.id)
        try:
            with slot.lock:
                workspace = self.versions.rollback(project)
        finally:
            self._release_busy(slot)
        return self._snapshot_summary(project, workspace.tree_digest)

    def checkout(self, project_id: str, snapshot_id: str) -> dict:
        project = self.get_project(project_id)
        slot = self._acquire_busy(project.id)
        try:
            with slot.lock:
                workspace = self.versions.checkout(project, snapshot_id)
        finally:
            self._release_busy(slot)
        return self._snapshot_summary(project, workspace.tree_digest)

    def apply_feature(self, project_id: str, feature_id: str) -> dict:
        project = self.get_project(project_id)
        slot = self._acquire_busy(project.id)
        try:
            with slot.lock:
                snapshot = self.runner.apply_predefined_feature(project, feature_id)
        finally:
            self._release_busy(slot)
        return {"snapshot_id": snapshot.id, "label": snapshot.label, "tree_digest": snapshot.tree_digest}

    def version_graph(self, project_id: str) -> VersionGraph:
        return self.versions.version_graph(self.get_project(project_id))

    def head_files(self, project_id: str) -> list[str]:
        project = self.get_project(project_id)
        if project.head_snapshot is None:
            return []
        return self.versions.head_workspace(project).paths()

    def head_digest(self, project_id: str) -> str | None:
        project = self.get_project(project_id)
        if project.head_snapshot is None:
            return None
        return self.store.get_snapshot(project.head_snapshot).tree_digest

    def transcript(self, project_id: str):
        self.get_project(project_id)  # 404 on unknown id
        return self.gateway.transcript(project_id)

    # -- runner delegation ---------------------------------------------------------

    def run(self, project_id: str) -> RunHandle:
        return self.runner.start(self.get_project(project_id))

    def stop(self, project_id: str) -> RunHandle:
        self.get_project(project_id)
        return self.runner.stop(project_id)

    def run_status(self, project_id: str) -> RunHandle:
        self.get_project(project_id)
        return self.runner.status(project_id)

    def install(self, project_id: str) -> InstallReport:
        return self.runner.install(self.get_project(project_id))

    # -- helpers ----------------------------------------------------------------------

    def _require_page(self, project: Project, page_id: str | None) -> Page:
        if page_id is None:
            raise ValidationError("page_id is required")
        page = project.page_by_id(page_id) or project.page_by_name(page_id)
        if page is None:
            raise NotFoundError(f"unknown page: {page_id}")
        return page

    def _snapshot_summary(self, project: Project, tree_digest: str) -> dict:
        snap = self.store.get_snapshot(project.head_snapshot)
        return {
            "snapshot_id": snap.id,
            "parent": snap.parent,
            "label": snap.label,
            "tree_digest": tree_digest,
        }

    def project_dict(self, project: Project) -> dict:
        profile = self.profiles.get(project.stack_profile_id)
        return {
            "id": project.id,
            "name": project.name,
            "context_description": project.context_description,
            "stack_profile_id": project.stack_profile_id,
            "created_at": project.created_at.isoformat(),
            "head_snapshot": project.head_snapshot,
            "pages": [
                {
                    "id": p.id,
                    "name": p.name,
                    "description": p.description,
                    "status": p.status,
                    "file_manifest": sorted(p.file_manifest),
                }
                for p in project.pages
            ],
            "predefined_features": [
                {"id": f.id, "description": f.description}
                for f in profile.predefined_features
            ],
        }
