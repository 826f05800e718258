"""Deterministic session replay against the mock provider.

Scripts are line-delimited JSON, one step per line. Replay drives the
service core in-process (the same pipeline, locks, and persistence the
HTTP API uses) and evaluates ``expect`` assertions along the way. With
mock fixtures this is fully deterministic, which makes it the backbone of
offline testing.
"""

from __future__ import annotations

import json
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path

from .errors import PagewrightError, ValidationError
from .gateway import ProviderConfig
from .service import ServiceConfig, ServiceCore


@dataclass
class StepOutcome:
    index: int
    op: str
    ok: bool
    detail: str = ""


@dataclass
class ReplayReport:
    ok: bool
    outcomes: list[StepOutcome] = field(default_factory=list)
    final_tree_digest: str | None = None
    project_id: str | None = None
    duration_s: float = 0.0

    def failures(self) -> list[StepOutcome]:
        return [o for o in self.outcomes if not o.ok]

    def summary(self) -> str:
        lines = []
        for outcome in self.outcomes:
            mark = "ok" if outcome.ok else "FAIL"
            detail = f" :: {outcome.detail}" if outcome.detail else ""
            lines.append(f"step {outcome.index:3d} {outcome.op:<14} {mark}{detail}")
        lines.append(f"final tree digest: {self.final_tree_digest}")
        lines.append(f"duration: {self.duration_s:.2f}s")
        return "\n".join(lines)


def load_script(path: Path) -> list[dict]:
    steps = []
    for line_no, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        try:
            step = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path.name}:{line_no}: invalid JSON: {exc}") from exc
        if "op" not in step:
            raise ValidationError(f"{path.name}:{line_no}: step missing 'op'")
        steps.append(step)
    return steps


class SessionReplayer:
    """Executes one script against a fresh service core in mock mode."""

    def __init__(self, fixtures_dir: Path, data_root: Path | None = None, model_id: str = "mock-model"):
        self._own_tmp = data_root is None
        self._tmp = tempfile.TemporaryDirectory() if self._own_tmp else None
        root = Path(self._tmp.name) if self._own_tmp else Path(data_root)
        self.core = ServiceCore(
            ServiceConfig(
                data_root=root,
                provider=ProviderConfig(
                    mode="mock", fixtures_dir=Path(fixtures_dir), model_id=model_id
                ),
                auto_install=False,
                worker_count=1,
            )
        )
        self._project_id: str | None = None
        self._labels: dict[str, str] = {}

    def close(self) -> None:
        self.core.close()
        if self._tmp is not None:
            self._tmp.cleanup()

    def run(self, steps: list[dict]) -> ReplayReport:
        report = ReplayReport(ok=True)
        started = time.monotonic()
        for index, step in enumerate(steps, 1):
            try:
                detail = self._execute(step)
                report.outcomes.append(StepOutcome(index, step["op"], True, detail))
            except PagewrightError as exc:
                report.ok = False
                report.outcomes.append(
                    StepOutcome(index, step["op"], False, f"{exc.code}: {exc.message}")
                )
                break
            except AssertionError as exc:
                report.ok = False
                report.outcomes.append(StepOutcome(index, step["op"], False, str(exc)))
                break
        report.duration_s = time.monotonic() - started
        report.project_id = self._project_id
        if self._project_id is not None:
            report.final_tree_digest = self.core.head_digest(self._project_id)
        return report

    # -- step execution -------------------------------------------------------

    def _execute(self, step: dict) -> str:
        op = step["op"]
        handler = getattr(self, f"_op_{op}", None)
        if handler is None:
            raise ValidationError(f"unknown script op: {op!r}")
        return handler(step) or ""

    def _op_create_project(self, step: dict) -> str:
        project = self.core.create_project(
            step["name"], step.get("context", ""), step.get("profile", "default")
        )
        self._project_id = project.id
        return project.id

    def _op_add_page(self, step: dict) -> str:
        page = self.core.add_page(self._require_project(), step["page"], step.get("description", ""))
        return page.id

    def _op_apply_feature(self, step: dict) -> str:
        result = self.core.apply_feature(self._require_project(), step["feature"])
        return result["snapshot_id"]

    def _op_submit(self, step: dict) -> str:
        ticket = self.core.submit_prompt(
            self._require_project(),
            step["page"],
            step["kind"],
            step["text"],
            target_page_id=step.get("target"),
            label=step.get("label"),
        )
        finished = self.core.wait_for_job(ticket.id, timeout_s=120)
        if finished.state != "done":
            raise AssertionError(f"job failed: {finished.error}")
        result = finished.result or {}
        if step.get("expect_no_files"):
            if "no_files_emitted" not in result.get("flags", []):
                raise AssertionError("expected an empty projection")
        elif result.get("snapshot_id") is None:
            raise AssertionError(
                f"prompt produced no snapshot (flags={result.get('flags')})"
            )
        if step.get("label") and result.get("snapshot_id"):
            self._labels[step["label"]] = result["snapshot_id"]
        return result.get("snapshot_id") or "no-files"

    def _op_rollback(self, step: dict) -> str:
        summary = self.core.rollback(self._require_project())
        return summary["snapshot_id"]

    def _op_checkout(self, step: dict) -> str:
        label = step["label"]
        if label not in self._labels:
            raise ValidationError(f"checkout of unknown label {label!r}")
        summary = self.core.checkout(self._require_project(), self._labels[label])
        return summary["snapshot_id"]

    def _op_expect(self, step: dict) -> str:
        kind = step["assert"]
        project_id = self._require_project()
        if kind == "file_exists":
            paths = self.core.head_files(project_id)
            if step["path"] not in paths:
                raise AssertionError(f"missing file at HEAD: {step['path']}")
        elif kind == "file_absent":
            if step["path"] in self.core.head_files(project_id):
                raise AssertionError(f"file should be absent at HEAD: {step['path']}")
        elif kind == "graph":
            graph = self.core.version_graph(project_id)
            actual = {
                "active": len(graph.active_path) - 1,  # prompts, excluding scaffold
                "branches": len(graph.abandoned_branches),
                "discarded": graph.discarded_count,
            }
            for key in ("active", "branches", "discarded"):
                if key in step and actual[key] != step[key]:
                    raise AssertionError(
                        f"graph.{key} = {actual[key]}, expected {step[key]}"
                    )
        elif kind == "page_status":
            project = self.core.get_project(project_id)
            page = project.page_by_name(step["page"]) or project.page_by_id(step["page"])
            if page is None:
                raise AssertionError(f"unknown page {step['page']!r}")
            if page.status != step["value"]:
                raise AssertionError(
                    f"page {page.name!r} status {page.status!r}, expected {step['value']!r}"
                )
        elif kind == "tree_digest":
            actual = self.core.head_digest(project_id)
            if actual != step["value"]:
                raise AssertionError(f"tree digest {actual}, expected {step['value']}")
        elif kind == "transcript_len":
            if len(self.core.transcript(project_id)) != step["value"]:
                raise AssertionError("transcript length mismatch")
        else:
            raise ValidationError(f"unknown assertion: {kind!r}")
        return kind

    def _require_project(self) -> str:
        if self._project_id is None:
            raise ValidationError("script must create_project before this step")
        return self._project_id


def replay(script_path: Path, fixtures_dir: Path, data_root: Path | None = None) -> ReplayReport:
    steps = load_script(script_path)
    replayer = SessionReplayer(fixtures_dir, data_root)
    try:
        return replayer.run(steps)
    finally:
        replayer.close()
