"""Runs the generated application so the user can check its behavior.

Scaffolds the baseline project tree, applies predefined features as canned
projections (no model call), runs install commands, and supervises the two
dev-server processes with readiness probes, a bounded log ring, and
process-group teardown.
"""

from __future__ import annotations

import fnmatch
import hashlib
import logging
import os
import signal
import socket
import subprocess
import threading
import time
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path

from .errors import (
    ConflictError,
    ContractViolation,
    InstallFailed,
    NotFoundError,
    PortConflict,
)
from .model import Project, Workspace, resolve_inside, tree_digest_of, utc_now
from .profiles import ProfileRegistry, StackProfile
from .projector import FileBlock, apply_projection
from .versioning import Snapshot, VersionStore

logger = logging.getLogger(__name__)

SCAFFOLD_LABEL = "scaffold"
DEFAULT_LOG_LINES = 2000
DEFAULT_PORT_RANGE = (4300, 4399)


@dataclass
class StepResult:
    argv: list[str]
    exit_code: int
    output_tail: list[str]


@dataclass
class InstallReport:
    ok: bool
    steps: list[StepResult] = field(default_factory=list)


class RunHandle:
    """Live state of one running generated app (two supervised servers)."""

    def __init__(self, project_id: str, preview_url: str, ports: dict[str, int], log_lines: int):
        self.project_id = project_id
        self.preview_url = preview_url
        self.ports = ports
        self.state = "starting"  # starting | running | failed | stopped
        self.started_at = utc_now().isoformat()
        self.log_buffer: deque[str] = deque(maxlen=log_lines)
        self.exit_codes: dict[str, int | None] = {}
        self._procs: dict[str, subprocess.Popen] = {}
        self._lock = threading.Lock()
        self._stopping = False

    @property
    def pids(self) -> dict[str, int]:
        return {name: proc.pid for name, proc in self._procs.items()}

    def log_tail(self, n: int = 40) -> list[str]:
        with self._lock:
            return list(self.log_buffer)[-n:]

    def append_log(self, server: str, line: str) -> None:
        with self._lock:
            self.log_buffer.append(f"[{server}] {line}")

    def as_dict(self) -> dict:
        return {
            "project_id": self.project_id,
            "state": self.state,
            "preview_url": self.preview_url,
            "ports": self.ports,
            "pids": self.pids,
            "started_at": self.started_at,
            "log_tail": self.log_tail(),
        }


class AppRunner:
    def __init__(
        self,
        versions: VersionStore,
        profiles: ProfileRegistry,
        host: str = "127.0.0.1",
        port_range: tuple[int, int] = DEFAULT_PORT_RANGE,
        readiness_deadline_s: float = 30.0,
        supervision_interval_s: float = 0.25,
        log_lines: int = DEFAULT_LOG_LINES,
    ):
        self.versions = versions
        self.profiles = profiles
        self.host = host
        self.port_range = port_range
        self.readiness_deadline_s = readiness_deadline_s
        self.supervision_interval_s = supervision_interval_s
        self.log_lines = log_lines
        self._handles: dict[str, RunHandle] = {}
        self._registry_lock = threading.Lock()

    # -- project lifecycle ----------------------------------------------------

    def scaffold(self, project: Project) -> Snapshot:
        """Materialize the profile's baseline tree as the root snapshot."""
        if self.versions.store.snapshot_count(project.id) > 0:
            raise ContractViolation(f"project {project.name!r} is already scaffolded")
        profile = self.profiles.get(project.stack_profile_id)
        workspace = Workspace(
            root=project.id, root_dir=self.versions.workspace_dir(project)
        )
        for entry in profile.scaffold_tree:
            workspace.put(entry)
        snapshot = self.versions.commit_snapshot(project, workspace, label=SCAFFOLD_LABEL)
        self.versions.materialize(project, snapshot.id)
        return snapshot

    def apply_predefined_feature(self, project: Project, feature_id: str) -> Snapshot:
        """Apply a built-in, pre-tested projection and commit it; no model call."""
        profile = self.profiles.get(project.stack_profile_id)
        feature = profile.feature(feature_id)
        if feature is None:
            raise NotFoundError(f"unknown predefined feature: {feature_id!r}")
        if feature_id in self._active_labels(project):
            raise ConflictError(f"feature {feature_id!r} is already applied")

        workspace = self.versions.materialize(project, _require_head(project))
        blocks = [
            FileBlock(path=entry.path, content=entry.content.decode("utf-8"))
            for entry in feature.canned_projection
        ]
        apply_projection(workspace, blocks, page=None)
        return self.versions.commit_snapshot(project, workspace, label=feature_id)

    def install(self, project: Project) -> InstallReport:
        """Run the profile's install commands in the workspace, sequentially."""
        profile = self.profiles.get(project.stack_profile_id)
        root = self.versions.workspace_dir(project)
        if not root.is_dir():
            raise ContractViolation("project has no materialized workspace")
        report = InstallReport(ok=True)
        for command in profile.install_commands:
            cwd = resolve_inside(root, command.cwd) if command.cwd != "." else root
            proc = subprocess.run(
                list(command.argv),
                cwd=str(cwd),
                env={**os.environ, **command.env},
                capture_output=True,
                text=True,
            )
            tail = (proc.stdout + proc.stderr).splitlines()[-40:]
            report.steps.append(
                StepResult(argv=list(command.argv), exit_code=proc.returncode, output_tail=tail)
            )
            if proc.returncode != 0:
                raise InstallFailed(
                    f"install command failed ({proc.returncode}): {' '.join(command.argv)}",
                    log_tail=tail,
                )
        return report

    # -- run / stop / status -----------------------------------------------------

    def start(self, project: Project) -> RunHandle:
        profile = self.profiles.get(project.stack_profile_id)
        root = self.versions.workspace_dir(project)
        if not root.is_dir():
            raise ContractViolation("project has no materialized workspace")

        with self._registry_lock:
            existing = self._handles.get(project.id)
            if existing is not None and existing.state in ("starting", "running"):
                raise ContractViolation("app is already running for this project")
            ports = self._allocate_ports()
            tokens = {
                "host": self.host,
                "frontend_port": str(ports["frontend_port"]),
                "backend_port": str(ports["backend_port"]),
            }
            preview = profile.preview_url_template
            for token, value in tokens.items():
                preview = preview.replace("{" + token + "}", value)
            handle = RunHandle(project.id, preview, ports, self.log_lines)
            self._handles[project.id] = handle

        try:
            for name, command in profile.run_commands.items():
                spec = command.substituted(tokens)
                cwd = resolve_inside(root, spec.cwd) if spec.cwd != "." else root
                proc = subprocess.Popen(
                    list(spec.argv),
                    cwd=str(cwd),
                    env={**os.environ, **spec.env},
                    stdout=subprocess.PIPE,
                    stderr=subprocess.STDOUT,
                    text=True,
                    start_new_session=True,
                )
                handle._procs[name] = proc
                threading.Thread(
                    target=self._pump_output, args=(handle, name, proc), daemon=True
                ).start()
        except OSError as exc:
            handle.state = "failed"
            self._terminate_all(handle)
            handle.append_log("runner", f"spawn failed: {exc}")
            return handle

        if self._probe_readiness(profile, handle, tokens):
            handle.state = "running"
        else:
            handle.state = "failed"
            self._terminate_all(handle)

        threading.Thread(target=self._supervise, args=(handle,), daemon=True).start()
        return handle

    def stop(self, project_id: str) -> RunHandle:
        handle = self._handles.get(project_id)
        if handle is None:
            raise NotFoundError("project has never been started")
        handle._stopping = True
        self._terminate_all(handle)
        handle.state = "stopped"
        return handle

    def status(self, project_id: str) -> RunHandle:
        handle = self._handles.get(project_id)
        if handle is None:
            raise NotFoundError("project has never been started")
        self._poll_processes(handle)
        return handle

    def stop_all(self) -> None:
        for project_id in list(self._handles):
            try:
                self.stop(project_id)
            except NotFoundError:
                pass

    # -- internals -------------------------------------------------------------

    def _active_labels(self, project: Project) -> set[str]:
        labels: set[str] = set()
        by_id = {s.id: s for s in self.versions.snapshots(project)}
        current = project.head_snapshot
        while current is not None:
            snap = by_id[current]
            if snap.label:
                labels.add(snap.label)
            current = snap.parent
        return labels

    def _allocate_ports(self) -> dict[str, int]:
        taken = {
            port
            for handle in self._handles.values()
            if handle.state in ("starting", "running")
            for port in handle.ports.values()
        }
        allocated: list[int] = []
        for port in range(self.port_range[0], self.port_range[1] + 1):
            if port in taken or not self._port_free(port):
                continue
            allocated.append(port)
            if len(allocated) == 2:
                return {"frontend_port": allocated[0], "backend_port": allocated[1]}
        raise PortConflict(
            f"no free ports in range {self.port_range[0]}-{self.port_range[1]}"
        )

    def _port_free(self, port: int) -> bool:
        with socket.socket(socket.AF_INET, socket.SOCK_STREAM) as sock:
            sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
            try:
                sock.bind((self.host, port))
                return True
            except OSError:
                return False

    def _probe_readiness(
        self, profile: StackProfile, handle: RunHandle, tokens: dict[str, str]
    ) -> bool:
        deadline = time.monotonic() + self.readiness_deadline_s
        for name, probe in profile.readiness.items():
            port = int(tokens[probe.port_token])
            while True:
                if self._connect_ok(port):
                    break
                proc = handle._procs.get(name)
                if proc is not None and proc.poll() is not None:
                    handle.append_log("runner", f"{name} exited before becoming ready")
                    return False
                if time.monotonic() > deadline:
                    handle.append_log("runner", f"{name} readiness deadline exceeded")
                    return False
                time.sleep(0.05)
        return True

    def _connect_ok(self, port: int) -> bool:
        try:
            with socket.create_connection((self.host, port), timeout=0.25):
                return True
        except OSError:
            return False

    def _pump_output(self, handle: RunHandle, name: str, proc: subprocess.Popen) -> None:
        assert proc.stdout is not None
        for line in proc.stdout:
            handle.append_log(name, line.rstrip("\n"))
        proc.stdout.close()

    def _supervise(self, handle: RunHandle) -> None:
        while handle.state in ("starting", "running"):
            time.sleep(self.supervision_interval_s)
            self._poll_processes(handle)

    def _poll_processes(self, handle: RunHandle) -> None:
        if handle.state not in ("starting", "running"):
            return
        for name, proc in handle._procs.items():
            code = proc.poll()
            if code is not None and not handle._stopping:
                handle.exit_codes[name] = code
                handle.state = "failed"
                handle.append_log("runner", f"{name} exited with code {code}")
                self._terminate_all(handle)
                return

    def _terminate_all(self, handle: RunHandle) -> None:
        for name, proc in handle._procs.items():
            if proc.poll() is not None:
                handle.exit_codes[name] = proc.returncode
                continue
            try:
                os.killpg(os.getpgid(proc.pid), signal.SIGTERM)
            except (ProcessLookupError, PermissionError):
                pass
        deadline = time.monotonic() + 3.0
        for name, proc in handle._procs.items():
            remaining = max(0.1, deadline - time.monotonic())
            try:
                handle.exit_codes[name] = proc.wait(timeout=remaining)
            except subprocess.TimeoutExpired:
                try:
                    os.killpg(os.getpgid(proc.pid), signal.SIGKILL)
                except (ProcessLookupError, PermissionError):
                    pass
                handle.exit_codes[name] = proc.wait()


def scan_workspace(root: Path, ignore_globs: tuple[str, ...] = ()) -> list[tuple[str, str]]:
    """Digest pairs for the files on disk, skipping ignored artifacts.

    Used to verify that installs and runs do not corrupt the source tree:
    the scan digest before and after must match once dependency artifacts
    are excluded.
    """
    pairs: list[tuple[str, str]] = []
    for path in sorted(root.rglob("*")):
        if not path.is_file():
            continue
        rel = path.relative_to(root).as_posix()
        if rel == ".pagewright-tree":
            continue
        if any(fnmatch.fnmatch(rel, glob) for glob in ignore_globs):
            continue
        pairs.append((rel, hashlib.sha256(path.read_bytes()).hexdigest()))
    return pairs


def scan_digest(root: Path, ignore_globs: tuple[str, ...] = ()) -> str:
    return tree_digest_of(scan_workspace(root, ignore_globs))


def _require_head(project: Project) -> str:
    if project.head_snapshot is None:
        raise ContractViolation(f"project {project.name!r} has no snapshots yet")
    return project.head_snapshot
