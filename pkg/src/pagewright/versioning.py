"""Content-addressed snapshot store with single-step rollback.

Every applied model response commits a full-tree snapshot: file blobs and a
tree object, both stored by digest so unchanged content is shared between
snapshots. Rollback moves HEAD to the parent and re-materializes the
workspace bit-exactly; bypassed snapshots are never deleted and stay in
the version graph as abandoned branches.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path

from .errors import AtRootError, ContractViolation, NoChangeError, NotFoundError
from .model import (
    FileEntry,
    Project,
    Workspace,
    canonical_tree_bytes,
    resolve_inside,
    utc_now,
)
from .store import SnapshotRecord, Store

_TREE_MARKER = ".pagewright-tree"


class ObjectStore:
    """Blob and tree objects on disk, addressed as ``objects/<2 hex>/<rest>``."""

    def __init__(self, root: Path):
        self.root = root
        root.mkdir(parents=True, exist_ok=True)

    def _path_for(self, digest: str) -> Path:
        return self.root / digest[:2] / digest[2:]

    def put_blob(self, content: bytes) -> str:
        digest = hashlib.sha256(content).hexdigest()
        target = self._path_for(digest)
        if not target.exists():
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_bytes(content)
        return digest

    def get_blob(self, digest: str) -> bytes:
        target = self._path_for(digest)
        if not target.exists():
            raise NotFoundError(f"missing object: {digest}")
        return target.read_bytes()

    def has(self, digest: str) -> bool:
        return self._path_for(digest).exists()

    def put_tree(self, pairs: list[tuple[str, str]]) -> str:
        return self.put_blob(canonical_tree_bytes(pairs))

    def get_tree(self, tree_digest: str) -> list[tuple[str, str]]:
        """Parse a tree object back into (path, blob digest) pairs."""
        pairs: list[tuple[str, str]] = []
        for line in self.get_blob(tree_digest).decode("utf-8").splitlines():
            if line:
                pairs.append((line[66:], line[:64]))
        return pairs

    def object_count(self) -> int:
        return sum(1 for p in self.root.glob("*/*") if p.is_file())


@dataclass(frozen=True)
class Snapshot:
    id: str
    project_id: str
    parent: str | None
    tree_digest: str
    prompt_record_id: int | None
    label: str | None
    created_at: str
    seq: int


@dataclass
class VersionGraph:
    nodes: list[Snapshot]
    head: str | None
    root: str | None
    active_path: list[str]  # snapshot ids, root first
    abandoned_branches: list[list[str]]  # each chain ordered top-down

    @property
    def discarded_count(self) -> int:
        return sum(len(branch) for branch in self.abandoned_branches)


class VersionStore:
    def __init__(self, store: Store, objects: ObjectStore, workspaces_dir: Path):
        self.store = store
        self.objects = objects
        self.workspaces_dir = workspaces_dir
        workspaces_dir.mkdir(parents=True, exist_ok=True)

    # -- workspace materialization -----------------------------------------

    def workspace_dir(self, project: Project) -> Path:
        return self.workspaces_dir / project.id

    def workspace_at(self, project: Project, snapshot_id: str) -> Workspace:
        """Build the in-memory workspace for a snapshot (no disk writes)."""
        snap = self._snapshot(project, snapshot_id)
        workspace = Workspace(root=project.id, root_dir=self.workspace_dir(project))
        for path, digest in self._tree_pairs(snap.tree_digest):
            workspace.put(FileEntry(path=path, content=self.objects.get_blob(digest)))
        return workspace

    def head_workspace(self, project: Project) -> Workspace:
        if project.head_snapshot is None:
            raise ContractViolation(f"project {project.name!r} has no snapshots yet")
        return self.workspace_at(project, project.head_snapshot)

    def materialize(self, project: Project, snapshot_id: str) -> Workspace:
        """Sync the project's working directory to a snapshot, bit-exactly.

        Only paths tracked by the previous materialization are removed;
        untracked artifacts (installed dependencies and the like) are left
        alone.
        """
        workspace = self.workspace_at(project, snapshot_id)
        root_dir = self.workspace_dir(project)
        root_dir.mkdir(parents=True, exist_ok=True)
        marker = root_dir / _TREE_MARKER

        previous: dict[str, str] = {}
        if marker.exists():
            prev_digest = marker.read_text(encoding="utf-8").strip()
            if self.objects.has(prev_digest):
                previous = dict(self._tree_pairs(prev_digest))

        for stale in set(previous) - set(workspace.files):
            target = resolve_inside(root_dir, stale)
            target.unlink(missing_ok=True)
            _prune_empty_dirs(target.parent, root_dir)

        for path, entry in workspace.files.items():
            target = resolve_inside(root_dir, path)
            if previous.get(path) == entry.digest and target.exists():
                continue
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_bytes(entry.content)

        marker.write_text(workspace.tree_digest + "\n", encoding="utf-8")
        return workspace

    def mark_materialized(self, project: Project, tree_digest: str) -> None:
        """Record that the working directory already matches *tree_digest*.

        Used after in-place projections, which write through to disk as they
        apply.
        """
        marker = self.workspace_dir(project) / _TREE_MARKER
        marker.parent.mkdir(parents=True, exist_ok=True)
        marker.write_text(tree_digest + "\n", encoding="utf-8")

    # -- snapshot operations -------------------------------------------------

    def commit_snapshot(
        self,
        project: Project,
        workspace: Workspace,
        prompt_record_id: int | None = None,
        label: str | None = None,
    ) -> Snapshot:
        """Store the workspace as a new snapshot and advance HEAD.

        Caller must hold the project writer lock. Refuses to commit a tree
        identical to the current head.
        """
        tree_digest = workspace.tree_digest
        head = self._head(project)
        if head is not None and head.tree_digest == tree_digest:
            raise NoChangeError("workspace is identical to the current head snapshot")
        if head is None and self.store.snapshot_count(project.id) > 0:
            raise ContractViolation("project has snapshots but no head")

        for entry in workspace.files.values():
            if not self.objects.has(entry.digest):
                self.objects.put_blob(entry.content)
        self.objects.put_tree([(p, e.digest) for p, e in workspace.files.items()])

        seq = self.store.snapshot_count(project.id)
        parent_id = head.id if head is not None else None
        raw = f"{parent_id}|{tree_digest}|{prompt_record_id}|{label}|{seq}"
        snapshot = Snapshot(
            id=hashlib.sha256(raw.encode("utf-8")).hexdigest()[:16],
            project_id=project.id,
            parent=parent_id,
            tree_digest=tree_digest,
            prompt_record_id=prompt_record_id,
            label=label,
            created_at=utc_now().isoformat(),
            seq=seq,
        )
        self.store.insert_snapshot(_to_record(snapshot))
        self.store.set_head(project.id, snapshot.id)
        project.head_snapshot = snapshot.id
        self.mark_materialized(project, tree_digest)
        return snapshot

    def rollback(self, project: Project) -> Workspace:
        """Move HEAD to its parent and restore that workspace bit-exactly."""
        head = self._head(project)
        if head is None:
            raise ContractViolation("project has no snapshots")
        if head.parent is None:
            raise AtRootError("already at the scaffold snapshot")
        return self._move_head(project, head.parent)

    def checkout(self, project: Project, snapshot_id: str) -> Workspace:
        """Move HEAD to an arbitrary snapshot; later commits branch from it."""
        self._snapshot(project, snapshot_id)  # existence + ownership check
        return self._move_head(project, snapshot_id)

    def _move_head(self, project: Project, snapshot_id: str) -> Workspace:
        target = self._snapshot(project, snapshot_id)
        workspace = self.materialize(project, snapshot_id)
        if workspace.tree_digest != target.tree_digest:
            raise ContractViolation(
                f"materialized digest {workspace.tree_digest} does not match "
                f"snapshot {target.tree_digest}"
            )
        self.store.set_head(project.id, snapshot_id)
        project.head_snapshot = snapshot_id
        self._reconcile_pages(project, workspace)
        return workspace

    def _reconcile_pages(self, project: Project, head_workspace: Workspace) -> None:
        """After a head move: drop dangling manifest paths, recompute status.

        A page counts as generated iff a snapshot on the active path is
        attributed to it; pages whose generation was rolled away return to
        pending and can be created again.
        """
        attributed = self._attributed_page_ids(project)
        head_paths = set(head_workspace.files)
        for page in project.pages:
            page.reconcile_manifest(head_paths)
            if page.id in attributed:
                page.status = "generated"
            elif page.status == "generated":
                page.status = "pending"
            self.store.update_page(page)

    def _attributed_page_ids(self, project: Project) -> set[str]:
        page_by_request = self.store.request_page_ids(project.id)
        by_id = {s.id: s for s in self.snapshots(project)}
        attributed: set[str] = set()
        current = project.head_snapshot
        while current is not None:
            snap = by_id[current]
            if snap.prompt_record_id is not None:
                page_id = page_by_request.get(snap.prompt_record_id)
                if page_id:
                    attributed.add(page_id)
            current = snap.parent
        return attributed

    # -- graph ----------------------------------------------------------------

    def snapshots(self, project: Project) -> list[Snapshot]:
        return [_from_record(r) for r in self.store.snapshots_for(project.id)]

    def version_graph(self, project: Project) -> VersionGraph:
        nodes = self.snapshots(project)
        return build_version_graph(nodes, project.head_snapshot)

    # -- internals --------------------------------------------------------------

    def _tree_pairs(self, tree_digest: str) -> list[tuple[str, str]]:
        return self.objects.get_tree(tree_digest)

    def _head(self, project: Project) -> Snapshot | None:
        if project.head_snapshot is None:
            return None
        return _from_record(self.store.get_snapshot(project.head_snapshot))

    def _snapshot(self, project: Project, snapshot_id: str) -> Snapshot:
        record = self.store.get_snapshot(snapshot_id)
        if record.project_id != project.id:
            raise NotFoundError(f"snapshot {snapshot_id} does not belong to this project")
        return _from_record(record)


def build_version_graph(nodes: list[Snapshot], head: str | None) -> VersionGraph:
    """Compute the active path and the abandoned chains of a snapshot tree.

    An abandoned branch is a maximal chain of off-path nodes: it starts
    where its parent is on the active path (or is a fork among abandoned
    nodes) and runs down to a leaf or the next fork. Branches are ordered
    by the creation sequence of their first node.
    """
    by_id = {node.id: node for node in nodes}
    children: dict[str, list[str]] = {node.id: [] for node in nodes}
    root: str | None = None
    for node in nodes:
        if node.parent is None:
            root = node.id
        else:
            children[node.parent].append(node.id)
    for kids in children.values():
        kids.sort(key=lambda i: by_id[i].seq)

    active: list[str] = []
    current = head
    while current is not None:
        active.append(current)
        current = by_id[current].parent
    active.reverse()
    on_path = set(active)

    starts = [
        node.id
        for node in nodes
        if node.id not in on_path
        and (
            node.parent is None
            or node.parent in on_path
            or len(children[node.parent]) != 1
        )
    ]
    starts.sort(key=lambda i: by_id[i].seq)

    branches: list[list[str]] = []
    for start in starts:
        chain = [start]
        current = start
        while len(children[current]) == 1:
            current = children[current][0]
            chain.append(current)
        branches.append(chain)

    return VersionGraph(
        nodes=sorted(nodes, key=lambda n: n.seq),
        head=head,
        root=root,
        active_path=active,
        abandoned_branches=branches,
    )


def _prune_empty_dirs(directory: Path, stop: Path) -> None:
    try:
        while directory != stop and directory.is_dir() and not any(directory.iterdir()):
            directory.rmdir()
            directory = directory.parent
    except OSError:
        pass


def _to_record(snapshot: Snapshot) -> SnapshotRecord:
    return SnapshotRecord(**snapshot.__dict__)


def _from_record(record: SnapshotRecord) -> Snapshot:
    return Snapshot(**record.__dict__)
