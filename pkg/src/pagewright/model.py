"""Core domain entities: projects, pages, workspace file trees.

Everything here is plain data plus validation. Paths are the security
boundary of the whole system: every file a model response may write goes
through :func:`normalize_path` first, and the workspace digest defined here
is the identity used by the snapshot store.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from .errors import ConflictError, PathSafetyError, ValidationError

# sha256 of zero bytes: digest of a workspace with no files.
EMPTY_TREE_DIGEST = hashlib.sha256(b"").hexdigest()

_MAX_PATH_LEN = 4096
_MAX_SEGMENT_LEN = 255

# Percent-encodings of '.', '/', '\' are rejected outright so nothing downstream
# can decode them back into traversal characters.
_ENCODED_SEPARATOR_RE = re.compile(r"%(2e|2f|5c)", re.IGNORECASE)
_DRIVE_RE = re.compile(r"^[A-Za-z]:")


def _hash_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def normalize_path(raw: str) -> str:
    """Normalize a workspace-relative path, raising :class:`PathSafetyError`.

    Accepts forward or backward slashes, collapses ``.`` segments and
    duplicate separators, and rejects anything that could reach outside the
    workspace root: absolute paths, drive letters, ``..`` segments, control
    characters, and percent-encoded separators.

    Idempotent: a normalized path passes through unchanged.
    """
    if not isinstance(raw, str) or raw == "":
        raise PathSafetyError("empty path", reason="empty")
    if len(raw) > _MAX_PATH_LEN:
        raise PathSafetyError("path too long", reason="too-long")
    if any(ord(c) < 0x20 or ord(c) == 0x7F for c in raw):
        raise PathSafetyError(
            f"control character in path: {raw!r}", reason="control-char"
        )
    if _ENCODED_SEPARATOR_RE.search(raw):
        raise PathSafetyError(
            f"percent-encoded separator in path: {raw!r}", reason="encoded-separator"
        )

    candidate = raw.replace("\\", "/")
    if candidate.startswith("/"):
        raise PathSafetyError(f"absolute path: {raw!r}", reason="absolute-path")
    if _DRIVE_RE.match(candidate):
        raise PathSafetyError(f"drive-letter path: {raw!r}", reason="absolute-path")

    segments = []
    for segment in candidate.split("/"):
        if segment in ("", "."):
            continue
        if segment == "..":
            raise PathSafetyError(
                f"parent segment in path: {raw!r}", reason="parent-segment"
            )
        if len(segment) > _MAX_SEGMENT_LEN:
            raise PathSafetyError(f"segment too long: {raw!r}", reason="too-long")
        segments.append(segment)

    if not segments:
        raise PathSafetyError(f"path has no segments: {raw!r}", reason="empty")
    return "/".join(segments)


def resolve_inside(root: Path, relative: str) -> Path:
    """Join *relative* (already normalized) onto *root* and verify containment.

    Final line of defence before any disk write: resolves symlinks and
    asserts the result is strictly inside *root*.
    """
    target = (root / relative).resolve()
    root_resolved = root.resolve()
    if root_resolved != target and root_resolved not in target.parents:
        raise PathSafetyError(
            f"path escapes workspace root: {relative!r}", reason="escapes-root"
        )
    return target


def utc_now() -> datetime:
    return datetime.now(timezone.utc)


def _short_hash(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:10]


@dataclass(frozen=True)
class FileEntry:
    """One workspace file: normalized relative path, content bytes, digest."""

    path: str
    content: bytes
    digest: str = field(default="")

    def __post_init__(self):
        object.__setattr__(self, "path", normalize_path(self.path))
        object.__setattr__(self, "digest", _hash_bytes(self.content))

    @property
    def text(self) -> str:
        return self.content.decode("utf-8")


@dataclass
class Workspace:
    """The projected file tree of a generated application.

    ``root`` is a project-scoped identity; ``root_dir`` is the optional disk
    location this workspace is materialized at. The digest depends only on
    the file map, never on insertion order or disk state.
    """

    root: str
    files: dict[str, FileEntry] = field(default_factory=dict)
    root_dir: Path | None = None

    def put(self, entry: FileEntry) -> None:
        self.files[entry.path] = entry

    def remove(self, path: str) -> None:
        self.files.pop(path, None)

    def get(self, path: str) -> FileEntry | None:
        return self.files.get(path)

    def paths(self) -> list[str]:
        return sorted(self.files)

    @property
    def tree_digest(self) -> str:
        return workspace_tree_digest(self)

    def copy(self) -> "Workspace":
        return Workspace(root=self.root, files=dict(self.files), root_dir=self.root_dir)


def workspace_tree_digest(workspace: Workspace) -> str:
    """Deterministic digest over sorted ``(path, digest)`` pairs."""
    return tree_digest_of(
        (path, entry.digest) for path, entry in workspace.files.items()
    )


def tree_digest_of(pairs) -> str:
    """Digest of an iterable of ``(path, content_digest)`` pairs."""
    return _hash_bytes(canonical_tree_bytes(pairs))


def canonical_tree_bytes(pairs) -> bytes:
    """Canonical serialization a tree digest is computed over.

    One line per file, sorted by path. Doubles as the stored tree object, so
    a tree object's id equals the workspace digest it encodes.
    """
    lines = [f"{digest}  {path}\n" for path, digest in sorted(pairs)]
    return "".join(lines).encode("utf-8")


PAGE_STATUSES = ("pending", "generated", "failed")


@dataclass
class Page:
    """A named, described web screen and the set of files generated for it."""

    id: str
    name: str
    description: str
    file_manifest: set[str] = field(default_factory=set)
    status: str = "pending"

    def reconcile_manifest(self, head_paths: set[str]) -> None:
        """Drop manifest entries no longer present at HEAD (after rollback)."""
        self.file_manifest &= head_paths


@dataclass
class Project:
    """The application under construction: name, context, ordered pages."""

    id: str
    name: str
    context_description: str
    stack_profile_id: str
    created_at: datetime = field(default_factory=utc_now)
    pages: list[Page] = field(default_factory=list)
    head_snapshot: str | None = None

    @staticmethod
    def create(name: str, context_description: str, stack_profile_id: str) -> "Project":
        name = name.strip()
        if not name:
            raise ValidationError("project name must be non-empty")
        return Project(
            id=f"proj-{_short_hash(name)}",
            name=name,
            context_description=context_description.strip(),
            stack_profile_id=stack_profile_id,
        )

    def add_page(self, name: str, description: str) -> Page:
        """Append a pending page; page names are unique case-insensitively."""
        name = name.strip()
        if not name:
            raise ValidationError("page name must be non-empty")
        lowered = name.lower()
        if any(p.name.lower() == lowered for p in self.pages):
            raise ConflictError(f"page named {name!r} already exists")
        page = Page(
            id=f"page-{_short_hash(self.id + chr(0) + lowered)}",
            name=name,
            description=description,
        )
        self.pages.append(page)
        return page

    def page_by_id(self, page_id: str) -> Page | None:
        for page in self.pages:
            if page.id == page_id:
                return page
        return None

    def page_by_name(self, name: str) -> Page | None:
        lowered = name.lower()
        for page in self.pages:
            if page.name.lower() == lowered:
                return page
        return None
