"""Parses model responses into file blocks and applies them to a workspace.

Protocol: a response emits each file as a header line ``### FILE: <path>``
at column zero, followed by a fenced code block. Everything else is
narrative shown to the user. Headers inside fences are content; a header at
line start inside file content cannot be represented; documented protocol
limitation.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from .errors import PathSafetyError, ProjectionError
from .model import FileEntry, Page, Workspace, resolve_inside

FILE_HEADER = "### FILE:"

_HEADER_RE = re.compile(r"^### FILE:\s*(.+?)\s*$")
_FENCE_OPEN_RE = re.compile(r"^(`{3,})\s*([^`\s]*)\s*$")


@dataclass(frozen=True)
class FileBlock:
    """One emitted file: path as written by the model, content between fences."""

    path: str
    content: str
    fence_language_tag: str | None = None


@dataclass
class ParsedResponse:
    blocks: list[FileBlock]
    narrative: str
    warnings: list[str] = field(default_factory=list)

    def __iter__(self):
        # Allows ``blocks, narrative = parse_response(text)`` at call sites
        # that do not care about warnings.
        yield self.blocks
        yield self.narrative


@dataclass
class ProjectionResult:
    applied: list[tuple[str, str]]  # (path, content digest)
    narrative: str
    rejected: list[tuple[str, str]]  # (path as emitted, reason)

    @property
    def is_empty(self) -> bool:
        """Empty-projection signal: nothing was applied, do not snapshot."""
        return not self.applied


def parse_response(text: str) -> ParsedResponse:
    """Extract file blocks in order; everything else becomes narrative.

    A header with no following fenced block is not fatal: the line stays in
    the narrative and a warning names the path.
    """
    lines = text.split("\n")
    blocks: list[FileBlock] = []
    narrative: list[str] = []
    warnings: list[str] = []

    i = 0
    while i < len(lines):
        header = _HEADER_RE.match(lines[i])
        if not header:
            narrative.append(lines[i])
            i += 1
            continue

        path = header.group(1)
        # Tolerate blank lines between the header and its fence.
        j = i + 1
        while j < len(lines) and lines[j].strip() == "":
            j += 1
        fence = _FENCE_OPEN_RE.match(lines[j]) if j < len(lines) else None
        if not fence:
            warnings.append(f"file header without fenced block: {path}")
            narrative.append(lines[i])
            i += 1
            continue

        marker, tag = fence.group(1), fence.group(2) or None
        close_re = re.compile(rf"^`{{{len(marker)},}}\s*$")
        content_lines: list[str] = []
        k = j + 1
        while k < len(lines) and not close_re.match(lines[k]):
            content_lines.append(lines[k])
            k += 1
        if k >= len(lines):
            warnings.append(f"unclosed fence after file header: {path}")
            narrative.extend(lines[i:])
            break

        blocks.append(
            FileBlock(path=path, content="\n".join(content_lines), fence_language_tag=tag)
        )
        i = k + 1

    return ParsedResponse(blocks=blocks, narrative="\n".join(narrative), warnings=warnings)


def render_blocks(blocks: list[FileBlock], narrative: str = "") -> str:
    """Inverse of :func:`parse_response` for fixture authoring and tests.

    Fence length adapts to the content so embedded backtick runs survive a
    round trip.
    """
    parts: list[str] = []
    if narrative:
        parts.append(narrative)
    for block in blocks:
        longest = 0
        for line in block.content.split("\n"):
            body = line.rstrip()
            if body and set(body) == {"`"}:
                longest = max(longest, len(body))
        fence = "`" * max(3, longest + 1)
        tag = block.fence_language_tag or ""
        parts.append(f"{FILE_HEADER} {block.path}\n{fence}{tag}\n{block.content}\n{fence}")
    return "\n\n".join(parts) + "\n"


def _write_file(target: Path, data: bytes) -> None:
    # Isolated for fault injection in atomicity tests.
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_bytes(data)


def _remove_file(target: Path) -> None:
    target.unlink(missing_ok=True)


def apply_projection(
    workspace: Workspace,
    blocks: list[FileBlock],
    page: Page | None,
    narrative: str = "",
) -> ProjectionResult:
    """Write every safely-pathed block into the workspace (create/overwrite).

    Unsafe paths are rejected with a reason, never written. All-or-nothing:
    a mid-apply I/O failure rolls the workspace (memory and disk) back to
    its pre-call state and raises :class:`ProjectionError`.

    The caller is responsible for holding the project writer lock and for
    snapshotting afterwards; an empty ``applied`` list means nothing
    changed and no snapshot must be taken.
    """
    staged: dict[str, FileEntry] = {}
    order: list[str] = []
    rejected: list[tuple[str, str]] = []
    for block in blocks:
        try:
            entry = FileEntry(path=block.path, content=block.content.encode("utf-8"))
        except PathSafetyError as exc:
            rejected.append((block.path, exc.reason))
            continue
        if entry.path not in staged:
            order.append(entry.path)
        staged[entry.path] = entry

    if not staged:
        return ProjectionResult(applied=[], narrative=narrative, rejected=rejected)

    journal: list[tuple[str, FileEntry | None]] = []
    applied: list[tuple[str, str]] = []
    try:
        for path in order:
            entry = staged[path]
            journal.append((path, workspace.get(path)))
            if workspace.root_dir is not None:
                _write_file(resolve_inside(workspace.root_dir, path), entry.content)
            workspace.put(entry)
            applied.append((path, entry.digest))
    except Exception as exc:
        _undo(workspace, journal)
        raise ProjectionError(f"projection aborted, workspace restored: {exc}") from exc

    if page is not None:
        page.file_manifest |= {path for path, _ in applied}
    return ProjectionResult(applied=applied, narrative=narrative, rejected=rejected)


def _undo(workspace: Workspace, journal: list[tuple[str, FileEntry | None]]) -> None:
    """Restore the pre-call state. The file map is restored exactly; disk
    restoration is best-effort for paths that still collide (a directory
    left behind by a failed write), which the next materialization heals."""
    for path, previous in reversed(journal):
        if workspace.root_dir is not None:
            try:
                target = resolve_inside(workspace.root_dir, path)
                if previous is None:
                    _remove_file(target)
                else:
                    _write_file(target, previous.content)
            except OSError:
                pass
        if previous is None:
            workspace.remove(path)
        else:
            workspace.put(previous)
