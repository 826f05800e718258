"""Domain model: path safety, digests, project/page validation."""

import hashlib

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pagewright.errors import ConflictError, PathSafetyError, ValidationError
from pagewright.model import (
    EMPTY_TREE_DIGEST,
    FileEntry,
    Project,
    Workspace,
    normalize_path,
    tree_digest_of,
    workspace_tree_digest,
)

# -- path normalization ------------------------------------------------------


def test_normalize_collapses_dots_and_slashes():
    assert normalize_path("./client//src/./main.ts") == "client/src/main.ts"
    assert normalize_path("client\\src\\main.ts") == "client/src/main.ts"
    assert normalize_path("a/b/") == "a/b"


@pytest.mark.parametrize(
    "bad,reason",
    [
        ("/etc/passwd", "absolute-path"),
        ("C:\\Windows\\system32", "absolute-path"),
        ("../../etc/passwd", "parent-segment"),
        ("a/../../b", "parent-segment"),
        ("", "empty"),
        (".", "empty"),
        ("a/%2e%2e/b", "encoded-separator"),
        ("a%2Fb", "encoded-separator"),
        ("a\x00b", "control-char"),
        ("a\nb", "control-char"),
    ],
)
def test_normalize_rejects_unsafe(bad, reason):
    with pytest.raises(PathSafetyError) as exc_info:
        normalize_path(bad)
    assert exc_info.value.reason == reason


_SEGMENT = st.text(
    alphabet=st.characters(min_codepoint=0x21, max_codepoint=0x7E, blacklist_characters="/\\%"),
    min_size=1,
    max_size=12,
).filter(lambda s: s not in (".", "..") and ":" not in s)


@given(st.lists(_SEGMENT, min_size=1, max_size=6))
def test_normalize_idempotent(segments):
    once = normalize_path("/".join(segments))
    assert normalize_path(once) == once


# -- file entries and workspaces ------------------------------------------------


def test_file_entry_digest_matches_content():
    entry = FileEntry(path="a.txt", content=b"x")
    assert entry.digest == hashlib.sha256(b"x").hexdigest()


def test_empty_workspace_digest_is_constant():
    assert Workspace(root="w").tree_digest == EMPTY_TREE_DIGEST
    assert EMPTY_TREE_DIGEST == hashlib.sha256(b"").hexdigest()


def test_tree_digest_deterministic():
    ws = Workspace(root="w")
    ws.put(FileEntry(path="a.txt", content=b"x"))
    assert ws.tree_digest == ws.tree_digest


def _sort_then_hash(files: dict[str, bytes]) -> str:
    # Independent oracle: sort paths, hash "digest  path" lines.
    lines = "".join(
        f"{hashlib.sha256(content).hexdigest()}  {path}\n"
        for path, content in sorted(files.items())
    )
    return hashlib.sha256(lines.encode()).hexdigest()


@settings(max_examples=120)
@given(
    st.dictionaries(
        st.lists(_SEGMENT, min_size=1, max_size=3).map("/".join),
        st.binary(max_size=40),
        max_size=8,
    ),
    st.randoms(),
)
def test_tree_digest_insertion_order_invariant(files, rng):
    files = {normalize_path(p): c for p, c in files.items()}
    ws1, ws2 = Workspace(root="a"), Workspace(root="b")
    ordered = list(files.items())
    for path, content in ordered:
        ws1.put(FileEntry(path=path, content=content))
    rng.shuffle(ordered)
    for path, content in ordered:
        ws2.put(FileEntry(path=path, content=content))
    assert workspace_tree_digest(ws1) == workspace_tree_digest(ws2) == _sort_then_hash(files)


def test_tree_digest_of_pairs_matches_workspace():
    ws = Workspace(root="w")
    ws.put(FileEntry(path="b/c.txt", content=b"1"))
    ws.put(FileEntry(path="a.txt", content=b"2"))
    pairs = [(p, e.digest) for p, e in ws.files.items()]
    assert tree_digest_of(pairs) == ws.tree_digest


# -- projects and pages -----------------------------------------------------------


def test_project_requires_name():
    with pytest.raises(ValidationError):
        Project.create("   ", "anything", "default")


def test_project_create_trims_and_ids():
    project = Project.create(" ForumApp ", "a simple question and answer forum", "default")
    assert project.name == "ForumApp"
    assert project.pages == []
    assert project.head_snapshot is None


def test_page_names_unique_case_insensitive():
    project = Project.create("ForumApp", "", "default")
    page = project.add_page("Question Submission", "submit questions here")
    assert page.status == "pending"
    assert page.file_manifest == set()
    with pytest.raises(ConflictError):
        project.add_page("question submission", "anything")


def test_page_order_preserved():
    project = Project.create("ForumApp", "", "default")
    project.add_page("Questions", "q")
    project.add_page("Answers", "register an answer to a question")
    assert [p.name for p in project.pages] == ["Questions", "Answers"]


def test_page_manifest_reconcile_drops_missing():
    project = Project.create("App", "", "default")
    page = project.add_page("Home", "h")
    page.file_manifest = {"a.txt", "b.txt"}
    page.reconcile_manifest({"a.txt", "c.txt"})
    assert page.file_manifest == {"a.txt"}
