"""Response parsing and workspace projection."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pagewright import projector
from pagewright.errors import ProjectionError
from pagewright.model import FileEntry, Project, Workspace
from pagewright.projector import (
    FileBlock,
    apply_projection,
    parse_response,
    render_blocks,
)

THREE_BLOCKS = """Here is the page you asked for.

### FILE: client/src/views/Questions.vue
```vue
<template>
  <h1>Questions</h1>
</template>
```

Some wiring on the server side too:

### FILE: server/src/routes.ts
```ts
export const routes = [];
```

### FILE: server/schema.sql
```sql
CREATE TABLE tb_question (id INTEGER);
```

Run it whenever you like.
"""


def test_parse_three_blocks_byte_exact():
    parsed = parse_response(THREE_BLOCKS)
    assert [b.path for b in parsed.blocks] == [
        "client/src/views/Questions.vue",
        "server/src/routes.ts",
        "server/schema.sql",
    ]
    # Oracle: contents transcribed by hand from the fixture above.
    assert parsed.blocks[0].content == "<template>\n  <h1>Questions</h1>\n</template>"
    assert parsed.blocks[1].content == "export const routes = [];"
    assert parsed.blocks[2].content == "CREATE TABLE tb_question (id INTEGER);"
    assert "Here is the page you asked for." in parsed.narrative
    assert "Run it whenever you like." in parsed.narrative
    assert parsed.warnings == []


def test_parse_prose_only():
    text = "I could not produce code for that request.\nTry rephrasing."
    blocks, narrative = parse_response(text)
    assert blocks == []
    assert narrative == text


def test_parse_fence_tag_captured_content_unchanged():
    text = "### FILE: a.py\n```python\nprint('hi')\n```\n"
    parsed = parse_response(text)
    assert parsed.blocks[0].fence_language_tag == "python"
    assert parsed.blocks[0].content == "print('hi')"


def test_parse_header_without_fence_is_warning_not_fatal():
    text = "### FILE: a.py\nno fence follows\n\n### FILE: b.py\n```\nok\n```\n"
    parsed = parse_response(text)
    assert [b.path for b in parsed.blocks] == ["b.py"]
    assert "### FILE: a.py" in parsed.narrative
    assert any("a.py" in w for w in parsed.warnings)


def test_parse_unclosed_fence_warns():
    text = "### FILE: a.py\n```\nnever closed"
    parsed = parse_response(text)
    assert parsed.blocks == []
    assert any("unclosed" in w for w in parsed.warnings)


def test_parse_header_inside_fence_is_content():
    inner = "### FILE: not-a-real-header.txt"
    text = f"### FILE: a.md\n```\n{inner}\nbody\n```\n"
    parsed = parse_response(text)
    assert len(parsed.blocks) == 1
    assert inner in parsed.blocks[0].content


def test_parse_tolerates_trailing_whitespace_and_blank_line():
    text = "### FILE: a.txt   \n\n```\nx\n```\n"
    parsed = parse_response(text)
    assert parsed.blocks[0].path == "a.txt"
    assert parsed.blocks[0].content == "x"


# -- round trip -----------------------------------------------------------------

_CONTENT_LINE = st.text(
    alphabet=st.characters(min_codepoint=0x20, max_codepoint=0x7E), max_size=30
).filter(lambda s: not s.startswith("### FILE:"))

_PATHS = st.lists(
    st.from_regex(r"[a-z][a-z0-9]{0,8}(/[a-z][a-z0-9]{0,8}){0,2}\.[a-z]{1,3}", fullmatch=True),
    min_size=1,
    max_size=5,
    unique=True,
)


@settings(max_examples=120)
@given(_PATHS, st.data())
def test_render_parse_round_trip(paths, data):
    blocks = []
    for path in paths:
        lines = data.draw(st.lists(_CONTENT_LINE, max_size=6))
        tag = data.draw(st.sampled_from([None, "ts", "vue", "python"]))
        blocks.append(FileBlock(path=path, content="\n".join(lines), fence_language_tag=tag))
    parsed = parse_response(render_blocks(blocks))
    assert parsed.blocks == blocks
    assert parsed.narrative.strip() == ""
    assert parsed.warnings == []


def test_round_trip_with_backticks_in_content():
    block = FileBlock(path="a.md", content="```\ninner fence\n```\nafter")
    parsed = parse_response(render_blocks([block]))
    assert parsed.blocks == [block]


# -- projection --------------------------------------------------------------------


def _page():
    project = Project.create("App", "", "default")
    return project.add_page("Home", "home page")


def test_apply_projection_writes_and_updates_manifest(tmp_path):
    ws = Workspace(root="p", root_dir=tmp_path)
    page = _page()
    blocks = [
        FileBlock(path="client/src/views/Questions.vue", content="<template/>"),
        FileBlock(path="server/src/routes.ts", content="export {};"),
    ]
    result = apply_projection(ws, blocks, page)
    assert [p for p, _ in result.applied] == [
        "client/src/views/Questions.vue",
        "server/src/routes.ts",
    ]
    assert page.file_manifest == {p for p, _ in result.applied}
    assert (tmp_path / "client/src/views/Questions.vue").read_text() == "<template/>"
    assert not result.is_empty


@pytest.mark.parametrize(
    "path,reason",
    [
        ("../../etc/passwd", "parent-segment"),
        ("/etc/passwd", "absolute-path"),
    ],
)
def test_apply_projection_rejects_unsafe(tmp_path, path, reason):
    ws = Workspace(root="p", root_dir=tmp_path)
    page = _page()
    result = apply_projection(ws, [FileBlock(path=path, content="nope")], page)
    assert result.applied == []
    assert result.rejected == [(path, reason)]
    assert result.is_empty
    assert page.file_manifest == set()
    assert list(tmp_path.rglob("*")) == []


def test_apply_projection_overwrites_wholesale(tmp_path):
    ws = Workspace(root="p", root_dir=tmp_path)
    ws.put(FileEntry(path="a.txt", content=b"old"))
    (tmp_path / "a.txt").write_bytes(b"old")
    apply_projection(ws, [FileBlock(path="a.txt", content="new")], _page())
    assert ws.get("a.txt").content == b"new"
    assert (tmp_path / "a.txt").read_text() == "new"


def test_apply_projection_atomic_on_midway_failure(tmp_path, monkeypatch):
    ws = Workspace(root="p", root_dir=tmp_path)
    ws.put(FileEntry(path="existing.txt", content=b"keep"))
    (tmp_path / "existing.txt").write_bytes(b"keep")
    digest_before = ws.tree_digest
    page = _page()

    real_write = projector._write_file
    calls = {"n": 0}

    def flaky_write(target, data):
        calls["n"] += 1
        if calls["n"] == 3:
            raise OSError("disk full")
        real_write(target, data)

    monkeypatch.setattr(projector, "_write_file", flaky_write)
    blocks = [
        FileBlock(path="one.txt", content="1"),
        FileBlock(path="existing.txt", content="clobbered"),
        FileBlock(path="three.txt", content="3"),
    ]
    with pytest.raises(ProjectionError):
        apply_projection(ws, blocks, page)

    assert ws.tree_digest == digest_before
    assert ws.get("existing.txt").content == b"keep"
    assert (tmp_path / "existing.txt").read_bytes() == b"keep"
    assert not (tmp_path / "one.txt").exists()
    assert not (tmp_path / "three.txt").exists()
    assert page.file_manifest == set()


def test_apply_projection_without_disk_binding():
    ws = Workspace(root="p")  # no root_dir: in-memory only
    result = apply_projection(ws, [FileBlock(path="a.txt", content="x")], _page())
    assert not result.is_empty
    assert ws.get("a.txt").content == b"x"
