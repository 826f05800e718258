#!/usr/bin/env python3
"""Regenerate bundled mock fixtures, study logs, and frozen digests.

Run from the repository root after changing prompt templates, profiles, or
session scripts:

    python scripts/generate_fixtures.py

Fixtures are keyed by the canonical request hash, so any wording change in
composition invalidates them on purpose; this script rebuilds the key space
by replaying each bundled script with a provider that synthesizes the
scripted responses on first miss.
"""

from __future__ import annotations

import json
import shutil
import sys
from datetime import datetime, timedelta, timezone
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "src"))

from pagewright.gateway import ModelGateway  # noqa: E402
from pagewright.model import Workspace  # noqa: E402
from pagewright.profiles import ProfileRegistry  # noqa: E402
from pagewright.projector import FileBlock, render_blocks  # noqa: E402
from pagewright.replay import SessionReplayer, load_script  # noqa: E402

BUNDLED = REPO / "src" / "pagewright" / "bundled"


# --------------------------------------------------------------------------
# Scripted response content, one list entry per submit step.
# --------------------------------------------------------------------------


def _vue_tasks(revision: str, extras: str) -> str:
    return f"""<script setup lang="ts">
// revision {revision}
import {{ ref, onMounted }} from "vue";
import {{ api }} from "../lib/api";

interface Task {{ id: number; description: string; completed: boolean }}

const tasks = ref<Task[]>([]);
const draft = ref("");

async function refresh() {{
  tasks.value = await api<Task[]>("/tasks");
}}

async function addTask() {{
  if (!draft.value.trim()) return;
  await api("/tasks", {{ method: "POST", body: JSON.stringify({{ description: draft.value }}) }});
  draft.value = "";
  await refresh();
}}
{extras}
onMounted(refresh);
</script>

<template>
  <section class="tasks">
    <h1>Tasks</h1>
    <form @submit.prevent="addTask">
      <input v-model="draft" placeholder="What needs doing?" />
      <button type="submit">Add task</button>
    </form>
    <ul>
      <li v-for="t in tasks" :key="t.id">{{{{ t.description }}}}</li>
    </ul>
  </section>
</template>
"""


def _tasks_routes(revision: str, extra_routes: str) -> str:
    return f"""import type {{ Express }} from "express";
import type Database from "better-sqlite3";

// revision {revision}
export function register(app: Express, db: Database.Database) {{
  app.get("/api/tasks", (_req, res) => {{
    res.json(db.prepare("SELECT * FROM tb_task ORDER BY id").all());
  }});

  app.post("/api/tasks", (req, res) => {{
    const {{ description }} = req.body ?? {{}};
    if (!description) return res.status(400).json({{ error: "description required" }});
    const info = db.prepare("INSERT INTO tb_task (description) VALUES (?)").run(description);
    res.status(201).json({{ id: Number(info.lastInsertRowid), description, completed: false }});
  }});
{extra_routes}}}
"""


_TASK_SCHEMA = """-- Tables created by generated pages are appended below.
CREATE TABLE IF NOT EXISTS tb_user (
  id INTEGER PRIMARY KEY AUTOINCREMENT,
  email TEXT NOT NULL UNIQUE,
  password_hash TEXT NOT NULL,
  created_at TEXT NOT NULL DEFAULT (datetime('now'))
);

CREATE TABLE IF NOT EXISTS tb_task (
  id INTEGER PRIMARY KEY AUTOINCREMENT,
  description TEXT NOT NULL,
  completed INTEGER NOT NULL DEFAULT 0,
  created_at TEXT NOT NULL DEFAULT (datetime('now'))
);
"""


def todoapp_responses() -> list[str]:
    t1 = render_blocks(
        [
            FileBlock("client/src/views/TasksView.vue", _vue_tasks("t1", "")),
            FileBlock("server/src/routes/tasks.ts", _tasks_routes("t1", ""), "ts"),
            FileBlock("server/schema.sql", _TASK_SCHEMA, "sql"),
        ],
        narrative="Created the Tasks page with a list backed by a tasks API and a task table.",
    )
    t2 = render_blocks(
        [
            FileBlock(
                "client/src/views/TasksView.vue",
                _vue_tasks(
                    "t2",
                    """
async function editTask(t: Task) {
  const description = prompt("Edit task", t.description);
  if (description === null) return;
  await api(`/tasks/${t.id}`, { method: "PUT", body: JSON.stringify({ description }) });
  await refresh();
}
""",
                ),
            ),
            FileBlock(
                "server/src/routes/tasks.ts",
                _tasks_routes(
                    "t2",
                    """
  app.put("/api/tasks/:id", (req, res) => {
    const { description } = req.body ?? {};
    db.prepare("UPDATE tb_task SET description = ? WHERE id = ?").run(description, req.params.id);
    res.json({ ok: true });
  });
""",
                ),
                "ts",
            ),
        ],
        narrative="Tasks can now be edited in place.",
    )
    t3 = render_blocks(
        [
            FileBlock(
                "client/src/views/TasksView.vue",
                _vue_tasks(
                    "t3",
                    """
async function editTask(t: Task) {
  const description = prompt("Edit task", t.description);
  if (description === null) return;
  await api(`/tasks/${t.id}`, { method: "PUT", body: JSON.stringify({ description }) });
  await refresh();
}

async function toggleDone(t: Task) {
  await api(`/tasks/${t.id}/completed`, { method: "PUT", body: JSON.stringify({ completed: !t.completed }) });
  await refresh();
}
""",
                ),
            ),
            FileBlock(
                "server/src/routes/tasks.ts",
                _tasks_routes(
                    "t3",
                    """
  app.put("/api/tasks/:id", (req, res) => {
    const { description } = req.body ?? {};
    db.prepare("UPDATE tb_task SET description = ? WHERE id = ?").run(description, req.params.id);
    res.json({ ok: true });
  });

  app.put("/api/tasks/:id/completed", (req, res) => {
    const { completed } = req.body ?? {};
    db.prepare("UPDATE tb_task SET completed = ? WHERE id = ?").run(completed ? 1 : 0, req.params.id);
    res.json({ ok: true });
  });
""",
                ),
                "ts",
            ),
        ],
        narrative="Tasks can be marked as completed.",
    )
    t4 = render_blocks(
        [
            FileBlock(
                "client/src/views/TasksView.vue",
                _vue_tasks(
                    "t4",
                    """
async function editTask(t: Task) {
  const description = prompt("Edit task", t.description);
  if (description === null) return;
  await api(`/tasks/${t.id}`, { method: "PUT", body: JSON.stringify({ description }) });
  await refresh();
}

async function toggleDone(t: Task) {
  await api(`/tasks/${t.id}/completed`, { method: "PUT", body: JSON.stringify({ completed: !t.completed }) });
  await refresh();
}

async function removeTask(t: Task) {
  await api(`/tasks/${t.id}`, { method: "DELETE" });
  await refresh();
}
""",
                ),
            ),
            FileBlock(
                "server/src/routes/tasks.ts",
                _tasks_routes(
                    "t4",
                    """
  app.put("/api/tasks/:id", (req, res) => {
    const { description } = req.body ?? {};
    db.prepare("UPDATE tb_task SET description = ? WHERE id = ?").run(description, req.params.id);
    res.json({ ok: true });
  });

  app.put("/api/tasks/:id/completed", (req, res) => {
    const { completed } = req.body ?? {};
    db.prepare("UPDATE tb_task SET completed = ? WHERE id = ?").run(completed ? 1 : 0, req.params.id);
    res.json({ ok: true });
  });

  app.delete("/api/tasks/:id", (req, res) => {
    db.prepare("DELETE FROM tb_task WHERE id = ?").run(req.params.id);
    res.json({ ok: true });
  });
""",
                ),
                "ts",
            ),
        ],
        narrative="Tasks can be removed from the list.",
    )
    return [t1, t2, t3, t4]


def _vue_questions(revision: str, extras_script: str, extras_template: str) -> str:
    return f"""<script setup lang="ts">
// revision {revision}
import {{ ref, onMounted }} from "vue";
import {{ api }} from "../lib/api";

interface Question {{ id: number; title: string; body: string; asked_at: string }}

const questions = ref<Question[]>([]);
const title = ref("");
const body = ref("");

async function refresh() {{
  questions.value = await api<Question[]>("/questions");
}}

async function submitQuestion() {{
  if (!title.value.trim()) return;
  await api("/questions", {{ method: "POST", body: JSON.stringify({{ title: title.value, body: body.value }}) }});
  title.value = "";
  body.value = "";
  await refresh();
}}
{extras_script}
onMounted(refresh);
</script>

<template>
  <section class="questions">
    <h1>Questions</h1>
    <form @submit.prevent="submitQuestion">
      <input v-model="title" placeholder="Question title" />
      <textarea v-model="body" placeholder="Describe your question"></textarea>
      <button type="submit">Submit question</button>
    </form>
    <article v-for="q in questions" :key="q.id">
      <h2>{{{{ q.title }}}}</h2>
      <p>{{{{ q.body }}}}</p>
      <small>{{{{ q.asked_at }}}}</small>{extras_template}
    </article>
  </section>
</template>
"""


def _questions_routes(revision: str, extra: str) -> str:
    return f"""import type {{ Express }} from "express";
import type Database from "better-sqlite3";

// revision {revision}
export function register(app: Express, db: Database.Database) {{
  app.get("/api/questions", (_req, res) => {{
    res.json(db.prepare("SELECT * FROM tb_question ORDER BY id DESC").all());
  }});

  app.post("/api/questions", (req, res) => {{
    const {{ title, body }} = req.body ?? {{}};
    if (!title) return res.status(400).json({{ error: "title required" }});
    const info = db.prepare("INSERT INTO tb_question (title, body) VALUES (?, ?)").run(title, body ?? "");
    res.status(201).json({{ id: Number(info.lastInsertRowid), title, body }});
  }});
{extra}}}
"""


_FORUM_SCHEMA_Q = """-- Tables created by generated pages are appended below.
CREATE TABLE IF NOT EXISTS tb_user (
  id INTEGER PRIMARY KEY AUTOINCREMENT,
  email TEXT NOT NULL UNIQUE,
  password_hash TEXT NOT NULL,
  created_at TEXT NOT NULL DEFAULT (datetime('now'))
);

CREATE TABLE IF NOT EXISTS tb_question (
  id INTEGER PRIMARY KEY AUTOINCREMENT,
  title TEXT NOT NULL,
  body TEXT NOT NULL DEFAULT '',
  asked_at TEXT NOT NULL DEFAULT (datetime('now'))
);
"""

_FORUM_SCHEMA_QA = _FORUM_SCHEMA_Q + """
CREATE TABLE IF NOT EXISTS tb_answer (
  id INTEGER PRIMARY KEY AUTOINCREMENT,
  question_id INTEGER NOT NULL REFERENCES tb_question(id),
  body TEXT NOT NULL,
  answered_at TEXT NOT NULL DEFAULT (datetime('now'))
);
"""


def _vue_answers(revision: str, extras_script: str, extras_template: str) -> str:
    return f"""<script setup lang="ts">
// revision {revision}
import {{ ref, onMounted }} from "vue";
import {{ api }} from "../lib/api";

interface Answer {{ id: number; question_id: number; body: string; answered_at: string }}

const questionId = ref<number>(Number(new URLSearchParams(location.search).get("question") ?? 0));
const answers = ref<Answer[]>([]);
const draft = ref("");

async function refresh() {{
  answers.value = await api<Answer[]>(`/questions/${{questionId.value}}/answers`);
}}

async function submitAnswer() {{
  if (!draft.value.trim()) return;
  await api(`/questions/${{questionId.value}}/answers`, {{ method: "POST", body: JSON.stringify({{ body: draft.value }}) }});
  draft.value = "";
  await refresh();
}}
{extras_script}
onMounted(refresh);
</script>

<template>
  <section class="answers">
    <h1>Answers</h1>
    <form @submit.prevent="submitAnswer">
      <textarea v-model="draft" placeholder="Write your answer"></textarea>
      <button type="submit">Register answer</button>
    </form>
    <article v-for="a in answers" :key="a.id">
      <p>{{{{ a.body }}}}</p>
      <small>{{{{ a.answered_at }}}}</small>{extras_template}
    </article>
  </section>
</template>
"""


def _answers_routes(revision: str, extra: str) -> str:
    return f"""import type {{ Express }} from "express";
import type Database from "better-sqlite3";

// revision {revision}
export function register(app: Express, db: Database.Database) {{
  app.get("/api/questions/:id/answers", (req, res) => {{
    res.json(db.prepare("SELECT * FROM tb_answer WHERE question_id = ? ORDER BY id").all(req.params.id));
  }});

  app.post("/api/questions/:id/answers", (req, res) => {{
    const {{ body }} = req.body ?? {{}};
    if (!body) return res.status(400).json({{ error: "body required" }});
    const info = db.prepare("INSERT INTO tb_answer (question_id, body) VALUES (?, ?)").run(req.params.id, body);
    res.status(201).json({{ id: Number(info.lastInsertRowid), body }});
  }});
{extra}}}
"""


def forumapp_responses() -> list[str]:
    f1 = render_blocks(
        [
            FileBlock("client/src/views/QuestionsView.vue", _vue_questions("f1", "", "")),
            FileBlock("server/src/routes/questions.ts", _questions_routes("f1", ""), "ts"),
            FileBlock("server/schema.sql", _FORUM_SCHEMA_Q, "sql"),
        ],
        narrative="Created the Questions page with question submission and listing.",
    )
    delete_q_script = """
async function deleteQuestion(q: Question) {
  await api(`/questions/${q.id}`, { method: "DELETE" });
  await refresh();
}
"""
    delete_q_route = """
  app.delete("/api/questions/:id", (req, res) => {
    db.prepare("DELETE FROM tb_question WHERE id = ?").run(req.params.id);
    res.json({ ok: true });
  });
"""
    f2 = render_blocks(
        [
            FileBlock(
                "client/src/views/QuestionsView.vue",
                _vue_questions(
                    "f2",
                    delete_q_script,
                    '\n      <button @click="deleteQuestion(q)">Delete question</button>',
                ),
            ),
            FileBlock("server/src/routes/questions.ts", _questions_routes("f2", delete_q_route), "ts"),
        ],
        narrative="Each question now has a delete control.",
    )
    f3 = render_blocks(
        [
            FileBlock("client/src/views/AnswersView.vue", _vue_answers("f3", "", "")),
            FileBlock("server/src/routes/answers.ts", _answers_routes("f3", ""), "ts"),
            FileBlock("server/schema.sql", _FORUM_SCHEMA_QA, "sql"),
        ],
        narrative="Created the Answers page for registering answers to a selected question.",
    )
    delete_a_script = """
async function deleteAnswer(a: Answer) {
  await api(`/answers/${a.id}`, { method: "DELETE" });
  await refresh();
}
"""
    delete_a_route = """
  app.delete("/api/answers/:id", (req, res) => {
    db.prepare("DELETE FROM tb_answer WHERE id = ?").run(req.params.id);
    res.json({ ok: true });
  });
"""
    f4 = render_blocks(
        [
            FileBlock(
                "client/src/views/AnswersView.vue",
                _vue_answers(
                    "f4",
                    delete_a_script,
                    '\n      <button @click="deleteAnswer(a)">Delete answer</button>',
                ),
            ),
            FileBlock("server/src/routes/answers.ts", _answers_routes("f4", delete_a_route), "ts"),
        ],
        narrative="Each answer now has a delete control.",
    )
    f5 = render_blocks(
        [
            FileBlock(
                "client/src/views/QuestionsView.vue",
                _vue_questions(
                    "f5",
                    delete_q_script
                    + """
function viewAnswers(q: Question) {
  location.href = `/answers?question=${q.id}`;
}
""",
                    '\n      <button @click="deleteQuestion(q)">Delete question</button>'
                    '\n      <button @click="viewAnswers(q)">View answers</button>',
                ),
            ),
        ],
        narrative="Questions now link to the Answers page for the selected question.",
    )
    return [f1, f2, f3, f4, f5]


def p2_session_responses() -> list[str]:
    """Sixteen distinct revisions of the Tasks page (plus its API on p1)."""
    texts = []
    p1 = render_blocks(
        [
            FileBlock("client/src/views/TasksView.vue", _vue_tasks("p1", "")),
            FileBlock("server/src/routes/tasks.ts", _tasks_routes("p1", ""), "ts"),
            FileBlock("server/schema.sql", _TASK_SCHEMA, "sql"),
        ],
        narrative="Created the Tasks page.",
    )
    texts.append(p1)
    for i in range(2, 17):
        texts.append(
            render_blocks(
                [
                    FileBlock(
                        "client/src/views/TasksView.vue",
                        _vue_tasks(f"p{i}", f"\n// change applied for prompt p{i}\n"),
                    )
                ],
                narrative=f"Applied the requested change (revision p{i}).",
            )
        )
    return texts


_NOTES_PAGE = """<!doctype html>
<html lang="en">
  <head><meta charset="UTF-8" /><title>Notes</title></head>
  <body>
    <nav id="nav"></nav>
    <main>
      <h1>Notes</h1>
      <form id="note-form">
        <input id="note-input" placeholder="Write a short note" />
        <button type="submit">Add note</button>
      </form>
      <ul id="notes"></ul>{extra}
    </main>
    <script src="/app.js"></script>
    <script>
      const notes = [];
      const list = document.getElementById("notes");
      function render() {{
        list.innerHTML = notes.map((n) => `<li>${{n}}</li>`).join("");
      }}
      document.getElementById("note-form").addEventListener("submit", (e) => {{
        e.preventDefault();
        const input = document.getElementById("note-input");
        if (input.value.trim()) notes.push(input.value.trim());
        input.value = "";
        render();
      }});{extra_script}
    </script>
  </body>
</html>
"""


def uiflow_responses() -> list[str]:
    u1 = render_blocks(
        [
            FileBlock("client/pages/notes.html", _NOTES_PAGE.format(extra="", extra_script="")),
            FileBlock(
                "client/app.js",
                """// Shared navigation: lists every known page.
const PAGES = [{ slug: "notes", title: "Notes" }];

function renderNav() {
  const nav = document.getElementById("nav");
  if (!nav) return;
  nav.innerHTML = PAGES.map(
    (p) => `<a href="/pages/${p.slug}.html">${p.title}</a>`
  ).join(" | ");
}

document.addEventListener("DOMContentLoaded", renderNav);
""",
                "js",
            ),
        ],
        narrative="Created the Notes page and added it to the navigation.",
    )
    u2 = render_blocks(
        [
            FileBlock(
                "client/pages/notes.html",
                _NOTES_PAGE.format(
                    extra='\n      <p><a href="#" id="clear-all">Remove all notes</a></p>',
                    extra_script="""
      document.getElementById("clear-all").addEventListener("click", (e) => {
        e.preventDefault();
        notes.length = 0;
        render();
      });""",
                ),
            )
        ],
        narrative="Added a control that clears the whole list.",
    )
    return [u1, u2]


# --------------------------------------------------------------------------
# Replay with a synthesizing provider.
# --------------------------------------------------------------------------


class SynthesizingGateway(ModelGateway):
    """Mock gateway that writes the scripted response on first miss."""

    def __init__(self, inner: ModelGateway, responses: list[str], out_dir: Path):
        super().__init__(inner.store, inner.config)
        self._responses = iter(responses)
        self._out_dir = out_dir

    def _send_mock(self, prompt):
        digest = self.request_hash(prompt)
        fixture = self._out_dir / digest
        if not fixture.is_file():
            fixture.write_text(next(self._responses), encoding="utf-8")
        return super()._send_mock(prompt)


def generate_script_fixtures(name: str, responses: list[str]) -> None:
    script = BUNDLED / "scripts" / f"{name}.jsonl"
    out_dir = BUNDLED / "fixtures" / name
    if out_dir.exists():
        shutil.rmtree(out_dir)
    out_dir.mkdir(parents=True)

    replayer = SessionReplayer(fixtures_dir=out_dir)
    replayer.core.gateway = SynthesizingGateway(replayer.core.gateway, responses, out_dir)
    try:
        report = replayer.run(load_script(script))
    finally:
        replayer.close()
    if not report.ok:
        print(report.summary())
        raise SystemExit(f"replay of {name} failed while generating fixtures")
    print(f"{name}: {len(list(out_dir.iterdir()))} fixtures, final digest {report.final_tree_digest}")


# --------------------------------------------------------------------------
# Study-log fixtures.
# --------------------------------------------------------------------------

_BASE_TS = datetime(2023, 6, 5, 9, 0, tzinfo=timezone.utc)

EXPLORATORY_REAL: dict[str, list[tuple[str, str]]] = {
    "P1": [
        (
            "Initial",
            "I need to build a Web application in TypeScript with the following "
            "programming technologies: vue@latest, Express version 4, and SQLlite3 "
            "database. The back-end should follow a stateful architecture (e.g., user "
            "ids should be stored in sessions). The front-end should use the Bootstrap "
            "library. The app is a simple question and answer forum, which should "
            "implement the following user stories: As a user, I would like to register "
            "on the forum. As a user, I would like to login on the forum. As a user, I "
            "would like to create a question. As a user, I would like to delete a "
            "question. As a user, I would like to answer a question. As a user, I "
            "would like to delete an answer.",
        ),
        (
            "Feature",
            'Please, create a new page such that the user can view the answers for a '
            'selected question. In the main page, add a "View Answers" button that '
            "will then present this new page.",
        ),
        (
            "Feature",
            "In the Answers Preview Screen, we should be able to register an answer to "
            "a question.",
        ),
        (
            "BugFix",
            "There is an error in the browser console: Uncaught SyntaxError: ambiguous "
            "indirect export: 'setAuthenticated'. Could you fix it?",
        ),
        (
            "Layout",
            "I would like the 'client/src/views/Questions.Vue' file responsible for "
            "registering questions to list the questions in a table with the question "
            "ID, the question title and the commands to view the answers to the "
            "question and delete the question.",
        ),
    ],
    "P2": [
        (
            "Initial",
            'I would like to create an user authentication form web page, with the '
            'fields "e-mail" and "password", with two green buttons: "sign up", which '
            "will redirect the users to a new form page where he can sign up, and "
            '"sign in", which will authenticate existing users and redirect them to a '
            "home page, returning an error when the user is not registered. I want to "
            "use the following technologies for this: Vue.js, Express.js, TypeScript "
            "and Sqlite. Could you help me with that, from installing these "
            "technologies to build those pages.",
        ),
        (
            "Feature",
            "Now, I want to get the post's answers available in PostDetails.vue and, "
            "when submitting the form with the answer, I want it to be saved in the "
            "database. My code from PostDetails.vue looks like that: [Source code from "
            "PostDetails.vue file] and my app.ts looks like that: [Source code from "
            "app.ts file] How can I do that?",
        ),
    ],
    "P3": [
        (
            "Initial",
            "Please, build a forum app with the following technologies: Vue.js, "
            "Express.js, TypeScript, and Sqlite. The app should have a login screen "
            "and an option to register a user if he/she haven't already. After logging "
            "in, the user should have the option to create a Question and to see the "
            "questions that have been created before. By clicking on the \"Answer\" "
            "button, a new screen will appear and the user will be able to provide an "
            "answer, save it, and then return to the main screen.",
        ),
        (
            "Initial",
            "In topic 5 (\"Set up the front-end\"), how do I create views for each "
            "route?",
        ),
        (
            "Feature",
            "Please implement code to make API calls to the back-end server for user "
            "registration, fetching questions, and saving new questions.",
        ),
    ],
}

# Table rows: participant -> {category: count}
EXPLORATORY_COUNTS = {
    "P1": {"Initial": 2, "Feature": 26, "BugFix": 28, "Layout": 7, "Other": 2},
    "P2": {"Initial": 1, "Feature": 17, "BugFix": 24, "Layout": 9, "Other": 2},
    "P3": {"Initial": 3, "Feature": 13, "BugFix": 24, "Layout": 0, "Other": 6},
}

_SYNTH_POOLS = {
    "Initial": [
        "Set up the project structure and folders for the forum application.",
        "Prepare the development project with the frameworks we agreed on.",
    ],
    "Feature": [
        "Add the ability to {verb} the {obj}.",
        "The page should let the user {verb} the {obj}.",
        "When saving, also record the {obj}.",
        "Show the {obj} next to each question.",
        "Allow the user to {verb} the {obj} from the main page.",
    ],
    "BugFix": [
        "The {obj} is not working, please fix it.",
        "There is an error when I try to {verb} the {obj}.",
        "Fix the bug that happens after submitting the {obj}.",
        "I get an error in the console when loading the {obj}.",
    ],
    "Layout": [
        "Change the color of the {obj}.",
        "The button for the {obj} should be aligned with the title.",
        "Show the {obj} in a table instead of a list.",
        "Use a larger font and more spacing for the {obj}.",
    ],
    "Other": [
        "How do I install the sqlite package for the server?",
        "Configure the environment variables for the development server.",
        "How do I setup the proxy between the two servers?",
    ],
}

_VERBS = ["delete", "update", "rename", "sort", "filter", "duplicate", "archive", "search"]
_OBJS = [
    "question", "answer", "user name", "creation date", "question title",
    "answer list", "login form", "registration form", "home page",
    "question form", "answer form", "session", "welcome text",
]


def _synthetic_text(category: str, index: int) -> str:
    pool = _SYNTH_POOLS[category]
    template = pool[index % len(pool)]
    return template.format(
        verb=_VERBS[index % len(_VERBS)], obj=_OBJS[index % len(_OBJS)]
    )


def generate_exploratory_log() -> None:
    out = BUNDLED / "logs" / "exploratory_study.jsonl"
    lines = []
    for participant, counts in EXPLORATORY_COUNTS.items():
        ts = _BASE_TS
        real = list(EXPLORATORY_REAL[participant])
        remaining = dict(counts)
        entries: list[tuple[str, str, bool]] = []
        for kind, text in real:
            remaining[kind] -= 1
            entries.append((kind, text, False))
        # Pad with synthetic entries, marked as such, to the published totals.
        for kind in ("Initial", "Feature", "BugFix", "Layout", "Other"):
            for i in range(remaining[kind]):
                entries.append((kind, _synthetic_text(kind, i + len(participant)), True))
        # Keep the participant's real initial prompt first; shuffle the rest
        # deterministically by rotating categories so kinds interleave.
        head, rest = entries[0], entries[1:]
        rest.sort(key=lambda e: (hash((participant, e[1])) % 97, e[0]))
        ordered = [head] + rest
        for kind, text, synthetic in ordered:
            lines.append(
                json.dumps(
                    {
                        "participant": participant,
                        "kind": kind,
                        "text": text,
                        "ts": ts.isoformat(),
                        "synthetic": synthetic,
                    }
                )
            )
            ts += timedelta(minutes=3)
    out.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"exploratory log: {len(lines)} entries")


PILOT_MIX = {
    # participant -> (initial, feature, bugfix, layout, rollbacks-after-prompt)
    "P1": (1, 4, 4, 0, [3, 5, 7, 8]),
    "P2": (1, 4, 3, 8, [4, 6, 10, 13]),
    "P3": (1, 8, 4, 3, [5, 9, 14]),
    "P4": (1, 6, 4, 0, [2, 4, 7, 9, 10]),
}

SECOND_MIX = {
    # participant -> (initial, feature, bugfix, layout, rollbacks-after-prompt)
    "P1": (2, 3, 0, 1, []),
    "P2": (2, 3, 0, 1, []),
    "P3": (2, 2, 0, 1, []),
    "P4": (2, 4, 2, 2, []),
    "P5": (2, 4, 2, 2, []),
    "P6": (2, 4, 2, 3, [6]),
    "P7": (2, 6, 2, 2, [5, 9]),
    "P8": (2, 4, 2, 2, []),
    "P9": (2, 3, 2, 0, []),
    "P10": (2, 4, 2, 0, [4, 7]),
}


def _session_log(participant: str, mix: tuple, ts: datetime) -> list[str]:
    initial, feature, bugfix, layout, rollback_after = mix
    kinds = (
        ["Initial"] * initial + ["Feature"] * feature + ["BugFix"] * bugfix + ["Layout"] * layout
    )
    # Interleave refinements deterministically: initial first, then rotate.
    ordered = kinds[:initial]
    rest = kinds[initial:]
    rest.sort(key=lambda k: hash((participant, k)) % 13)
    ordered += rest
    lines = []
    for index, kind in enumerate(ordered, 1):
        lines.append(
            json.dumps(
                {
                    "participant": participant,
                    "kind": kind,
                    "text": _synthetic_text(kind, index),
                    "ts": ts.isoformat(),
                    "synthetic": True,
                }
            )
        )
        ts += timedelta(minutes=4)
        if index in rollback_after:
            lines.append(
                json.dumps(
                    {
                        "participant": participant,
                        "rollback": True,
                        "text": "",
                        "ts": ts.isoformat(),
                        "synthetic": True,
                    }
                )
            )
            ts += timedelta(minutes=1)
    return lines


def generate_rollback_logs() -> None:
    for filename, mixes in (
        ("pilot_rollbacks.jsonl", PILOT_MIX),
        ("second_experiment.jsonl", SECOND_MIX),
    ):
        lines = []
        for participant, mix in mixes.items():
            lines.extend(_session_log(participant, mix, _BASE_TS))
        (BUNDLED / "logs" / filename).write_text("\n".join(lines) + "\n", encoding="utf-8")
        total_rollbacks = sum(len(m[4]) for m in mixes.values())
        print(f"{filename}: {len(lines)} entries, {total_rollbacks} rollbacks")


def print_frozen_digests() -> None:
    registry = ProfileRegistry.bundled()
    for profile_id in registry.ids():
        profile = registry.get(profile_id)
        workspace = Workspace(root="frozen")
        for entry in profile.scaffold_tree:
            workspace.put(entry)
        print(f"scaffold digest [{profile_id}]: {workspace.tree_digest}")
        for feature in profile.predefined_features:
            print(f"  feature {feature.id} manifest: {feature.manifest()}")


def main() -> None:
    (BUNDLED / "fixtures").mkdir(exist_ok=True)
    (BUNDLED / "logs").mkdir(exist_ok=True)
    generate_script_fixtures("todoapp", todoapp_responses())
    generate_script_fixtures("forumapp", forumapp_responses())
    generate_script_fixtures("p2_session", p2_session_responses())
    generate_script_fixtures("uiflow", uiflow_responses())
    generate_exploratory_log()
    generate_rollback_logs()
    print_frozen_digests()


if __name__ == "__main__":
    main()
