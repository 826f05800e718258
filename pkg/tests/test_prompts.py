"""Prompt composition, context selection, templates, and the log classifier."""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pagewright.bundled import bundled_path
from pagewright.errors import ConfigurationError, ContractViolation, ValidationError
from pagewright.model import FileEntry, Project, Workspace
from pagewright.profiles import ProfileRegistry
from pagewright.prompts import (
    PromptComposer,
    PromptKind,
    REPORT_CATEGORIES,
    classify_prompt,
    report_category,
    select_context_files,
)
from pagewright.prompts.templates import PromptTemplate


@pytest.fixture(scope="module")
def registry():
    return ProfileRegistry.bundled()


@pytest.fixture(scope="module")
def composer(registry):
    return PromptComposer(registry)


def make_project(context="a simple question and answer forum"):
    return Project.create("ForumApp", context, "default")


def head_with(paths: dict[str, bytes]) -> Workspace:
    ws = Workspace(root="w")
    for path, content in paths.items():
        ws.put(FileEntry(path=path, content=content))
    return ws


SHARED = {
    "client/src/router/index.ts": b"// router",
    "server/src/app.ts": b"// app",
    "server/schema.sql": b"-- schema",
}


# -- templates ---------------------------------------------------------------


def test_template_slots_scanned_from_body():
    template = PromptTemplate(id="t", kind=PromptKind.INITIAL, body="a {{x}} b {{y}} {{x}}")
    assert template.slots == ("x", "y")
    assert template.render({"x": "1", "y": "2"}) == "a 1 b 2 1"


def test_template_render_requires_exact_slots():
    template = PromptTemplate(id="t", kind=PromptKind.INITIAL, body="{{x}}")
    with pytest.raises(ValidationError):
        template.render({})
    with pytest.raises(ValidationError):
        template.render({"x": "1", "z": "2"})


# -- system preamble ------------------------------------------------------------


def test_preamble_contains_context_and_is_deterministic(composer):
    project = make_project()
    first = composer.system_preamble(project)
    assert "a simple question and answer forum" in first
    assert composer.system_preamble(project) == first


def test_preamble_without_context_omits_section(composer):
    project = make_project(context="")
    text = composer.system_preamble(project)
    assert "The application being built" not in text
    assert "### FILE:" in text  # emission protocol still present


def test_unknown_profile_is_configuration_error(composer):
    project = Project.create("X", "", "no-such-profile")
    with pytest.raises(ConfigurationError):
        composer.system_preamble(project)


# -- page creation ------------------------------------------------------------------


def test_page_creation_first_generation_no_injection(composer):
    project = make_project()
    page = project.add_page("Question Submission", "I would like to submit questions on this page.")
    prompt = composer.page_creation(project, page, head_with(SHARED))
    assert prompt.kind is PromptKind.INITIAL
    assert prompt.page_id == page.id
    assert prompt.injected_paths == ()
    assert prompt.messages[0].role == "system"
    assert "I would like to submit questions on this page." in prompt.user_text


def test_page_creation_after_first_injects_shared_files(composer):
    project = make_project()
    first = project.add_page("Questions", "submit questions")
    first.status = "generated"
    first.file_manifest = {"client/src/views/QuestionsView.vue"}
    second = project.add_page("Answers", "register an answer to a question")
    head = head_with({**SHARED, "client/src/views/QuestionsView.vue": b"<template/>"})

    prompt = composer.page_creation(project, second, head)
    assert prompt.injected_paths == tuple(sorted(SHARED))


def test_page_creation_on_generated_page_is_contract_violation(composer):
    project = make_project()
    page = project.add_page("Questions", "desc")
    page.status = "generated"
    with pytest.raises(ContractViolation):
        composer.page_creation(project, page, head_with(SHARED))


def test_page_creation_empty_description_rejected(composer):
    project = make_project()
    page = project.add_page("Questions", "   ")
    with pytest.raises(ValidationError):
        composer.page_creation(project, page, head_with(SHARED))


# -- refinement ------------------------------------------------------------------------


def _generated_page(project, name="Questions", manifest=None):
    page = project.add_page(name, f"the {name} page")
    page.status = "generated"
    page.file_manifest = set(manifest or [])
    return page


def test_refinement_injects_manifest_and_shared(composer):
    project = make_project()
    page = _generated_page(project, manifest=["client/src/views/QuestionsView.vue"])
    head = head_with({**SHARED, "client/src/views/QuestionsView.vue": b"<template/>"})
    text = "the page should have a button to delete a question"

    prompt = composer.refinement(project, page, text, PromptKind.FEATURE, head)
    # Oracle: manifest ∩ head plus shared files present at head, sorted.
    expected = sorted({"client/src/views/QuestionsView.vue"} | set(SHARED))
    assert list(prompt.injected_paths) == expected
    assert prompt.user_text == text
    assert prompt.kind is PromptKind.FEATURE


def test_refinement_bugfix_same_injection_rule(composer):
    project = make_project()
    page = _generated_page(project, manifest=["client/src/views/QuestionsView.vue"])
    head = head_with({**SHARED, "client/src/views/QuestionsView.vue": b"x"})
    feature = composer.refinement(project, page, "a", PromptKind.FEATURE, head)
    bugfix = composer.refinement(
        project, page, "the delete question button is not working", PromptKind.BUG_FIX, head
    )
    assert feature.injected_paths == bugfix.injected_paths
    assert bugfix.kind is PromptKind.BUG_FIX


def test_refinement_requires_generated_page_and_text(composer):
    project = make_project()
    pending = project.add_page("Pending", "p")
    head = head_with(SHARED)
    with pytest.raises(ContractViolation):
        composer.refinement(project, pending, "x", PromptKind.LAYOUT, head)
    page = _generated_page(project)
    with pytest.raises(ValidationError):
        composer.refinement(project, page, "   ", PromptKind.LAYOUT, head)
    with pytest.raises(ValidationError):
        composer.refinement(project, page, "x", PromptKind.TRANSITION, head)


def test_select_context_files_drops_dangling_manifest_paths(registry):
    """A manifest path removed by rollback silently disappears."""
    project = make_project()
    page = _generated_page(
        project,
        manifest=["client/src/views/QuestionsView.vue", "client/src/views/Gone.vue"],
    )
    head = head_with({**SHARED, "client/src/views/QuestionsView.vue": b"x"})
    profile = registry.get("default")
    selected = select_context_files(project, page, head, profile)
    # Oracle: manual set intersection.
    assert selected == sorted({"client/src/views/QuestionsView.vue"} | set(SHARED))
    assert "client/src/views/Gone.vue" not in selected


def test_select_context_files_pending_page_shared_only(registry):
    project = make_project()
    page = project.add_page("New", "n")
    selected = select_context_files(project, page, head_with(SHARED), registry.get("default"))
    assert selected == sorted(SHARED)


# -- transition ----------------------------------------------------------------------------


def test_transition_union_of_manifests(composer):
    project = make_project()
    source = _generated_page(
        project,
        "Questions",
        manifest=["client/src/views/A1.vue", "client/src/views/A2.vue", "client/src/views/A3.vue"],
    )
    target = _generated_page(
        project, "Answers", manifest=["client/src/views/B1.vue", "client/src/views/B2.vue"]
    )
    head_files = {f"client/src/views/A{i}.vue": b"a" for i in (1, 2, 3)}
    head_files.update({f"client/src/views/B{i}.vue": b"b" for i in (1, 2)})
    head_files["client/src/router/index.ts"] = b"r"
    head_files["server/src/app.ts"] = b"s"
    head = head_with(head_files)

    text = "Add a button to view the registered answers on the Answers page."
    prompt = composer.transition(project, source, target, text, head)
    # Oracle: 3 + 2 disjoint manifest files plus the 2 shared files at head.
    assert len(prompt.injected_paths) == 7
    assert prompt.kind is PromptKind.TRANSITION
    assert prompt.user_text == text
    assert prompt.page_id == source.id


def test_transition_rejects_self_and_pending(composer):
    project = make_project()
    source = _generated_page(project, "Questions")
    pending = project.add_page("Answers", "a")
    head = head_with(SHARED)
    with pytest.raises(ValidationError):
        composer.transition(project, source, source, "x", head)
    with pytest.raises(ContractViolation):
        composer.transition(project, source, pending, "x", head)


# -- invariants across compose functions ------------------------------------------------------


def test_exactly_one_system_message_first(composer):
    project = make_project()
    page = _generated_page(project, manifest=["client/src/views/QuestionsView.vue"])
    other = _generated_page(project, "Answers")
    head = head_with({**SHARED, "client/src/views/QuestionsView.vue": b"x"})
    new_page = project.add_page("Third", "third page")

    prompts = [
        composer.page_creation(project, new_page, head),
        composer.refinement(project, page, "do a thing", PromptKind.FEATURE, head),
        composer.transition(project, page, other, "connect", head),
    ]
    for prompt in prompts:
        assert prompt.messages[0].role == "system"
        assert sum(1 for m in prompt.messages if m.role == "system") == 1


@given(st.text(min_size=1, max_size=200).filter(lambda s: s.strip()))
def test_user_text_embedded_verbatim(user_text):
    registry = ProfileRegistry.bundled()
    composer = PromptComposer(registry)
    project = make_project()
    page = _generated_page(project)
    prompt = composer.refinement(project, page, user_text, PromptKind.FEATURE, head_with(SHARED))
    assert prompt.user_text == user_text


def test_composition_pure_given_same_inputs(composer):
    project = make_project()
    page = _generated_page(project, manifest=["client/src/views/QuestionsView.vue"])
    head = head_with({**SHARED, "client/src/views/QuestionsView.vue": b"x"})
    first = composer.refinement(project, page, "tweak it", PromptKind.LAYOUT, head)
    second = composer.refinement(project, page, "tweak it", PromptKind.LAYOUT, head)
    assert first == second


# -- classifier --------------------------------------------------------------------------------


def test_classify_examples():
    assert (
        classify_prompt("There is an error in the browser console: Uncaught SyntaxError")
        is PromptKind.BUG_FIX
    )
    assert classify_prompt("") is PromptKind.OTHER
    assert classify_prompt("anything", first_in_session=True) is PromptKind.INITIAL
    assert classify_prompt("show the questions in a table") is PromptKind.LAYOUT
    assert classify_prompt("how do I install the sqlite package") is PromptKind.OTHER
    assert classify_prompt("let users answer a question") is PromptKind.FEATURE


def test_classifier_agreement_with_hand_labels():
    """At least 80% agreement with the bundled hand-labelled study log."""
    from pagewright.analytics import load_prompt_log

    entries = load_prompt_log(bundled_path("logs", "exploratory_study.jsonl"))
    seen: set[str] = set()
    total = hits = 0
    for entry in entries:
        first = entry.participant not in seen
        seen.add(entry.participant)
        predicted = classify_prompt(entry.text, first_in_session=first)
        total += 1
        if report_category(predicted) == report_category(PromptKind.parse(entry.kind)):
            hits += 1
    assert total == 164
    assert hits / total >= 0.80, f"agreement {hits}/{total}"


def test_report_category_folding():
    assert report_category(PromptKind.TRANSITION) == "Features"
    assert report_category(PromptKind.PREDEFINED) == "Features"
    folded = {report_category(k) for k in PromptKind}
    assert folded == set(REPORT_CATEGORIES)
