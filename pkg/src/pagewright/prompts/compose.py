"""Builds every message sequence sent to the model.

All technology and architecture wording lives in the stack profile's
templates; the user contributes only functional-requirement text, which is
embedded verbatim. Composition is pure: the same (project, page, workspace)
always yields byte-identical messages, which is what lets the mock provider
key fixtures on a canonical hash.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

from ..errors import ContractViolation, ValidationError
from ..model import Page, Project, Workspace
from .kinds import REFINEMENT_KINDS, PromptKind

if TYPE_CHECKING:
    from ..profiles import ProfileRegistry, StackProfile


@dataclass(frozen=True)
class Message:
    role: str  # system | user | assistant
    text: str


@dataclass(frozen=True)
class ComposedPrompt:
    messages: tuple[Message, ...]
    kind: PromptKind
    page_id: str | None
    injected_paths: tuple[str, ...]

    @property
    def system_text(self) -> str:
        return self.messages[0].text

    @property
    def user_text(self) -> str:
        return self.messages[-1].text


_KIND_TASK_PHRASES = {
    PromptKind.FEATURE: "a new feature request",
    PromptKind.BUG_FIX: "a bug fix request",
    PromptKind.LAYOUT: "a layout adjustment request",
}


def select_context_files(project: Project, page: Page, head: Workspace, profile: "StackProfile") -> list[str]:
    """Files to embed in a refinement prompt for *page*.

    The page's own manifest (intersected with what still exists at HEAD)
    plus the profile's shared files (router, server entry, schema) that
    exist at HEAD. Lexicographic order, deduplicated.
    """
    present = set(head.files)
    selected = (page.file_manifest & present) | (set(profile.shared_context_paths) & present)
    return sorted(selected)


class PromptComposer:
    """Stateless composer bound to a profile registry."""

    def __init__(self, profiles: "ProfileRegistry"):
        self._profiles = profiles

    def _profile(self, project: Project) -> "StackProfile":
        return self._profiles.get(project.stack_profile_id)

    def system_preamble(self, project: Project) -> str:
        """Deterministic system text: stack directives plus project context.

        The context section is omitted entirely when the project has no
        context description.
        """
        profile = self._profile(project)
        context_section = ""
        if project.context_description:
            context_section = profile.templates["context_section"].render(
                {"context_description": project.context_description}
            )
        return profile.templates["system_preamble"].render(
            {"context_section": context_section}
        )

    def page_creation(self, project: Project, page: Page, head: Workspace) -> ComposedPrompt:
        self._require_member(project, page)
        if page.status == "generated":
            raise ContractViolation(
                f"page {page.name!r} is already generated; submit a refinement instead"
            )
        if not page.description.strip():
            raise ValidationError("page description must be non-empty")
        profile = self._profile(project)

        # The project's very first generation gets a clean slate; once any
        # page exists, shared files are embedded so new pages wire into the
        # existing routing and server entry points.
        if any(p.status == "generated" for p in project.pages):
            injected = select_context_files(project, page, head, profile)
        else:
            injected = []

        task = profile.templates["page_creation_task"].render({"page_name": page.name})
        user = profile.templates["page_creation_user"].render(
            {"page_name": page.name, "page_description": page.description}
        )
        return ComposedPrompt(
            messages=(
                Message("system", self._system_text(project, task, injected, head)),
                Message("user", user),
            ),
            kind=PromptKind.INITIAL,
            page_id=page.id,
            injected_paths=tuple(injected),
        )

    def refinement(
        self, project: Project, page: Page, user_text: str, kind: PromptKind, head: Workspace
    ) -> ComposedPrompt:
        self._require_member(project, page)
        if kind not in REFINEMENT_KINDS:
            raise ValidationError(f"refinement kind must be one of {[k.value for k in REFINEMENT_KINDS]}")
        if page.status != "generated":
            raise ContractViolation(f"page {page.name!r} has not been generated yet")
        if not user_text.strip():
            raise ValidationError("prompt text must be non-empty")
        profile = self._profile(project)
        injected = select_context_files(project, page, head, profile)
        task = profile.templates["refinement_task"].render(
            {"page_name": page.name, "request_kind": _KIND_TASK_PHRASES[kind]}
        )
        return ComposedPrompt(
            messages=(
                Message("system", self._system_text(project, task, injected, head)),
                Message("user", user_text),
            ),
            kind=kind,
            page_id=page.id,
            injected_paths=tuple(injected),
        )

    def transition(
        self,
        project: Project,
        source_page: Page,
        target_page: Page,
        user_text: str,
        head: Workspace,
    ) -> ComposedPrompt:
        self._require_member(project, source_page)
        self._require_member(project, target_page)
        if source_page.id == target_page.id:
            raise ValidationError("a page cannot transition to itself")
        for page in (source_page, target_page):
            if page.status != "generated":
                raise ContractViolation(f"page {page.name!r} has not been generated yet")
        if not user_text.strip():
            raise ValidationError("prompt text must be non-empty")
        profile = self._profile(project)

        present = set(head.files)
        injected = sorted(
            (source_page.file_manifest & present)
            | (target_page.file_manifest & present)
            | (set(profile.shared_context_paths) & present)
        )
        task = profile.templates["transition_task"].render(
            {"source_page": source_page.name, "target_page": target_page.name}
        )
        return ComposedPrompt(
            messages=(
                Message("system", self._system_text(project, task, injected, head)),
                Message("user", user_text),
            ),
            kind=PromptKind.TRANSITION,
            page_id=source_page.id,
            injected_paths=tuple(injected),
        )

    def _system_text(
        self, project: Project, task: str, injected: list[str], head: Workspace
    ) -> str:
        parts = [self.system_preamble(project), task]
        for path in injected:
            entry = head.get(path)
            if entry is None:
                continue
            parts.append(f"### CONTEXT FILE: {path}\n```\n{entry.text}\n```")
        return "\n\n".join(part.strip() for part in parts if part.strip()) + "\n"

    @staticmethod
    def _require_member(project: Project, page: Page) -> None:
        if project.page_by_id(page.id) is None:
            raise ValidationError(f"page {page.id!r} does not belong to project {project.name!r}")
