"""Shared fixtures: service cores on temp dirs, fixture-file helpers."""

from __future__ import annotations

from pathlib import Path

import pytest

from pagewright.gateway import ProviderConfig, canonical_request_hash
from pagewright.service import ServiceConfig, ServiceCore


@pytest.fixture
def fixtures_dir(tmp_path: Path) -> Path:
    path = tmp_path / "fixtures"
    path.mkdir()
    return path


@pytest.fixture
def core(tmp_path: Path, fixtures_dir: Path):
    """Service core in mock mode, auto-install off, single worker."""
    service = ServiceCore(
        ServiceConfig(
            data_root=tmp_path / "data",
            provider=ProviderConfig(mode="mock", fixtures_dir=fixtures_dir),
            auto_install=False,
            worker_count=1,
            readiness_deadline_s=10.0,
        )
    )
    yield service
    service.close()


def provide_fixture(core: ServiceCore, composed, response_text: str) -> str:
    """Write *response_text* as the mock fixture for a composed prompt."""
    digest = canonical_request_hash(composed, core.config.provider.model_id)
    path = Path(core.config.provider.fixtures_dir) / digest
    path.write_text(response_text, encoding="utf-8")
    return digest


def compose_for(core: ServiceCore, project_id: str, page_id: str, kind: str, text: str,
                target_page_id: str | None = None):
    """Compose exactly what the pipeline will compose for a submission."""
    from pagewright.prompts import PromptKind

    project = core.get_project(project_id)
    page = project.page_by_id(page_id) or project.page_by_name(page_id)
    head = core.versions.head_workspace(project)
    prompt_kind = PromptKind.parse(kind)
    if prompt_kind is PromptKind.INITIAL:
        return core.composer.page_creation(project, page, head)
    if prompt_kind is PromptKind.TRANSITION:
        target = project.page_by_id(target_page_id) or project.page_by_name(target_page_id)
        return core.composer.transition(project, page, target, text, head)
    return core.composer.refinement(project, page, text, prompt_kind, head)


def run_prompt(core: ServiceCore, project_id: str, page: str, kind: str, text: str,
               response_text: str, target: str | None = None, label: str | None = None):
    """Provide the fixture for a submission, run it, and return the done ticket."""
    composed = compose_for(core, project_id, page, kind, text, target_page_id=target)
    provide_fixture(core, composed, response_text)
    ticket = core.submit_prompt(project_id, page, kind, text, target_page_id=target, label=label)
    finished = core.wait_for_job(ticket.id, timeout_s=30)
    assert finished.state == "done", finished.error
    return finished
