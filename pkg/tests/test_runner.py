"""Scaffolding, predefined features, install, and process supervision."""

import json
import shutil
import socket
import time
from pathlib import Path

import httpx
import psutil
import pytest

from pagewright.bundled import bundled_path
from pagewright.errors import ConflictError, ContractViolation, InstallFailed, NotFoundError
from pagewright.model import Project
from pagewright.profiles import ProfileRegistry
from pagewright.runner import AppRunner, scan_digest
from pagewright.store import Store
from pagewright.versioning import ObjectStore, VersionStore

# Frozen reference digests of the shipped profiles' scaffold trees,
# computed once with scripts/generate_fixtures.py.
FROZEN_SCAFFOLD_DIGESTS = {
    "default": "b7043ea0426dafb043b4501f2aa6022b4e1f56baf572406ecbb277a2d0625dd0",
    "testprofile": "d0da5669a8cfffef09fcaaa08dfa24fe21b3afda501f394491e80675e66786db",
}


@pytest.fixture
def env(tmp_path):
    store = Store(tmp_path / "meta.db")
    versions = VersionStore(store, ObjectStore(tmp_path / "objects"), tmp_path / "workspaces")
    runner = AppRunner(
        versions,
        ProfileRegistry.bundled(),
        port_range=(4340, 4379),
        readiness_deadline_s=10.0,
        supervision_interval_s=0.1,
    )
    project = Project.create("RunnerApp", "runner test app", "testprofile")
    store.create_project(project)
    yield store, versions, runner, project
    runner.stop_all()


def test_scaffold_creates_root_snapshot(env):
    _, versions, runner, project = env
    snapshot = runner.scaffold(project)
    assert snapshot.parent is None
    assert snapshot.label == "scaffold"
    root_dir = versions.workspace_dir(project)
    assert (root_dir / "client").is_dir()
    assert (root_dir / "server").is_dir()


def test_scaffold_twice_is_contract_violation(env):
    _, _, runner, project = env
    runner.scaffold(project)
    with pytest.raises(ContractViolation):
        runner.scaffold(project)


@pytest.mark.parametrize("profile_id", ["default", "testprofile"])
def test_scaffold_digest_matches_frozen_reference(tmp_path, profile_id):
    store = Store(tmp_path / "meta.db")
    versions = VersionStore(store, ObjectStore(tmp_path / "objects"), tmp_path / "ws")
    runner = AppRunner(versions, ProfileRegistry.bundled())
    project = Project.create(f"Frozen-{profile_id}", "", profile_id)
    store.create_project(project)
    snapshot = runner.scaffold(project)
    assert snapshot.tree_digest == FROZEN_SCAFFOLD_DIGESTS[profile_id]


def test_apply_predefined_feature(env):
    _, versions, runner, project = env
    runner.scaffold(project)
    snapshot = runner.apply_predefined_feature(project, "login")
    assert snapshot.label == "login"
    head = versions.head_workspace(project)
    assert "client/pages/login.html" in head.files

    with pytest.raises(ConflictError):
        runner.apply_predefined_feature(project, "login")
    with pytest.raises(NotFoundError):
        runner.apply_predefined_feature(project, "payments")


def test_predefined_feature_files_match_profile_manifest(env):
    """Projection file set equals the profile's declared canned file set."""
    _, versions, runner, project = env
    runner.scaffold(project)
    before = set(versions.head_workspace(project).files)
    runner.apply_predefined_feature(project, "user_registration")
    after = set(versions.head_workspace(project).files)

    profile = runner.profiles.get("testprofile")
    assert sorted(after - before) == profile.feature("user_registration").manifest()


def test_feature_application_digest_is_reproducible(tmp_path):
    """scaffold + predefined feature yields a constant tree digest."""
    digests = []
    for run in range(2):
        store = Store(tmp_path / f"meta{run}.db")
        versions = VersionStore(store, ObjectStore(tmp_path / f"obj{run}"), tmp_path / f"ws{run}")
        runner = AppRunner(versions, ProfileRegistry.bundled())
        project = Project.create(f"Repro{run}", "", "testprofile")
        store.create_project(project)
        runner.scaffold(project)
        digests.append(runner.apply_predefined_feature(project, "login").tree_digest)
    assert digests[0] == digests[1]


def test_feature_reapply_allowed_after_rollback(env):
    _, versions, runner, project = env
    runner.scaffold(project)
    runner.apply_predefined_feature(project, "login")
    versions.rollback(project)
    snapshot = runner.apply_predefined_feature(project, "login")
    assert snapshot.label == "login"


def test_install_success_and_idempotence(env):
    _, versions, runner, project = env
    runner.scaffold(project)
    report = runner.install(project)
    assert report.ok
    assert all(step.exit_code == 0 for step in report.steps)
    root = versions.workspace_dir(project)
    assert (root / ".deps" / "ok").exists()

    ignore = runner.profiles.get("testprofile").ignore_globs
    digest_before = scan_digest(root, ignore)
    rerun = runner.install(project)
    assert rerun.ok
    assert scan_digest(root, ignore) == digest_before


def _write_failing_profile(tmp_path: Path) -> Path:
    """A profile whose install command exits nonzero."""
    profile_dir = tmp_path / "brokenprofile"
    shutil.copytree(bundled_path("profiles", "testprofile"), profile_dir)
    manifest = json.loads((profile_dir / "profile.json").read_text())
    manifest["id"] = "brokenprofile"
    manifest["install_commands"] = [
        {"argv": ["python3", "-c", "import sys; print('boom diagnostics'); sys.exit(3)"], "cwd": "."}
    ]
    (profile_dir / "profile.json").write_text(json.dumps(manifest))
    return profile_dir


def test_install_failure_carries_log_tail(tmp_path):
    store = Store(tmp_path / "meta.db")
    versions = VersionStore(store, ObjectStore(tmp_path / "objects"), tmp_path / "ws")
    registry = ProfileRegistry.bundled([_write_failing_profile(tmp_path)])
    runner = AppRunner(versions, registry)
    project = Project.create("BrokenApp", "", "brokenprofile")
    store.create_project(project)
    runner.scaffold(project)
    with pytest.raises(InstallFailed) as exc_info:
        runner.install(project)
    assert any("boom diagnostics" in line for line in exc_info.value.log_tail)


def test_start_status_stop_lifecycle(env):
    _, _, runner, project = env
    runner.scaffold(project)
    runner.install(project)

    handle = runner.start(project)
    assert handle.state == "running", handle.log_tail()
    assert handle.preview_url.startswith("http://127.0.0.1:")
    response = httpx.get(handle.preview_url, timeout=5)
    assert response.status_code == 200

    with pytest.raises(ContractViolation):
        runner.start(project)

    pids = list(handle.pids.values())
    assert pids
    stopped = runner.stop(project.id)
    assert stopped.state == "stopped"
    time.sleep(0.1)
    for pid in pids:
        assert not psutil.pid_exists(pid) or psutil.Process(pid).status() == psutil.STATUS_ZOMBIE


def test_external_kill_detected_quickly(env):
    _, _, runner, project = env
    runner.scaffold(project)
    handle = runner.start(project)
    assert handle.state == "running", handle.log_tail()

    victim = handle.pids["backend"]
    killed_at = time.monotonic()
    psutil.Process(victim).kill()
    while runner.status(project.id).state != "failed":
        assert time.monotonic() - killed_at < 2.0, "kill not detected within 2s"
        time.sleep(0.05)
    assert runner.status(project.id).state == "failed"


def test_start_skips_occupied_ports(env):
    _, versions, runner, project = env
    runner.scaffold(project)
    isolated = AppRunner(
        versions, runner.profiles, port_range=(4320, 4339), readiness_deadline_s=10.0
    )
    blocker = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    blocker.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    blocker.bind(("127.0.0.1", 4320))
    blocker.listen(1)
    try:
        handle = isolated.start(project)
        assert handle.state == "running", handle.log_tail()
        assert 4320 not in handle.ports.values()
    finally:
        blocker.close()
        isolated.stop(project.id)


def test_status_unknown_project(env):
    _, _, runner, _ = env
    with pytest.raises(NotFoundError):
        runner.status("nope")


def test_log_ring_is_bounded(env):
    _, _, runner, project = env
    runner.scaffold(project)
    runner_small = AppRunner(
        runner.versions, runner.profiles, port_range=(4380, 4399), log_lines=10,
        readiness_deadline_s=10.0,
    )
    handle = runner_small.start(project)
    try:
        for i in range(50):
            handle.append_log("test", f"line {i}")
        assert len(handle.log_buffer) == 10
        assert handle.log_tail(5)[-1] == "[test] line 49"
    finally:
        runner_small.stop(project.id)
