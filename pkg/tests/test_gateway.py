"""Model gateway: persistence, temperature policy, mock keying, retries."""

import json
from pathlib import Path

import httpx
import pytest

from pagewright.errors import FixtureMissing, ProviderError, ProviderTimeout
from pagewright.gateway import (
    ModelGateway,
    ProviderConfig,
    canonical_request_hash,
)
from pagewright.model import Project
from pagewright.prompts.compose import ComposedPrompt, Message
from pagewright.prompts.kinds import PromptKind
from pagewright.store import Store


def make_prompt(user_text="hello", system_text="sys") -> ComposedPrompt:
    return ComposedPrompt(
        messages=(Message("system", system_text), Message("user", user_text)),
        kind=PromptKind.FEATURE,
        page_id=None,
        injected_paths=(),
    )


@pytest.fixture
def store(tmp_path) -> Store:
    s = Store(tmp_path / "db.sqlite")
    s.create_project(Project.create("GatewayApp", "", "default"))
    return s


@pytest.fixture
def project_id(store) -> str:
    return store.list_project_ids()[0]


def mock_gateway(store, tmp_path) -> ModelGateway:
    fixtures = tmp_path / "fx"
    fixtures.mkdir(exist_ok=True)
    return ModelGateway(store, ProviderConfig(mode="mock", fixtures_dir=fixtures))


def test_mock_send_is_deterministic_and_persisted(store, tmp_path, project_id):
    gateway = mock_gateway(store, tmp_path)
    prompt = make_prompt()
    digest = gateway.request_hash(prompt)
    (Path(gateway.config.fixtures_dir) / digest).write_text("scripted reply", encoding="utf-8")

    first = gateway.send(project_id, prompt)
    second = gateway.send(project_id, prompt)
    assert first.text == second.text == "scripted reply"
    assert store.request_count(project_id) == 2


def test_temperature_always_zero(store, tmp_path, project_id):
    gateway = mock_gateway(store, tmp_path)
    prompt = make_prompt()
    (Path(gateway.config.fixtures_dir) / gateway.request_hash(prompt)).write_text("ok")
    gateway.send(project_id, prompt)
    assert store.all_request_temperatures() == [0.0]


def test_fixture_missing_names_the_hash(store, tmp_path, project_id):
    gateway = mock_gateway(store, tmp_path)
    prompt = make_prompt("never scripted")
    with pytest.raises(FixtureMissing) as exc_info:
        gateway.send(project_id, prompt)
    assert exc_info.value.request_hash == gateway.request_hash(prompt)
    # The request was still persisted before dispatch.
    assert store.request_count(project_id) == 1


def test_canonical_hash_stability_and_sensitivity():
    prompt = make_prompt()
    assert canonical_request_hash(prompt, "m") == canonical_request_hash(prompt, "m")
    assert canonical_request_hash(prompt, "m") != canonical_request_hash(prompt, "m2")
    nudged = make_prompt(user_text="hello!")
    assert canonical_request_hash(prompt, "m") != canonical_request_hash(nudged, "m")


def test_transcript_chronological_with_pairs(store, tmp_path, project_id):
    gateway = mock_gateway(store, tmp_path)
    assert gateway.transcript(project_id) == []
    for i in range(3):
        prompt = make_prompt(f"msg {i}")
        (Path(gateway.config.fixtures_dir) / gateway.request_hash(prompt)).write_text(f"r{i}")
        gateway.send(project_id, prompt)
    # One failed send: request persisted, response absent.
    with pytest.raises(FixtureMissing):
        gateway.send(project_id, make_prompt("missing"))

    transcript = gateway.transcript(project_id)
    assert len(transcript) == store.request_count(project_id) == 4
    ids = [req.id for req, _ in transcript]
    assert ids == sorted(ids)
    assert [resp.text for _, resp in transcript[:3]] == ["r0", "r1", "r2"]
    assert transcript[3][1] is None
    for req, resp in transcript[:3]:
        assert resp.request_id == req.id


def _live_config(**overrides) -> ProviderConfig:
    defaults = dict(
        mode="live",
        endpoint_url="https://provider.example",
        credential="secret",
        model_id="m1",
        max_attempts=3,
        backoff_base_ms=10,
    )
    defaults.update(overrides)
    return ProviderConfig(**defaults)


def _ok_response(text="fine"):
    return httpx.Response(
        200,
        json={
            "choices": [{"message": {"content": text}, "finish_reason": "stop"}],
            "usage": {"prompt_tokens": 5, "completion_tokens": 7},
        },
    )


def test_live_send_retries_transient_then_succeeds(store, project_id):
    attempts = {"n": 0}
    sleeps: list[float] = []

    def handler(request: httpx.Request) -> httpx.Response:
        attempts["n"] += 1
        assert request.headers["authorization"] == "Bearer secret"
        body = json.loads(request.content)
        assert body["temperature"] == 0
        if attempts["n"] < 3:
            return httpx.Response(503, text="busy")
        return _ok_response("recovered")

    gateway = ModelGateway(
        store, _live_config(), transport=httpx.MockTransport(handler), sleep=sleeps.append
    )
    response = gateway.send(project_id, make_prompt())
    assert response.text == "recovered"
    assert response.token_usage == (5, 7)
    assert attempts["n"] == 3
    assert sleeps == [0.01, 0.02]  # exponential backoff from the 10ms base


def test_live_send_non_retryable_fails_fast(store, project_id):
    calls = {"n": 0}

    def handler(_request):
        calls["n"] += 1
        return httpx.Response(401, text="bad credential")

    gateway = ModelGateway(store, _live_config(), transport=httpx.MockTransport(handler))
    with pytest.raises(ProviderError) as exc_info:
        gateway.send(project_id, make_prompt())
    assert calls["n"] == 1
    assert "401" in exc_info.value.message


def test_live_send_timeout_exhausts_attempts(store, project_id):
    def handler(_request):
        raise httpx.ConnectTimeout("too slow")

    gateway = ModelGateway(
        store, _live_config(max_attempts=2), transport=httpx.MockTransport(handler), sleep=lambda _: None
    )
    with pytest.raises(ProviderTimeout):
        gateway.send(project_id, make_prompt())


def test_provider_config_validation(tmp_path):
    from pagewright.errors import ConfigurationError

    with pytest.raises(ConfigurationError):
        ProviderConfig(mode="mock", fixtures_dir=None).validate()
    with pytest.raises(ConfigurationError):
        ProviderConfig(mode="live", endpoint_url="", credential="").validate()
    with pytest.raises(ConfigurationError):
        ProviderConfig(mode="weird").validate()
    ProviderConfig(mode="mock", fixtures_dir=tmp_path).validate()
