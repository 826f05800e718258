"""Single point of contact with chat-completion providers.

Every exchange is persisted (the request before dispatch, the response on
arrival) and the sampling temperature is forced to zero no matter what a
caller asks for. A deterministic mock provider, keyed by a canonical hash
of the request, makes whole sessions replayable offline.
"""

from __future__ import annotations

import hashlib
import json
import logging
import time
from dataclasses import dataclass
from pathlib import Path

import httpx

from .errors import ConfigurationError, FixtureMissing, ProviderError, ProviderTimeout
from .prompts.compose import ComposedPrompt, Message
from .store import Store

logger = logging.getLogger(__name__)

# Per project policy, never configurable: lower temperature makes the model
# deterministic and more accurate for code generation.
TEMPERATURE = 0.0

_RETRYABLE_STATUSES = {429, 500, 502, 503, 504}


@dataclass(frozen=True)
class ProviderConfig:
    mode: str = "mock"  # mock | live
    endpoint_url: str = ""
    credential: str = ""
    model_id: str = "mock-model"
    timeout_s: int = 120
    max_attempts: int = 3
    backoff_base_ms: int = 500
    fixtures_dir: Path | None = None

    def validate(self) -> None:
        if self.mode == "mock":
            if self.fixtures_dir is None:
                raise ConfigurationError("mock mode requires a fixtures directory")
        elif self.mode == "live":
            if not self.endpoint_url or not self.credential:
                raise ConfigurationError("live mode requires endpoint_url and credential")
        else:
            raise ConfigurationError(f"unknown provider mode: {self.mode!r}")


@dataclass(frozen=True)
class PromptRequest:
    id: int
    project_id: str
    page_id: str | None
    kind: str
    messages: tuple[Message, ...]
    injected_paths: tuple[str, ...]
    model_id: str
    temperature: float
    max_tokens: int | None
    sent_at: str


@dataclass(frozen=True)
class PromptResponse:
    id: int
    request_id: int
    text: str
    token_usage: tuple[int, int]  # (prompt, completion)
    latency_ms: int
    finish_reason: str


def canonical_request_hash(prompt: ComposedPrompt, model_id: str) -> str:
    """Stable digest over roles, texts, and model id.

    This is the mock fixture key; any change to composed wording changes
    the hash, which is exactly the drift the fixtures are meant to catch.
    """
    canon = json.dumps(
        {
            "model": model_id,
            "messages": [[m.role, m.text] for m in prompt.messages],
        },
        sort_keys=True,
        ensure_ascii=True,
        separators=(",", ":"),
    )
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


def _approx_tokens(text: str) -> int:
    return len(text.split())


class ModelGateway:
    def __init__(self, store: Store, config: ProviderConfig, transport: httpx.BaseTransport | None = None, sleep=time.sleep):
        config.validate()
        self.store = store
        self.config = config
        self._transport = transport
        self._sleep = sleep

    def send(
        self, project_id: str, prompt: ComposedPrompt, max_tokens: int | None = None
    ) -> PromptResponse:
        """Dispatch a composed prompt; persist both sides of the exchange."""
        request_id = self.store.insert_request(
            project_id=project_id,
            page_id=prompt.page_id,
            kind=prompt.kind.value,
            messages_json=json.dumps([[m.role, m.text] for m in prompt.messages]),
            injected_paths_json=json.dumps(list(prompt.injected_paths)),
            model_id=self.config.model_id,
            temperature=TEMPERATURE,
            max_tokens=max_tokens,
        )

        started = time.monotonic()
        if self.config.mode == "mock":
            text, finish_reason, usage = self._send_mock(prompt)
        else:
            text, finish_reason, usage = self._send_live(prompt, max_tokens)
        latency_ms = int((time.monotonic() - started) * 1000)

        response_id = self.store.insert_response(
            request_id=request_id,
            text=text,
            prompt_tokens=usage[0],
            completion_tokens=usage[1],
            latency_ms=latency_ms,
            finish_reason=finish_reason,
        )
        return PromptResponse(
            id=response_id,
            request_id=request_id,
            text=text,
            token_usage=usage,
            latency_ms=latency_ms,
            finish_reason=finish_reason,
        )

    def request_hash(self, prompt: ComposedPrompt) -> str:
        return canonical_request_hash(prompt, self.config.model_id)

    # -- providers ----------------------------------------------------------

    def _send_mock(self, prompt: ComposedPrompt) -> tuple[str, str, tuple[int, int]]:
        digest = self.request_hash(prompt)
        fixture = Path(self.config.fixtures_dir) / digest
        if not fixture.is_file():
            raise FixtureMissing(digest)
        text = fixture.read_text(encoding="utf-8")
        usage = (sum(_approx_tokens(m.text) for m in prompt.messages), _approx_tokens(text))
        return text, "stop", usage

    def _send_live(
        self, prompt: ComposedPrompt, max_tokens: int | None
    ) -> tuple[str, str, tuple[int, int]]:
        payload: dict = {
            "model": self.config.model_id,
            "messages": [{"role": m.role, "content": m.text} for m in prompt.messages],
            "temperature": TEMPERATURE,
        }
        if max_tokens is not None:
            payload["max_tokens"] = max_tokens

        url = self.config.endpoint_url.rstrip("/") + "/chat/completions"
        headers = {"Authorization": f"Bearer {self.config.credential}"}
        last_error: Exception | None = None

        for attempt in range(self.config.max_attempts):
            if attempt:
                self._sleep(self.config.backoff_base_ms * (2 ** (attempt - 1)) / 1000.0)
            try:
                with httpx.Client(
                    timeout=self.config.timeout_s, transport=self._transport
                ) as client:
                    response = client.post(url, json=payload, headers=headers)
            except httpx.TimeoutException as exc:
                last_error = ProviderTimeout(f"provider timed out: {exc}")
                continue
            except httpx.TransportError as exc:
                last_error = ProviderError(f"transport failure: {exc}")
                continue

            if response.status_code in _RETRYABLE_STATUSES:
                last_error = ProviderError(
                    f"provider returned {response.status_code}: {response.text[:200]}"
                )
                continue
            if response.status_code != 200:
                raise ProviderError(
                    f"provider returned {response.status_code}: {response.text[:500]}"
                )

            body = response.json()
            choice = body["choices"][0]
            usage = body.get("usage", {})
            return (
                choice["message"]["content"],
                choice.get("finish_reason", "stop"),
                (usage.get("prompt_tokens", 0), usage.get("completion_tokens", 0)),
            )

        logger.warning("provider failed after %d attempts", self.config.max_attempts)
        raise last_error if last_error else ProviderError("provider failed")

    # -- transcript -----------------------------------------------------------

    def transcript(self, project_id: str) -> list[tuple[PromptRequest, PromptResponse | None]]:
        """Chronological request/response pairs, abandoned branches included."""
        pairs = []
        for request_row, response_row in self.store.transcript_rows(project_id):
            request = PromptRequest(
                id=int(request_row["id"]),
                project_id=request_row["project_id"],
                page_id=request_row["page_id"],
                kind=request_row["kind"],
                messages=tuple(
                    Message(role, text) for role, text in json.loads(request_row["messages"])
                ),
                injected_paths=tuple(json.loads(request_row["injected_paths"])),
                model_id=request_row["model_id"],
                temperature=float(request_row["temperature"]),
                max_tokens=request_row["max_tokens"],
                sent_at=request_row["sent_at"],
            )
            response = None
            if response_row is not None:
                response = PromptResponse(
                    id=int(response_row["id"]),
                    request_id=int(response_row["request_id"]),
                    text=response_row["text"],
                    token_usage=(
                        int(response_row["prompt_tokens"]),
                        int(response_row["completion_tokens"]),
                    ),
                    latency_ms=int(response_row["latency_ms"]),
                    finish_reason=response_row["finish_reason"],
                )
            pairs.append((request, response))
        return pairs
