"""Agent backends: the HTTP chat endpoint and hermetic test doubles.

Credentials are read from an environment variable named in the
configuration, never from config values themselves. Real backends are
throttled by a bounded-concurrency semaphore and may be called from
several decoding workers at once.
"""

from __future__ import annotations

import base64
import json
import logging
import os
import threading
import time
from abc import ABC, abstractmethod
from dataclasses import dataclass
from pathlib import Path

import requests as http_requests

from ..errors import TransportError
from .requests import BackendRequest, ImagePart, TextPart, request_hash

logger = logging.getLogger(__name__)


class AgentBackend(ABC):
    """Turns one request into raw response text."""

    name: str = "backend"
    supports_images: bool = False

    @abstractmethod
    def complete(self, request: BackendRequest) -> str:
        ...


@dataclass(frozen=True)
class RetryPolicy:
    """Bounded retries; parse re-asks are budgeted separately from transport."""

    transport_retries: int = 2
    parse_retries: int = 1
    backoff_base: float = 0.5
    backoff_factor: float = 2.0


def call_with_transport_retries(
    backend: AgentBackend, request: BackendRequest, policy: RetryPolicy
) -> str:
    """Invoke the backend, retrying transport failures with backoff."""
    attempts = policy.transport_retries + 1
    delay = policy.backoff_base
    last: TransportError | None = None
    for attempt in range(attempts):
        try:
            return backend.complete(request)
        except TransportError as exc:
            last = exc
            if attempt + 1 < attempts:
                logger.warning(
                    "%s transport failure (attempt %d/%d): %s",
                    backend.name, attempt + 1, attempts, exc,
                )
                if delay > 0:
                    time.sleep(delay)
                delay *= policy.backoff_factor
    assert last is not None
    raise last


class MockBackend(AgentBackend):
    """Fixture-directory backend for offline runs.

    Responses are files: ``<key>.json`` when the request carries a key
    (utterance id), otherwise ``<request-hash>.json``. The hash file is
    also tried as a fallback when the keyed file is absent.
    """

    supports_images = True

    def __init__(self, fixtures_dir, name: str = "mock"):
        self.fixtures_dir = Path(fixtures_dir)
        self.name = name
        self.calls = 0

    def complete(self, request: BackendRequest) -> str:
        self.calls += 1
        candidates = []
        if request.key:
            candidates.append(self.fixtures_dir / f"{request.key}.json")
        candidates.append(
            self.fixtures_dir / f"{request_hash(self.name, request)}.json"
        )
        for path in candidates:
            if path.is_file():
                return path.read_text(encoding="utf-8")
        raise TransportError(
            f"mock backend {self.name!r}: no fixture among "
            f"{[p.name for p in candidates]}"
        )


class ScriptedBackend(AgentBackend):
    """Replays a fixed response list; records every request it sees."""

    supports_images = True

    def __init__(self, responses, name: str = "scripted"):
        self.responses = list(responses)
        self.name = name
        self.calls: list[BackendRequest] = []

    def complete(self, request: BackendRequest) -> str:
        self.calls.append(request)
        if not self.responses:
            raise TransportError(f"scripted backend {self.name!r} exhausted")
        return self.responses.pop(0)


class HttpChatBackend(AgentBackend):
    """Chat-completion-style endpoint with interleaved text and images.

    The request becomes one user message whose content alternates text
    and base64 data-URL images; the response schema rides along as a
    constrained-output directive. The API key variable is named in the
    config and resolved from the environment at call time.
    """

    supports_images = True

    def __init__(
        self,
        endpoint: str,
        model: str,
        api_key_env: str | None = None,
        name: str | None = None,
        timeout: float = 120.0,
        max_inflight: int = 4,
    ):
        self.endpoint = endpoint
        self.model = model
        self.api_key_env = api_key_env
        self.name = name or f"http:{model}"
        self.timeout = timeout
        self._limiter = threading.Semaphore(max_inflight)

    def _headers(self) -> dict:
        headers = {"Content-Type": "application/json"}
        if self.api_key_env:
            key = os.environ.get(self.api_key_env)
            if not key:
                raise TransportError(
                    f"credential variable {self.api_key_env!r} is not set"
                )
            headers["Authorization"] = f"Bearer {key}"
        return headers

    def _payload(self, request: BackendRequest) -> dict:
        content = []
        for part in request.parts:
            if isinstance(part, TextPart):
                content.append({"type": "text", "text": part.text})
            elif isinstance(part, ImagePart):
                with open(part.path, "rb") as fh:
                    encoded = base64.b64encode(fh.read()).decode("ascii")
                content.append({"type": "text", "text": f"[image: {part.label}]"})
                content.append(
                    {
                        "type": "image_url",
                        "image_url": {"url": f"data:image/png;base64,{encoded}"},
                    }
                )
        payload = {
            "model": self.model,
            "messages": [{"role": "user", "content": content}],
        }
        if request.schema:
            payload["response_format"] = {
                "type": "json_schema",
                "json_schema": {"name": "response", "schema": request.schema},
            }
        return payload

    def _post(self, payload: dict) -> dict:
        try:
            response = http_requests.post(
                self.endpoint, json=payload, headers=self._headers(),
                timeout=self.timeout,
            )
        except http_requests.RequestException as exc:
            raise TransportError(f"{self.name}: {exc}") from exc
        if response.status_code != 200:
            raise TransportError(
                f"{self.name}: status {response.status_code}: {response.text[:200]}"
            )
        try:
            return response.json()
        except ValueError as exc:
            raise TransportError(f"{self.name}: non-JSON response body") from exc

    def complete(self, request: BackendRequest) -> str:
        payload = self._payload(request)
        with self._limiter:
            document = self._post(payload)
        try:
            return document["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as exc:
            raise TransportError(
                f"{self.name}: response missing choices[0].message.content"
            ) from exc
