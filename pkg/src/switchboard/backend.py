"""Model-serving abstraction.

Two interchangeable backends: an HTTP client speaking the
OpenAI-compatible chat-completions protocol (model id on the wire selects
the adapter), and a deterministic mock for tests and desk-scale benchmarks.
"""

from __future__ import annotations

import os
import random
import re
import time
from dataclasses import dataclass, field
from typing import Protocol

import httpx

from .errors import BackendUnavailable, ProtocolError, Timeout
from .registry import ROUTING_PROMPT_HEADER

ROLES = ("system", "user", "assistant")

DEFAULT_EXPERT_MAX_TOKENS = 512
DEFAULT_ROUTER_MAX_TOKENS = 16

ENV_BACKEND_URL = "SWITCHBOARD_BACKEND_URL"
ENV_API_KEY = "SWITCHBOARD_API_KEY"


@dataclass(frozen=True)
class ChatMessage:
    role: str
    content: str

    def __post_init__(self):
        if self.role not in ROLES:
            raise ValueError(f"invalid role {self.role!r}")


@dataclass(frozen=True)
class CompletionRequest:
    model_id: str
    messages: tuple[ChatMessage, ...]
    max_tokens: int = DEFAULT_EXPERT_MAX_TOKENS
    temperature: float = 0.0

    def __post_init__(self):
        if not self.messages:
            raise ValueError("messages must be non-empty")
        if self.max_tokens < 1:
            raise ValueError("max_tokens must be positive")
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")


@dataclass(frozen=True)
class CompletionResult:
    text: str
    latency: float
    token_estimate: int = 0

    def __post_init__(self):
        if self.latency < 0:
            raise ValueError("latency must be >= 0")


class Backend(Protocol):
    def complete(self, req: CompletionRequest) -> CompletionResult: ...

    def ping(self) -> bool: ...


class HttpBackend:
    """Wire client for POST {base_url}/v1/chat/completions.

    One request per complete() call unless retries > 0. The API key, when
    present, is sent as a bearer token.
    """

    def __init__(
        self,
        base_url: str | None = None,
        api_key: str | None = None,
        deadline: float = 60.0,
        retries: int = 0,
        client: httpx.Client | None = None,
    ):
        self.base_url = (base_url or os.environ.get(ENV_BACKEND_URL, "")).rstrip("/")
        if not self.base_url:
            raise ValueError(f"backend base URL required (or set {ENV_BACKEND_URL})")
        self.api_key = api_key if api_key is not None else os.environ.get(ENV_API_KEY)
        self.deadline = deadline
        self.retries = retries
        self._client = client or httpx.Client(timeout=deadline)

    def _headers(self) -> dict[str, str]:
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        return headers

    def complete(self, req: CompletionRequest) -> CompletionResult:
        body = {
            "model": req.model_id,
            "messages": [{"role": m.role, "content": m.content} for m in req.messages],
            "max_tokens": req.max_tokens,
            "temperature": req.temperature,
        }
        url = f"{self.base_url}/v1/chat/completions"
        attempts = 1 + max(0, self.retries)
        start = time.monotonic()
        last_exc: Exception | None = None
        for _ in range(attempts):
            try:
                resp = self._client.post(
                    url, json=body, headers=self._headers(), timeout=self.deadline
                )
            except httpx.TimeoutException as exc:
                last_exc = Timeout(f"backend call exceeded {self.deadline}s", req.model_id)
                last_exc.__cause__ = exc
                continue
            except httpx.TransportError as exc:
                last_exc = BackendUnavailable(f"backend unreachable: {exc}", req.model_id)
                last_exc.__cause__ = exc
                continue
            if resp.status_code >= 500:
                last_exc = BackendUnavailable(
                    f"backend returned HTTP {resp.status_code}", req.model_id
                )
                continue
            if resp.status_code != 200:
                raise ProtocolError(
                    f"unexpected HTTP {resp.status_code}: {resp.text[:200]}", req.model_id
                )
            try:
                text = resp.json()["choices"][0]["message"]["content"]
            except (ValueError, KeyError, IndexError, TypeError) as exc:
                raise ProtocolError(
                    f"malformed completion body: {exc}", req.model_id
                ) from exc
            if not isinstance(text, str):
                raise ProtocolError("completion content is not text", req.model_id)
            elapsed = time.monotonic() - start
            return CompletionResult(
                text=text, latency=elapsed, token_estimate=max(1, len(text.split()))
            )
        assert last_exc is not None
        raise last_exc

    def ping(self) -> bool:
        # Any HTTP response counts as reachable; only transport failure does not.
        try:
            self._client.get(f"{self.base_url}/v1/models", timeout=2.0)
        except httpx.TransportError:
            return False
        return True


_QUERY_RE = re.compile(r'Query: "(.*)"', re.DOTALL)


@dataclass
class MockLatency:
    """Uniform simulated latency ranges (seconds) per call kind."""

    router: tuple[float, float] = (0.0, 0.0)
    expert: tuple[float, float] = (0.0, 0.0)
    first_call_penalty: float = 0.0


class MockBackend:
    """Deterministic test double.

    Modes:
      oracle      -- answers routing prompts with the fixture-labeled
                     domain for the embedded query; expert prompts get a
                     canned domain-tagged reply.
      scripted    -- maps the last user message verbatim to a reply.
      latency_sim -- oracle behavior plus seeded uniform delays, reported
                     as the result latency (no real sleeping, so percentile
                     statistics stay testable at desk scale).

    (mode, seed, request sequence) fully determines every output.
    """

    def __init__(
        self,
        mode: str = "scripted",
        seed: int = 0,
        labels: dict[str, str] | None = None,
        scripted: dict[str, str] | None = None,
        latency: MockLatency | None = None,
        model_names: dict[str, str] | None = None,
        fail_model_ids: frozenset[str] | set[str] = frozenset(),
        down: bool = False,
    ):
        if mode not in ("oracle", "scripted", "latency_sim"):
            raise ValueError(f"invalid mock mode {mode!r}")
        self.mode = mode
        self.labels = dict(labels or {})
        self.scripted = dict(scripted or {})
        self.latency = latency or MockLatency()
        self.model_names = dict(model_names or {})
        self.fail_model_ids = set(fail_model_ids)
        self.down = down
        self._rng = random.Random(seed)
        self._calls = 0
        self.requests: list[CompletionRequest] = []

    def _is_routing(self, req: CompletionRequest) -> bool:
        return req.messages[-1].content.startswith(ROUTING_PROMPT_HEADER)

    def _embedded_query(self, req: CompletionRequest) -> str:
        m = _QUERY_RE.search(req.messages[-1].content)
        return m.group(1) if m else ""

    def _reply_text(self, req: CompletionRequest) -> str:
        last_user = next(
            (m.content for m in reversed(req.messages) if m.role == "user"), ""
        )
        if self.mode == "scripted":
            return self.scripted.get(last_user, f"[mock] {last_user[:60]}")
        if self._is_routing(req):
            query = self._embedded_query(req)
            return self.labels.get(query, "General")
        domain = self.model_names.get(req.model_id, req.model_id)
        return f"[{domain}] canned expert reply to: {last_user[:60]}"

    def complete(self, req: CompletionRequest) -> CompletionResult:
        self.requests.append(req)
        self._calls += 1
        if self.down:
            raise BackendUnavailable("mock backend is down", req.model_id)
        if req.model_id in self.fail_model_ids:
            raise BackendUnavailable(
                f"mock failure injected for {req.model_id}", req.model_id
            )
        text = self._reply_text(req)
        latency = 0.0
        if self.mode == "latency_sim":
            lo, hi = self.latency.router if self._is_routing(req) else self.latency.expert
            latency = self._rng.uniform(lo, hi)
            if self._calls == 1:
                latency = max(0.0, latency + self.latency.first_call_penalty)
        return CompletionResult(
            text=text, latency=latency, token_estimate=max(1, len(text.split()))
        )

    def ping(self) -> bool:
        return not self.down
