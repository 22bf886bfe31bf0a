"""Expert stage: generate the reply through the selected adapter.

Builds [system prompt] + rendered history + [user query], issues one
completion against the card's model id, and reports latencies. Backend
failures propagate so the workflow layer can take its fallback edge; a
wrong-adapter answer is worse than a reported failure.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from .backend import Backend, ChatMessage, CompletionRequest, DEFAULT_EXPERT_MAX_TOKENS
from .errors import EmptyQuery
from .memory import ConversationMemory
from .registry import AdapterCard
from .routing import RoutingDecision

DEFAULT_EXPERT_TEMPERATURE = 0.7


@dataclass(frozen=True)
class ExpertReply:
    text: str
    domain: str
    decision: RoutingDecision
    latency_expert: float
    latency_total: float


def build_expert_messages(
    card: AdapterCard, query: str, memory: ConversationMemory
) -> tuple[ChatMessage, ...]:
    """System prompt first, history in order, current query last."""
    return (
        ChatMessage("system", card.system_prompt),
        *memory.render_history(),
        ChatMessage("user", query),
    )


def generate_reply(
    card: AdapterCard,
    query: str,
    memory: ConversationMemory,
    backend: Backend,
    decision: RoutingDecision | None = None,
    max_tokens: int = DEFAULT_EXPERT_MAX_TOKENS,
    temperature: float = DEFAULT_EXPERT_TEMPERATURE,
) -> ExpertReply:
    """One completion through the card's adapter. Never mutates memory."""
    if not query.strip():
        raise EmptyQuery("expert query is empty")
    if decision is None:
        decision = RoutingDecision(domain=card.name, strategy="semantic")
    start = time.monotonic()
    req = CompletionRequest(
        model_id=card.model_id,
        messages=build_expert_messages(card, query, memory),
        max_tokens=max_tokens,
        temperature=temperature,
    )
    result = backend.complete(req)
    overhead = max(0.0, time.monotonic() - start - result.latency)
    return ExpertReply(
        text=result.text,
        domain=card.name,
        decision=decision,
        latency_expert=result.latency,
        latency_total=result.latency + overhead,
    )
