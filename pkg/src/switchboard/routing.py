"""Routing strategies: semantic (primary), keyword baseline, hybrid, random.

All strategies are total over the registry: every decision names a real
card, and failures degrade to the fallback card instead of raising.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field

from .backend import (
    Backend,
    ChatMessage,
    CompletionRequest,
    DEFAULT_ROUTER_MAX_TOKENS,
)
from .errors import BackendError, EmptyQuery
from .registry import AdapterCard, Registry, render_routing_prompt

STRATEGIES = ("semantic", "keyword", "hybrid", "random")
KEYWORD_MODES = ("substring", "word")

DEFAULT_ROUTER_MODEL_ID = "base"
DEFAULT_OVERRIDE_THRESHOLD = 3


@dataclass(frozen=True)
class RoutingDecision:
    domain: str
    strategy: str
    raw_output: str = ""
    used_fallback: bool = False
    keyword_scores: dict[str, int] = field(default_factory=dict)
    elapsed: float = 0.0


@dataclass
class RouterConfig:
    """Knobs shared by the workflow and the eval harness."""

    strategy: str = "semantic"
    keyword_mode: str = "substring"
    override_threshold: int = DEFAULT_OVERRIDE_THRESHOLD
    router_model_id: str = DEFAULT_ROUTER_MODEL_ID
    temperature: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.keyword_mode not in KEYWORD_MODES:
            raise ValueError(f"unknown keyword mode {self.keyword_mode!r}")


_SURROUND_PUNCT = " \t\r\n\"'`.,:;!?()[]{}<>*_-"


def _normalize(raw: str) -> str:
    return raw.strip().strip(_SURROUND_PUNCT).casefold()


def _word_pattern(label: str) -> re.Pattern:
    # Boundaries on alphanumerics so labels like "ai/gpt" still anchor cleanly.
    return re.compile(
        r"(?<![a-z0-9])" + re.escape(label) + r"(?![a-z0-9])"
    )


def parse_domain(raw: str, registry: Registry) -> str | None:
    """Map raw router output to a canonical card name, or None on no match.

    Exact match (after trimming, punctuation stripping, case folding)
    against names and aliases wins; otherwise a single whole-word
    occurrence of exactly one card's label decides. Two or more distinct
    cards mentioned is ambiguous and returns None.
    """
    card = registry.find(_normalize(raw))
    if card is not None:
        return card.name
    folded = raw.casefold()
    mentioned: list[AdapterCard] = []
    for candidate in registry:
        if any(_word_pattern(label).search(folded) for label in candidate.labels()):
            mentioned.append(candidate)
    if len(mentioned) == 1:
        return mentioned[0].name
    return None


def route_semantic(
    registry: Registry,
    query: str,
    backend: Backend,
    config: RouterConfig | None = None,
) -> RoutingDecision:
    """Ask the base model which expert should handle the query.

    Backend errors and unparseable replies degrade to the fallback card
    with used_fallback set; the raw output is kept for trace logs.
    """
    config = config or RouterConfig()
    prompt = render_routing_prompt(registry, query)
    req = CompletionRequest(
        model_id=config.router_model_id,
        messages=(ChatMessage("user", prompt),),
        max_tokens=DEFAULT_ROUTER_MAX_TOKENS,
        temperature=config.temperature,
    )
    try:
        result = backend.complete(req)
    except BackendError:
        return RoutingDecision(
            domain=registry.fallback.name,
            strategy="semantic",
            raw_output="",
            used_fallback=True,
        )
    name = parse_domain(result.text, registry)
    if name is None:
        return RoutingDecision(
            domain=registry.fallback.name,
            strategy="semantic",
            raw_output=result.text,
            used_fallback=True,
            elapsed=result.latency,
        )
    return RoutingDecision(
        domain=name,
        strategy="semantic",
        raw_output=result.text,
        elapsed=result.latency,
    )


def keyword_scores(registry: Registry, query: str, matching: str) -> dict[str, int]:
    """Per-card keyword match counts for a query.

    substring mode counts keywords appearing inside individual query
    tokens (the naive baseline: "hi" fires inside "high", and multi-word
    phrases can never match a single token). word mode matches whole
    words and whole phrases against the full query.
    """
    folded = query.casefold()
    scores: dict[str, int] = {}
    if matching == "substring":
        tokens = folded.split()
        for card in registry:
            scores[card.name] = sum(
                1 for token in tokens for kw in card.keywords if kw in token
            )
    elif matching == "word":
        for card in registry:
            scores[card.name] = sum(
                len(_word_pattern(kw).findall(folded)) for kw in card.keywords
            )
    else:
        raise ValueError(f"unknown keyword matching mode {matching!r}")
    return scores


def route_keyword(
    registry: Registry, query: str, matching: str = "substring"
) -> RoutingDecision:
    """Count keyword hits per card and take the argmax.

    All-zero counts route to the fallback card; ties break by registry
    (file) order.
    """
    if not query.strip():
        raise EmptyQuery("routing query is empty")
    scores = keyword_scores(registry, query, matching)
    best = max(registry, key=lambda c: scores[c.name])  # ties: first in file order
    if scores[best.name] == 0:
        return RoutingDecision(
            domain=registry.fallback.name,
            strategy="keyword",
            used_fallback=True,
            keyword_scores=scores,
        )
    return RoutingDecision(domain=best.name, strategy="keyword", keyword_scores=scores)


def route_hybrid(
    registry: Registry,
    query: str,
    backend: Backend,
    config: RouterConfig | None = None,
) -> RoutingDecision:
    """Semantic routing with keyword override signals.

    If semantic routing fell back because of a failure and keywords have a
    nonzero winner, the keyword winner is used. Otherwise a keyword winner
    that disagrees with the semantic choice overrides it when its count
    reaches the configured threshold.
    """
    config = config or RouterConfig(strategy="hybrid")
    semantic = route_semantic(registry, query, backend, config)
    scores = keyword_scores(registry, query, config.keyword_mode)
    kw_best = max(registry, key=lambda c: scores[c.name])
    kw_count = scores[kw_best.name]
    domain = semantic.domain
    used_fallback = semantic.used_fallback
    if semantic.used_fallback and kw_count > 0:
        domain = kw_best.name
        used_fallback = False
    elif kw_best.name != semantic.domain and kw_count >= config.override_threshold:
        domain = kw_best.name
        used_fallback = False
    return RoutingDecision(
        domain=domain,
        strategy="hybrid",
        raw_output=semantic.raw_output,
        used_fallback=used_fallback,
        keyword_scores=scores,
        elapsed=semantic.elapsed,
    )


def route_random(
    registry: Registry, query: str, rng: random.Random
) -> RoutingDecision:
    """Uniform choice over cards via the caller's seeded generator."""
    if not query.strip():
        raise EmptyQuery("routing query is empty")
    card = rng.choice(registry.cards)
    return RoutingDecision(domain=card.name, strategy="random")


class Router:
    """Strategy dispatcher holding the per-run random generator."""

    def __init__(self, registry: Registry, backend: Backend, config: RouterConfig):
        self.registry = registry
        self.backend = backend
        self.config = config
        self._rng = random.Random(config.seed)

    def route(self, query: str) -> RoutingDecision:
        strategy = self.config.strategy
        if strategy == "semantic":
            return route_semantic(self.registry, query, self.backend, self.config)
        if strategy == "keyword":
            return route_keyword(self.registry, query, self.config.keyword_mode)
        if strategy == "hybrid":
            return route_hybrid(self.registry, query, self.backend, self.config)
        return route_random(self.registry, query, self._rng)
