"""Semantic routing of chat queries to domain-specialized LoRA adapters."""

from .registry import AdapterCard, Registry, load_registry, render_routing_prompt
from .routing import RouterConfig, RoutingDecision

__all__ = [
    "AdapterCard",
    "Registry",
    "RouterConfig",
    "RoutingDecision",
    "load_registry",
    "render_routing_prompt",
]
