"""HTTP surface: chat, routing dry-runs, adapter listing, health."""

from __future__ import annotations

import uuid
from dataclasses import dataclass

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from .backend import Backend
from .errors import EmptyQuery
from .memory import DEFAULT_CAP, MemoryStore
from .registry import Registry, load_registry
from .routing import KEYWORD_MODES, RouterConfig, STRATEGIES
from .workflow import Pipeline, decompose_latency


@dataclass
class ServiceConfig:
    listen_host: str = "127.0.0.1"
    listen_port: int = 8080
    backend_url: str = ""
    config_path: str = ""
    strategy: str = "semantic"
    memory_cap: int = DEFAULT_CAP
    keyword_mode: str = "substring"
    persist_path: str | None = None
    deadline: float = 60.0

    def __post_init__(self):
        if self.deadline <= 0:
            raise ValueError("deadline must be > 0")
        if self.strategy not in STRATEGIES:
            raise ValueError(f"invalid strategy {self.strategy!r}")
        if self.keyword_mode not in KEYWORD_MODES:
            raise ValueError(f"invalid keyword mode {self.keyword_mode!r}")
        if self.memory_cap < 1:
            raise ValueError("memory cap must be >= 1")


class ChatRequest(BaseModel):
    session_id: str
    message: str
    strategy: str | None = None


class RouteRequest(BaseModel):
    message: str
    strategy: str | None = None


def create_app(
    registry: Registry, backend: Backend, config: ServiceConfig
) -> FastAPI:
    app = FastAPI(title="switchboard")
    router_config = RouterConfig(
        strategy=config.strategy, keyword_mode=config.keyword_mode
    )
    memory_store = MemoryStore(cap=config.memory_cap, persist_path=config.persist_path)
    state = app.state
    state.registry = registry
    state.backend = backend
    state.config = config
    state.memory_store = memory_store
    state.pipeline = Pipeline(registry, backend, router_config, memory_store)

    def reload_registry(path: str) -> None:
        # Atomic swap: in-flight requests keep the old pipeline object.
        new_registry = load_registry(path)
        new_pipeline = Pipeline(new_registry, state.backend, router_config, memory_store)
        state.registry = new_registry
        state.pipeline = new_pipeline

    state.reload_registry = reload_registry

    def _check_strategy(strategy: str | None) -> None:
        if strategy is not None and strategy not in STRATEGIES:
            raise HTTPException(422, f"unknown strategy {strategy!r}")

    @app.post("/chat")
    def chat(req: ChatRequest):
        if not req.message.strip():
            raise HTTPException(400, "message is empty")
        if not req.session_id.strip():
            raise HTTPException(400, "session_id is empty")
        _check_strategy(req.strategy)
        pipeline: Pipeline = state.pipeline
        try:
            turn = pipeline.run_turn(req.session_id, req.message, strategy=req.strategy)
        except EmptyQuery:
            raise HTTPException(400, "message is empty")
        if not turn.terminal_ok:
            raise HTTPException(
                502,
                f"backend failure at node {turn.error.node}: {turn.error.kind}",
            )
        parts = decompose_latency(turn)
        return {
            "reply": turn.reply.text,
            "domain": turn.reply.domain,
            "used_fallback": turn.decision.used_fallback,
            "latency": {
                "router": parts["router"],
                "expert": parts["expert"],
                "overhead": parts["overhead"],
                "total": turn.total_elapsed,
            },
            "trace_id": uuid.uuid4().hex,
        }

    @app.get("/adapters")
    def adapters():
        # System prompts and model ids are deliberately not exposed.
        return [
            {"name": c.name, "description": c.description, "is_fallback": c.is_fallback}
            for c in state.registry
        ]

    @app.post("/route")
    def route(req: RouteRequest):
        if not req.message.strip():
            raise HTTPException(400, "message is empty")
        _check_strategy(req.strategy)
        pipeline: Pipeline = state.pipeline
        router = pipeline.router
        if req.strategy is not None and req.strategy != pipeline.config.strategy:
            from .workflow import replace_strategy
            from .routing import Router

            router = Router(
                pipeline.registry,
                pipeline.backend,
                replace_strategy(pipeline.config, req.strategy),
            )
        decision = router.route(req.message)
        body = {
            "domain": decision.domain,
            "strategy": decision.strategy,
            "raw_output": decision.raw_output,
            "used_fallback": decision.used_fallback,
            "elapsed": decision.elapsed,
        }
        if decision.strategy in ("keyword", "hybrid"):
            body["keyword_scores"] = decision.keyword_scores
        return body

    @app.get("/health")
    def health():
        reachable = state.backend.ping()
        return {
            "status": "ok" if reachable else "degraded",
            "backend_reachable": reachable,
            "adapters_loaded": len(state.registry),
        }

    return app
