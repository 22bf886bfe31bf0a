"""Two-node orchestration: router then expert, with a fallback edge.

On expert failure the turn is retried once through the fallback card; a
second failure terminates the turn in an error state. Successful turns
commit to session memory. Every node event is traced.
"""

from __future__ import annotations

import json
import logging
import time
from dataclasses import dataclass, field, replace

from .backend import Backend, ChatMessage
from .errors import BackendError, EmptyQuery, NotTerminal
from .expert import DEFAULT_EXPERT_TEMPERATURE, ExpertReply, generate_reply
from .memory import MemoryStore, Turn
from .registry import Registry
from .routing import Router, RouterConfig, RoutingDecision

trace_logger = logging.getLogger("switchboard.trace")


@dataclass(frozen=True)
class TraceEntry:
    node: str
    event: str  # ok | fallback | error
    elapsed: float
    domain: str = ""


@dataclass(frozen=True)
class ErrorRecord:
    node: str
    kind: str
    message: str


@dataclass
class TurnState:
    session_id: str
    query: str
    history_snapshot: tuple[ChatMessage, ...] = ()
    decision: RoutingDecision | None = None
    reply: ExpertReply | None = None
    error: ErrorRecord | None = None
    trace: list[TraceEntry] = field(default_factory=list)
    total_elapsed: float = 0.0

    @property
    def terminal_ok(self) -> bool:
        return self.reply is not None and self.error is None


def _emit_trace(session_id: str, entry: TraceEntry, used_fallback: bool) -> None:
    trace_logger.info(
        json.dumps(
            {
                "ts": time.time(),
                "session": session_id,
                "node": entry.node,
                "event": entry.event,
                "domain": entry.domain,
                "elapsed_ms": round(entry.elapsed * 1000, 3),
                "fallback": used_fallback,
            },
            sort_keys=True,
        )
    )


class Pipeline:
    """Owns the router and session store for a deployment."""

    def __init__(
        self,
        registry: Registry,
        backend: Backend,
        config: RouterConfig,
        memory_store: MemoryStore,
        expert_temperature: float = DEFAULT_EXPERT_TEMPERATURE,
    ):
        self.registry = registry
        self.backend = backend
        self.config = config
        self.memory_store = memory_store
        self.expert_temperature = expert_temperature
        self.router = Router(registry, backend, config)

    def run_turn(
        self, session_id: str, query: str, strategy: str | None = None
    ) -> TurnState:
        if not query.strip():
            raise EmptyQuery("turn query is empty")
        router = self.router
        if strategy is not None and strategy != self.config.strategy:
            router = Router(self.registry, self.backend, replace_strategy(self.config, strategy))
        with self.memory_store.lock(session_id):
            return self._run_locked(session_id, query, router)

    def _run_locked(self, session_id: str, query: str, router: Router) -> TurnState:
        memory = self.memory_store.get(session_id)
        state = TurnState(
            session_id=session_id,
            query=query,
            history_snapshot=tuple(memory.render_history()),
        )
        wall_start = time.monotonic()
        reported = 0.0  # backend-reported node latencies
        walled = 0.0  # wall time spent inside nodes

        node_start = time.monotonic()
        decision = router.route(query)
        walled += time.monotonic() - node_start
        reported += decision.elapsed
        state.decision = decision
        entry = TraceEntry("router", "ok", decision.elapsed, decision.domain)
        state.trace.append(entry)
        _emit_trace(session_id, entry, decision.used_fallback)

        card = self.registry.find(decision.domain)
        assert card is not None

        node_start = time.monotonic()
        try:
            reply = generate_reply(
                card, query, memory, self.backend, decision,
                temperature=self.expert_temperature,
            )
            walled += time.monotonic() - node_start
            reported += reply.latency_total
            entry = TraceEntry("expert", "ok", reply.latency_total, card.name)
            state.trace.append(entry)
            _emit_trace(session_id, entry, False)
        except BackendError as exc:
            walled += time.monotonic() - node_start
            entry = TraceEntry("expert", "error", 0.0, card.name)
            state.trace.append(entry)
            _emit_trace(session_id, entry, False)
            fallback = self.registry.fallback
            fb_decision = replace(
                decision, domain=fallback.name, used_fallback=True
            )
            node_start = time.monotonic()
            try:
                reply = generate_reply(
                    fallback, query, memory, self.backend, fb_decision,
                    temperature=self.expert_temperature,
                )
                walled += time.monotonic() - node_start
                reported += reply.latency_total
                state.decision = fb_decision
                entry = TraceEntry(
                    "expert-fallback", "fallback", reply.latency_total, fallback.name
                )
                state.trace.append(entry)
                _emit_trace(session_id, entry, True)
            except BackendError as exc2:
                walled += time.monotonic() - node_start
                entry = TraceEntry("expert-fallback", "error", 0.0, fallback.name)
                state.trace.append(entry)
                _emit_trace(session_id, entry, True)
                state.error = ErrorRecord(
                    node="expert-fallback",
                    kind=type(exc2).__name__,
                    message=str(exc2),
                )
                state.total_elapsed = reported + max(
                    0.0, time.monotonic() - wall_start - walled
                )
                return state
            del exc

        state.reply = reply
        state.total_elapsed = reported + max(0.0, time.monotonic() - wall_start - walled)
        self.memory_store.commit(
            session_id,
            Turn(user_text=query, assistant_text=reply.text, domain=reply.domain),
        )
        return state


def replace_strategy(config: RouterConfig, strategy: str) -> RouterConfig:
    return RouterConfig(
        strategy=strategy,
        keyword_mode=config.keyword_mode,
        override_threshold=config.override_threshold,
        router_model_id=config.router_model_id,
        temperature=config.temperature,
        seed=config.seed,
    )


def run_turn(
    session_id: str,
    query: str,
    strategy: str,
    registry: Registry,
    backend: Backend,
    memory_store: MemoryStore,
    config: RouterConfig | None = None,
) -> TurnState:
    """One-shot convenience wrapper around Pipeline.run_turn."""
    cfg = config or RouterConfig(strategy=strategy)
    if cfg.strategy != strategy:
        cfg = replace_strategy(cfg, strategy)
    pipeline = Pipeline(registry, backend, cfg, memory_store)
    return pipeline.run_turn(session_id, query)


def decompose_latency(state: TurnState) -> dict[str, float]:
    """Split a successful turn's total latency into router/expert/overhead."""
    if not state.terminal_ok:
        raise NotTerminal("latency decomposition requires a successful terminal state")
    router = next(e.elapsed for e in state.trace if e.node == "router")
    expert = sum(
        e.elapsed for e in state.trace if e.node in ("expert", "expert-fallback")
    )
    overhead = max(0.0, state.total_elapsed - router - expert)
    return {"router": router, "expert": expert, "overhead": overhead}
