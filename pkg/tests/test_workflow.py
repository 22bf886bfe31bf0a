import pytest

from switchboard.backend import MockBackend, MockLatency
from switchboard.errors import EmptyQuery, NotTerminal
from switchboard.memory import MemoryStore
from switchboard.routing import RouterConfig
from switchboard.workflow import Pipeline, decompose_latency, run_turn
from tests.conftest import make_oracle


def make_pipeline(registry, backend, cap=10, **cfg):
    return Pipeline(
        registry, backend, RouterConfig(**cfg), MemoryStore(cap=cap)
    )


def test_successful_turn_router_then_expert(registry, fixture25):
    oracle = make_oracle(registry, fixture25)
    pipeline = make_pipeline(registry, oracle)
    state = pipeline.run_turn("s1", "What is compound interest?")
    assert state.terminal_ok
    assert state.decision.domain == "Finance"
    assert state.reply.domain == "Finance"
    assert [e.node for e in state.trace] == ["router", "expert"]
    assert len(pipeline.memory_store.get("s1")) == 1


def test_expert_failure_takes_fallback_edge(registry, fixture25):
    backend = make_oracle(registry, fixture25, fail_model_ids={"lora-chemistry"})
    pipeline = make_pipeline(registry, backend)
    state = pipeline.run_turn("s1", "What is aspirin made of?")
    assert state.terminal_ok
    assert state.reply.domain == "General"
    assert state.decision.used_fallback is True
    assert [e.node for e in state.trace] == ["router", "expert", "expert-fallback"]
    assert state.trace[1].event == "error"
    assert state.trace[2].event == "fallback"


def test_double_failure_is_terminal_error(registry, fixture25):
    backend = make_oracle(
        registry, fixture25, fail_model_ids={"lora-chemistry", "lora-general"}
    )
    pipeline = make_pipeline(registry, backend)
    state = pipeline.run_turn("s1", "What is aspirin made of?")
    assert not state.terminal_ok
    assert state.reply is None
    assert state.error is not None
    assert state.error.node == "expert-fallback"
    assert state.error.kind == "BackendUnavailable"
    # failed turns never commit to memory
    assert len(pipeline.memory_store.get("s1")) == 0


def test_empty_query_rejected_before_any_node(registry, oracle_backend):
    pipeline = make_pipeline(registry, oracle_backend)
    with pytest.raises(EmptyQuery):
        pipeline.run_turn("s1", "   ")
    assert oracle_backend.requests == []


def test_run_turn_convenience_wrapper(registry, fixture25):
    oracle = make_oracle(registry, fixture25)
    state = run_turn(
        "s1", "Tell me a joke.", "semantic", registry, oracle, MemoryStore()
    )
    assert state.terminal_ok
    assert state.reply.domain == "General"


def test_memory_grows_to_cap(registry, fixture25):
    oracle = make_oracle(registry, fixture25)
    pipeline = make_pipeline(registry, oracle, cap=3)
    for i, rec in enumerate(fixture25[:7]):
        pipeline.run_turn("s1", rec.query)
        assert len(pipeline.memory_store.get("s1")) == min(i + 1, 3)


def test_decompose_controlled_delays(registry, fixture25):
    backend = make_oracle(
        registry, fixture25, mode="latency_sim",
        latency=MockLatency(router=(0.1, 0.1), expert=(0.5, 0.5)),
    )
    pipeline = make_pipeline(registry, backend)
    state = pipeline.run_turn("s1", "What is compound interest?")
    parts = decompose_latency(state)
    assert parts["router"] == pytest.approx(0.1)
    assert parts["expert"] == pytest.approx(0.5)
    assert parts["overhead"] >= 0
    assert state.total_elapsed >= 0.6


def test_decompose_zero_delay_pipeline_is_fast(registry, fixture25):
    oracle = make_oracle(registry, fixture25)
    pipeline = make_pipeline(registry, oracle)
    state = pipeline.run_turn("s1", "Tell me a joke.")
    parts = decompose_latency(state)
    assert parts["router"] < 0.05
    assert parts["expert"] < 0.05
    assert parts["overhead"] < 0.05


def test_decompose_components_sum_to_total(registry, fixture25):
    backend = make_oracle(
        registry, fixture25, mode="latency_sim",
        latency=MockLatency(router=(0.1, 0.3), expert=(1.0, 2.0)),
    )
    pipeline = make_pipeline(registry, backend)
    state = pipeline.run_turn("s1", "What is compound interest?")
    parts = decompose_latency(state)
    total = parts["router"] + parts["expert"] + parts["overhead"]
    assert total == pytest.approx(state.total_elapsed, abs=1e-3)


def test_decompose_requires_terminal_success(registry, fixture25):
    backend = make_oracle(registry, fixture25, down=True)
    pipeline = make_pipeline(registry, backend)
    state = pipeline.run_turn("s1", "Hello, how are you today?")
    with pytest.raises(NotTerminal):
        decompose_latency(state)


def test_history_snapshot_reflects_prior_turns(registry, fixture25):
    oracle = make_oracle(registry, fixture25)
    pipeline = make_pipeline(registry, oracle)
    pipeline.run_turn("s1", "Tell me a joke.")
    state = pipeline.run_turn("s1", "Hello, how are you today?")
    assert len(state.history_snapshot) == 2  # one prior turn


def test_strategy_override_per_turn(registry, fixture25):
    oracle = make_oracle(registry, fixture25)
    pipeline = make_pipeline(registry, oracle)
    state = pipeline.run_turn("s1", "high blood pressure help", strategy="keyword")
    assert state.decision.strategy == "keyword"
