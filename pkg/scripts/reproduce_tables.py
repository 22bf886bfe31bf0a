#!/usr/bin/env python3
"""Run the full desk-scale evaluation and print every report table.

Uses the deterministic oracle / latency-simulation backends, so results
are exactly reproducible on any machine (no GPU required).
"""

import sys

from switchboard.backend import MockBackend, MockLatency
from switchboard.cli import data_path, default_config_path, default_fixture_path
from switchboard.evalharness import (
    load_fixture,
    render_accuracy_table,
    render_latency_table,
    run_accuracy_suite,
    run_cold_warm,
    run_latency_bench,
)
from switchboard.memory import MemoryStore
from switchboard.registry import load_registry
from switchboard.routing import RouterConfig
from switchboard.workflow import Pipeline

SEED = 0


def main():
    registry = load_registry(default_config_path())
    fixture = load_fixture(default_fixture_path(), registry)
    extended = load_fixture(data_path("fixtures/extended_hard.jsonl"), registry)
    combined = fixture + extended
    labels = {r.query: r.expected_domain for r in combined}
    model_names = {c.model_id: c.name for c in registry}

    print("=" * 64)
    print("Routing accuracy by strategy (29-query combined fixture)")
    print("=" * 64)
    for strategy in ("semantic", "keyword", "hybrid", "random"):
        backend = MockBackend(mode="oracle", labels=labels, model_names=model_names)
        report = run_accuracy_suite(
            combined, strategy, registry, backend,
            RouterConfig(strategy=strategy, seed=SEED),
        )
        print()
        print(render_accuracy_table(report))

    print()
    print("=" * 64)
    print("Latency benchmark: 20 sequential turns, simulated delays")
    print("  router uniform [0.1, 0.3] s, expert uniform [2.0, 5.0] s")
    print("=" * 64)
    backend = MockBackend(
        mode="latency_sim", seed=SEED, labels=labels, model_names=model_names,
        latency=MockLatency(router=(0.1, 0.3), expert=(2.0, 5.0)),
    )
    pipeline = Pipeline(registry, backend, RouterConfig(seed=SEED), MemoryStore())
    print(render_latency_table(run_latency_bench(20, pipeline, [r.query for r in fixture])))

    print()
    print("=" * 64)
    print("Cold vs warm start (simulated first-call penalty)")
    print("=" * 64)
    backend = MockBackend(
        mode="latency_sim", seed=SEED, labels=labels, model_names=model_names,
        latency=MockLatency(expert=(2.371, 2.371), first_call_penalty=1.387),
    )
    pipeline = Pipeline(registry, backend, RouterConfig(seed=SEED), MemoryStore())
    result = run_cold_warm(pipeline, 9, [r.query for r in fixture])
    print(f"cold        {result['cold']:.3f} s")
    print(f"warm mean   {result['warm_mean']:.3f} s")
    print(f"improvement {result['improvement_pct']:.1f}%")


if __name__ == "__main__":
    sys.exit(main())
