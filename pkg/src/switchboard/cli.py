"""Operator CLI: serve, route, eval, lora-check."""

from __future__ import annotations

import json
import os
import sys
from importlib import resources

import click

from . import adapter_math
from .backend import ENV_BACKEND_URL, HttpBackend, MockBackend, MockLatency
from .evalharness import (
    accuracy_report_record,
    emit_report,
    latency_record,
    load_fixture,
    render_accuracy_table,
    render_latency_table,
    run_accuracy_suite,
    run_cold_warm,
    run_latency_bench,
)
from .memory import MemoryStore
from .registry import Registry, load_registry
from .routing import KEYWORD_MODES, Router, RouterConfig, STRATEGIES
from .service import ServiceConfig, create_app
from .workflow import Pipeline

ENV_CONFIG = "SWITCHBOARD_CONFIG"


def data_path(name: str) -> str:
    return str(resources.files("switchboard").joinpath("data", name))


def default_config_path() -> str:
    return os.environ.get(ENV_CONFIG) or data_path("adapters.json")


def default_fixture_path() -> str:
    return data_path("fixtures/routing_25.jsonl")


def oracle_labels(registry: Registry, fixture_path: str) -> dict[str, str]:
    records = load_fixture(fixture_path, registry)
    return {r.query: r.expected_domain for r in records}


def build_backend(
    registry: Registry,
    backend_url: str | None,
    mock: str | None,
    fixture_path: str,
    seed: int,
    latency: MockLatency | None = None,
):
    if backend_url:
        return HttpBackend(base_url=backend_url)
    if mock is None and os.environ.get(ENV_BACKEND_URL):
        return HttpBackend()
    mode = mock or "oracle"
    model_names = {c.model_id: c.name for c in registry}
    return MockBackend(
        mode=mode,
        seed=seed,
        labels=oracle_labels(registry, fixture_path),
        latency=latency,
        model_names=model_names,
    )


@click.group()
def main():
    """Route chat queries to domain-specialized adapters."""


@main.command()
@click.option("--config", "config_path", default=None, help="Adapter config file.")
@click.option("--backend", "backend_url", default=None, help="Backend base URL.")
@click.option(
    "--mock-backend",
    type=click.Choice(["oracle", "scripted", "latency_sim"]),
    default=None,
    help="Serve against a deterministic mock instead of a wire backend.",
)
@click.option("--oracle-fixture", default=None, help="Fixture for oracle labels.")
@click.option("--strategy", type=click.Choice(STRATEGIES), default="semantic")
@click.option("--keyword-mode", type=click.Choice(KEYWORD_MODES), default="substring")
@click.option("--memory-cap", type=int, default=10)
@click.option("--persist", "persist_path", default=None, help="Session log file.")
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8080)
def serve(
    config_path, backend_url, mock_backend, oracle_fixture,
    strategy, keyword_mode, memory_cap, persist_path, host, port,
):
    """Start the HTTP service."""
    import uvicorn

    registry = load_registry(config_path or default_config_path())
    backend = build_backend(
        registry, backend_url, mock_backend, oracle_fixture or default_fixture_path(), 0
    )
    config = ServiceConfig(
        listen_host=host,
        listen_port=port,
        backend_url=backend_url or "",
        config_path=config_path or default_config_path(),
        strategy=strategy,
        memory_cap=memory_cap,
        keyword_mode=keyword_mode,
        persist_path=persist_path,
    )
    app = create_app(registry, backend, config)
    uvicorn.run(app, host=host, port=port, log_level="warning")


@main.command()
@click.argument("message")
@click.option("--config", "config_path", default=None)
@click.option("--backend", "backend_url", default=None)
@click.option("--strategy", type=click.Choice(STRATEGIES), default="semantic")
@click.option("--keyword-mode", type=click.Choice(KEYWORD_MODES), default="substring")
@click.option("--seed", type=int, default=0)
def route(message, config_path, backend_url, strategy, keyword_mode, seed):
    """Dry-run routing for one message (no generation)."""
    registry = load_registry(config_path or default_config_path())
    backend = build_backend(registry, backend_url, None, default_fixture_path(), seed)
    config = RouterConfig(strategy=strategy, keyword_mode=keyword_mode, seed=seed)
    decision = Router(registry, backend, config).route(message)
    click.echo(
        json.dumps(
            {
                "domain": decision.domain,
                "strategy": decision.strategy,
                "used_fallback": decision.used_fallback,
                "raw_output": decision.raw_output,
                "keyword_scores": decision.keyword_scores,
            },
            indent=2,
        )
    )


@main.group("eval")
def eval_group():
    """Accuracy and latency evaluation suites."""


def _registry_and_fixture(config_path, fixture_path):
    registry = load_registry(config_path or default_config_path())
    fixture_path = fixture_path or default_fixture_path()
    return registry, load_fixture(fixture_path, registry), fixture_path


@eval_group.command()
@click.option("--fixture", "fixture_path", default=None)
@click.option("--config", "config_path", default=None)
@click.option("--strategy", type=click.Choice(STRATEGIES), default="semantic")
@click.option("--keyword-mode", type=click.Choice(KEYWORD_MODES), default="substring")
@click.option("--backend", "backend_url", default=None)
@click.option("--seed", type=int, default=0)
@click.option("--out", "out_path", default=None, help="Machine report file.")
def accuracy(fixture_path, config_path, strategy, keyword_mode, backend_url, seed, out_path):
    """Routing accuracy over a labeled fixture."""
    registry, fixture, fixture_path = _registry_and_fixture(config_path, fixture_path)
    backend = build_backend(registry, backend_url, None, fixture_path, seed)
    config = RouterConfig(strategy=strategy, keyword_mode=keyword_mode, seed=seed)
    report = run_accuracy_suite(fixture, strategy, registry, backend, config)
    click.echo(render_accuracy_table(report))
    if out_path:
        emit_report(accuracy_report_record(report), out_path)
        click.echo(f"\nmachine report written to {out_path}")


@eval_group.command()
@click.option("--n", "n_queries", type=int, default=20)
@click.option("--fixture", "fixture_path", default=None)
@click.option("--config", "config_path", default=None)
@click.option("--router-range", nargs=2, type=float, default=(0.1, 0.3))
@click.option("--expert-range", nargs=2, type=float, default=(2.0, 5.0))
@click.option("--seed", type=int, default=0)
@click.option("--out", "out_path", default=None)
def latency(n_queries, fixture_path, config_path, router_range, expert_range, seed, out_path):
    """Sequential end-to-end latency benchmark against the simulated backend."""
    registry, fixture, fixture_path = _registry_and_fixture(config_path, fixture_path)
    sim = MockLatency(router=tuple(router_range), expert=tuple(expert_range))
    backend = build_backend(registry, None, "latency_sim", fixture_path, seed, latency=sim)
    pipeline = Pipeline(registry, backend, RouterConfig(seed=seed), MemoryStore())
    report = run_latency_bench(n_queries, pipeline, [r.query for r in fixture])
    click.echo(render_latency_table(report))
    if out_path:
        emit_report(latency_record(report), out_path)


@eval_group.command()
@click.option("--warm", "k_warm", type=int, default=9)
@click.option("--fixture", "fixture_path", default=None)
@click.option("--config", "config_path", default=None)
@click.option("--penalty", type=float, default=1.387, help="First-call extra delay (s).")
@click.option("--base", type=float, default=2.371, help="Base simulated expert delay (s).")
@click.option("--seed", type=int, default=0)
def coldwarm(k_warm, fixture_path, config_path, penalty, base, seed):
    """Cold vs warm start benchmark against the simulated backend."""
    registry, fixture, fixture_path = _registry_and_fixture(config_path, fixture_path)
    sim = MockLatency(router=(0.0, 0.0), expert=(base, base), first_call_penalty=penalty)
    backend = build_backend(registry, None, "latency_sim", fixture_path, seed, latency=sim)
    pipeline = Pipeline(registry, backend, RouterConfig(seed=seed), MemoryStore())
    result = run_cold_warm(pipeline, k_warm, [r.query for r in fixture])
    click.echo(f"cold        {result['cold']:.3f} s")
    click.echo(f"warm mean   {result['warm_mean']:.3f} s")
    click.echo(f"improvement {result['improvement_pct']:.1f}%")


@eval_group.command()
@click.option(
    "--strategies", default="semantic,keyword,hybrid,random", show_default=True
)
@click.option("--fixture", "fixture_path", default=None)
@click.option("--config", "config_path", default=None)
@click.option("--keyword-mode", type=click.Choice(KEYWORD_MODES), default="substring")
@click.option("--seed", type=int, default=0)
@click.option("--out", "out_path", default=None)
def compare(strategies, fixture_path, config_path, keyword_mode, seed, out_path):
    """Run all requested strategies over one fixture and compare accuracy."""
    registry, fixture, fixture_path = _registry_and_fixture(config_path, fixture_path)
    names = [s.strip() for s in strategies.split(",") if s.strip()]
    records = []
    for strategy in names:
        if strategy not in STRATEGIES:
            raise click.BadParameter(f"unknown strategy {strategy!r}")
        backend = build_backend(registry, None, None, fixture_path, seed)
        config = RouterConfig(strategy=strategy, keyword_mode=keyword_mode, seed=seed)
        report = run_accuracy_suite(fixture, strategy, registry, backend, config)
        records.append(accuracy_report_record(report))
        click.echo(f"{strategy:<12}{100 * report.overall:6.1f}%")
    if out_path:
        emit_report({"seed": seed, "reports": records}, out_path)
        click.echo(f"machine report written to {out_path}")


@main.command("lora-check")
def lora_check():
    """Print the trainable-vs-full parameter count table."""
    pairs = [(1, 64), (8, 512), (16, 4096), (64, 4096)]
    click.echo(adapter_math.param_count_table(pairs))


if __name__ == "__main__":
    main(sys.argv[1:])
