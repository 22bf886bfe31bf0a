"""Evaluation harness: routing accuracy, latency statistics, cold/warm.

Accuracy suites run each fixture query through a routing strategy once
and aggregate overall / per-domain / per-difficulty results plus a
confusion matrix. Latency statistics use nearest-rank percentiles and
population standard deviation so every number is exactly reproducible.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .backend import Backend
from .errors import EmptySamples, ValidationError
from .registry import Registry
from .routing import Router, RouterConfig, RoutingDecision
from .workflow import Pipeline, decompose_latency

DIFFICULTIES = ("easy", "medium", "hard")


@dataclass(frozen=True)
class EvalRecord:
    query: str
    expected_domain: str
    difficulty: str

    def __post_init__(self):
        if self.difficulty not in DIFFICULTIES:
            raise ValidationError(f"invalid difficulty {self.difficulty!r}")


@dataclass
class AccuracyReport:
    strategy: str
    overall: float
    total: int
    correct: int
    by_domain: dict[str, tuple[int, int]]  # name -> (correct, total)
    by_difficulty: dict[str, tuple[int, int]]
    confusion: dict[tuple[str, str], int]  # (expected, got) -> count
    decisions: list[RoutingDecision] = field(default_factory=list)


@dataclass
class LatencyReport:
    count: int
    mean: float
    median: float
    min: float
    max: float
    std: float
    p95: float
    p99: float
    by_domain: dict[str, tuple[int, float, float, float]]  # (count, mean, median, max)
    excluded: int = 0


def load_fixture(path: str, registry: Registry | None = None) -> list[EvalRecord]:
    """Read newline-delimited eval records; canonicalize domains via registry."""
    records = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            raw = json.loads(line)
            expected = raw["expected_domain"]
            if registry is not None:
                card = registry.find(expected)
                if card is None:
                    raise ValidationError(
                        f"fixture domain {expected!r} not in registry"
                    )
                expected = card.name
            records.append(
                EvalRecord(
                    query=raw["query"],
                    expected_domain=expected,
                    difficulty=raw["difficulty"],
                )
            )
    return records


def run_accuracy_suite(
    fixture: list[EvalRecord],
    strategy: str,
    registry: Registry,
    backend: Backend,
    config: RouterConfig | None = None,
) -> AccuracyReport:
    if not fixture:
        raise ValidationError("fixture is empty")
    cfg = config or RouterConfig(strategy=strategy)
    if cfg.strategy != strategy:
        cfg = RouterConfig(
            strategy=strategy,
            keyword_mode=cfg.keyword_mode,
            override_threshold=cfg.override_threshold,
            router_model_id=cfg.router_model_id,
            temperature=cfg.temperature,
            seed=cfg.seed,
        )
    router = Router(registry, backend, cfg)
    by_domain: dict[str, list[int]] = {c.name: [0, 0] for c in registry}
    by_difficulty: dict[str, list[int]] = {lvl: [0, 0] for lvl in DIFFICULTIES}
    confusion: dict[tuple[str, str], int] = {}
    decisions: list[RoutingDecision] = []
    correct = 0
    for rec in fixture:
        decision = router.route(rec.query)
        decisions.append(decision)
        hit = decision.domain == rec.expected_domain
        correct += hit
        by_domain.setdefault(rec.expected_domain, [0, 0])
        by_domain[rec.expected_domain][0] += hit
        by_domain[rec.expected_domain][1] += 1
        by_difficulty[rec.difficulty][0] += hit
        by_difficulty[rec.difficulty][1] += 1
        key = (rec.expected_domain, decision.domain)
        confusion[key] = confusion.get(key, 0) + 1
    report = AccuracyReport(
        strategy=strategy,
        overall=correct / len(fixture),
        total=len(fixture),
        correct=correct,
        by_domain={k: (v[0], v[1]) for k, v in by_domain.items() if v[1] > 0},
        by_difficulty={k: (v[0], v[1]) for k, v in by_difficulty.items() if v[1] > 0},
        confusion=confusion,
        decisions=decisions,
    )
    _check_report_consistency(report)
    return report


def _check_report_consistency(report: AccuracyReport) -> None:
    assert report.correct == sum(c for c, _ in report.by_domain.values())
    assert report.total == sum(t for _, t in report.by_domain.values())
    for expected, (_, total) in report.by_domain.items():
        row = sum(n for (e, _), n in report.confusion.items() if e == expected)
        assert row == total, f"confusion row {expected} != domain total"


def nearest_rank(sorted_samples: list[float], q: float) -> float:
    """Value at 1-based index ceil(q * n) of the ascending sort."""
    n = len(sorted_samples)
    idx = max(1, math.ceil(q * n))
    return sorted_samples[idx - 1]


def latency_stats(samples: list[float]) -> LatencyReport:
    if not samples:
        raise EmptySamples("no latency samples")
    ordered = sorted(samples)
    n = len(ordered)
    mean = sum(ordered) / n
    std = math.sqrt(sum((x - mean) ** 2 for x in ordered) / n)
    return LatencyReport(
        count=n,
        mean=mean,
        median=nearest_rank(ordered, 0.5),
        min=ordered[0],
        max=ordered[-1],
        std=std,
        p95=nearest_rank(ordered, 0.95),
        p99=nearest_rank(ordered, 0.99),
        by_domain={},
    )


def _domain_stats(values: list[float]) -> tuple[int, float, float, float]:
    ordered = sorted(values)
    return (
        len(ordered),
        sum(ordered) / len(ordered),
        nearest_rank(ordered, 0.5),
        ordered[-1],
    )


def run_latency_bench(
    n_queries: int,
    pipeline: Pipeline,
    queries: list[str],
    session_id: str = "bench",
) -> LatencyReport:
    """n sequential end-to-end turns; failures excluded from the samples.

    Samples are the backend-reported router + expert latencies; local
    orchestration overhead (sub-millisecond) is excluded so that runs
    against a seeded simulated backend are exactly reproducible.
    """
    samples: list[float] = []
    per_domain: dict[str, list[float]] = {}
    excluded = 0
    for i in range(n_queries):
        query = queries[i % len(queries)]
        state = pipeline.run_turn(session_id, query)
        if not state.terminal_ok:
            excluded += 1
            continue
        parts = decompose_latency(state)
        sample = parts["router"] + parts["expert"]
        samples.append(sample)
        per_domain.setdefault(state.reply.domain, []).append(sample)
    report = latency_stats(samples)
    report.by_domain = {name: _domain_stats(vals) for name, vals in per_domain.items()}
    report.excluded = excluded
    return report


def improvement_pct(cold: float, warm: float) -> float:
    """Relative improvement of warm over cold, in percent. Not clamped."""
    return 100.0 * (cold - warm) / cold


def run_cold_warm(
    pipeline: Pipeline,
    k_warm: int,
    queries: list[str],
    session_id: str = "coldwarm",
) -> dict[str, float]:
    """Clear session memory, time the first (cold) turn, then k warm turns."""
    if k_warm < 1:
        raise ValidationError("k_warm must be >= 1")
    def turn_latency(state):
        parts = decompose_latency(state)
        return parts["router"] + parts["expert"]

    pipeline.memory_store.get(session_id).clear()
    cold = turn_latency(pipeline.run_turn(session_id, queries[0]))
    warm_samples = []
    for i in range(k_warm):
        state = pipeline.run_turn(session_id, queries[(i + 1) % len(queries)])
        warm_samples.append(turn_latency(state))
    warm_mean = sum(warm_samples) / len(warm_samples)
    return {
        "cold": cold,
        "warm_mean": warm_mean,
        "improvement_pct": improvement_pct(cold, warm_mean),
    }


def format_pct(numerator: int, denominator: int) -> str:
    """Fractions rendered with one decimal, e.g. 14/29 -> '48.3%'."""
    return f"{100.0 * numerator / denominator:.1f}%"


def render_accuracy_table(report: AccuracyReport) -> str:
    lines = [
        f"Routing accuracy — strategy: {report.strategy}",
        f"{'Total queries':<24}{report.total}",
        f"{'Correctly routed':<24}{report.correct}",
        f"{'Accuracy':<24}{format_pct(report.correct, report.total)}",
        "",
        "By domain:",
    ]
    for name, (c, t) in report.by_domain.items():
        lines.append(f"  {name:<20}{format_pct(c, t):>8}  ({c}/{t})")
    lines.append("")
    lines.append("By difficulty:")
    for level, (c, t) in report.by_difficulty.items():
        lines.append(f"  {level:<20}{format_pct(c, t):>8}  ({c}/{t})")
    misroutes = {k: v for k, v in report.confusion.items() if k[0] != k[1]}
    if misroutes:
        lines.append("")
        lines.append("Misroutes (expected -> got):")
        for (exp, got), n in sorted(misroutes.items()):
            lines.append(f"  {exp} -> {got}: {n}")
    return "\n".join(lines)


def render_latency_table(report: LatencyReport) -> str:
    lines = [
        "Latency statistics (seconds)",
        f"{'Count':<12}{report.count}",
        f"{'Mean':<12}{report.mean:.3f}",
        f"{'Median':<12}{report.median:.3f}",
        f"{'Min':<12}{report.min:.3f}",
        f"{'Max':<12}{report.max:.3f}",
        f"{'Std':<12}{report.std:.3f}",
        f"{'P95':<12}{report.p95:.3f}",
        f"{'P99':<12}{report.p99:.3f}",
    ]
    if report.excluded:
        lines.append(f"{'Excluded':<12}{report.excluded}")
    lines.append("")
    lines.append(f"{'Domain':<16}{'Count':>6}{'Mean':>9}{'Median':>9}{'Max':>9}")
    for name, (count, mean, median, mx) in report.by_domain.items():
        lines.append(f"{name:<16}{count:>6}{mean:>9.3f}{median:>9.3f}{mx:>9.3f}")
    return "\n".join(lines)


def accuracy_report_record(report: AccuracyReport) -> dict:
    """Machine-readable form of one accuracy run."""
    elapsed = [d.elapsed for d in report.decisions]
    latency = latency_stats(elapsed) if elapsed else None
    return {
        "strategy": report.strategy,
        "overall": report.overall,
        "correct": report.correct,
        "total": report.total,
        "by_domain": {k: list(v) for k, v in report.by_domain.items()},
        "by_difficulty": {k: list(v) for k, v in report.by_difficulty.items()},
        "confusion": {f"{e}->{g}": n for (e, g), n in report.confusion.items()},
        "latency": latency_record(latency) if latency else None,
    }


def latency_record(report: LatencyReport) -> dict:
    return {
        "count": report.count,
        "mean": report.mean,
        "median": report.median,
        "min": report.min,
        "max": report.max,
        "std": report.std,
        "p95": report.p95,
        "p99": report.p99,
        "excluded": report.excluded,
        "by_domain": {k: list(v) for k, v in report.by_domain.items()},
    }


def emit_report(record: dict, path: str) -> None:
    """Write the machine report; stable key order for byte-identical reruns."""
    with open(path, "w", encoding="utf-8") as f:
        json.dump(record, f, indent=2, sort_keys=True, ensure_ascii=False)
        f.write("\n")


def parse_report(path: str) -> dict:
    with open(path, encoding="utf-8") as f:
        return json.load(f)
