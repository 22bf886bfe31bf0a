import pytest

from switchboard.backend import MockBackend
from switchboard.cli import data_path, default_config_path, default_fixture_path
from switchboard.evalharness import load_fixture
from switchboard.registry import load_registry


@pytest.fixture
def registry():
    return load_registry(default_config_path())


@pytest.fixture
def fixture25(registry):
    return load_fixture(default_fixture_path(), registry)


@pytest.fixture
def extended_hard(registry):
    return load_fixture(data_path("fixtures/extended_hard.jsonl"), registry)


@pytest.fixture
def keyword_failures(registry):
    return load_fixture(data_path("fixtures/keyword_failures.jsonl"), registry)


def make_oracle(registry, records, **kwargs):
    """Oracle mock preloaded with fixture labels and model-id name map."""
    return MockBackend(
        mode=kwargs.pop("mode", "oracle"),
        labels={r.query: r.expected_domain for r in records},
        model_names={c.model_id: c.name for c in registry},
        **kwargs,
    )


@pytest.fixture
def oracle_backend(registry, fixture25):
    return make_oracle(registry, fixture25)
