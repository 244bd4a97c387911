from __future__ import annotations

from pathlib import Path

import pytest

from fails.ingestion import ScrapeConfig, run_pipeline
from fails.model import AnalysisSelection, builtin_registry, parse_ts

FIXTURE_DIR = Path(__file__).resolve().parent.parent / "fixtures"

ALL_PROVIDERS = frozenset({"openai", "anthropic", "characterai", "stabilityai"})


@pytest.fixture(scope="session")
def registry():
    return builtin_registry()


@pytest.fixture(scope="session")
def corpus():
    """Dataset + report from one pipeline run over the committed fixtures."""
    config = ScrapeConfig(providers=ALL_PROVIDERS, fixture_dir=FIXTURE_DIR)
    return run_pipeline(config)


@pytest.fixture(scope="session")
def corpus_dataset(corpus):
    return corpus[0]


@pytest.fixture(scope="session")
def rich_selection(registry):
    """Window over the fixture corpus in which every plot kind has data."""
    return AnalysisSelection(
        start=parse_ts("2024-03-01T00:00:00Z"),
        end=parse_ts("2024-04-30T23:59:59Z"),
        services=frozenset(s.id for s in registry.services),
    )
