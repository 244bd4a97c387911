"""Status-page ingestion: fetching, parsing, normalization, pipeline."""

from fails.ingestion.fetcher import fetch_history, history_urls
from fails.ingestion.identify import identify_services
from fails.ingestion.instatus import content_hash_id, parse_instatus_history
from fails.ingestion.pipeline import run_pipeline
from fails.ingestion.statuspage import parse_statuspage_history
from fails.ingestion.timestamps import UnparseableTimestamp, normalize_timestamp
from fails.ingestion.types import (
    ContentKind,
    FetchOutcome,
    IngestionError,
    MalformedPage,
    NetworkExhausted,
    PageSnapshot,
    ParseResult,
    ProviderReport,
    ScrapeConfig,
    ScrapeReport,
    UnknownProvider,
    sniff_content_kind,
)

__all__ = [
    "ContentKind",
    "FetchOutcome",
    "IngestionError",
    "MalformedPage",
    "NetworkExhausted",
    "PageSnapshot",
    "ParseResult",
    "ProviderReport",
    "ScrapeConfig",
    "ScrapeReport",
    "UnknownProvider",
    "UnparseableTimestamp",
    "content_hash_id",
    "fetch_history",
    "history_urls",
    "identify_services",
    "normalize_timestamp",
    "parse_instatus_history",
    "parse_statuspage_history",
    "run_pipeline",
    "sniff_content_kind",
]
