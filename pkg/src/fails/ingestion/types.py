"""Shared ingestion types: snapshots, scrape configuration, reports, errors."""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Optional

from fails.model import IncidentRecord


class IngestionError(Exception):
    """Base class for ingestion failures."""


class UnknownProvider(IngestionError):
    pass


class NetworkExhausted(IngestionError):
    """All retries failed for one page fetch."""


class MalformedPage(IngestionError):
    """Page structure not recognized; the message names the missing element."""


class ContentKind:
    HTML = "html"
    JSON = "json"


def sniff_content_kind(body: bytes) -> str:
    head = body.lstrip()[:1]
    return ContentKind.JSON if head in (b"{", b"[") else ContentKind.HTML


@dataclass(frozen=True)
class PageSnapshot:
    provider: str
    url: str
    fetched_at: datetime
    body: bytes
    content_kind: str

    def __post_init__(self):
        if not self.body:
            raise ValueError("snapshot body must be non-empty")

    def text(self) -> str:
        return self.body.decode("utf-8", errors="replace")


@dataclass(frozen=True)
class ScrapeConfig:
    providers: frozenset[str]
    max_retries: int = 3
    retry_backoff: float = 2.0  # seconds, doubling per attempt
    page_limit: Optional[int] = None
    fixture_dir: Optional[Path] = None

    def __post_init__(self):
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")


@dataclass
class ProviderReport:
    pages_fetched: int = 0
    incidents_parsed: int = 0
    warnings: list[str] = field(default_factory=list)
    errors: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "pages_fetched": self.pages_fetched,
            "incidents_parsed": self.incidents_parsed,
            "warnings": list(self.warnings),
            "errors": list(self.errors),
        }


@dataclass
class ScrapeReport:
    per_provider: dict[str, ProviderReport]
    started_at: datetime
    finished_at: datetime

    @property
    def total_incidents(self) -> int:
        return sum(r.incidents_parsed for r in self.per_provider.values())

    @property
    def all_errors(self) -> list[str]:
        out = []
        for pid in sorted(self.per_provider):
            out.extend(f"{pid}: {e}" for e in self.per_provider[pid].errors)
        return out

    def to_dict(self) -> dict:
        from fails.model import format_ts

        return {
            "per_provider": {pid: r.to_dict() for pid, r in sorted(self.per_provider.items())},
            "started_at": format_ts(self.started_at),
            "finished_at": format_ts(self.finished_at),
        }


@dataclass
class ParseResult:
    """Parsed records plus the non-fatal oddities found along the way."""

    records: list[IncidentRecord] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)


@dataclass
class FetchOutcome:
    """Snapshots actually retrieved plus retry warnings and terminal errors."""

    snapshots: list[PageSnapshot] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    errors: list[str] = field(default_factory=list)
