"""Retrieve provider incident histories: live over HTTP or replayed from an
offline fixture directory.

Fixture layout: ``<fixture_dir>/<provider>/<NNN>.{html,json}``, consumed in
lexicographic order. Live fetches retry with exponential backoff (no jitter,
so tests are deterministic).
"""

from __future__ import annotations

import os
import time
from pathlib import Path
from typing import Callable, Optional

import httpx

from fails.model import PageFormat, Provider, utc_now
from fails.ingestion.types import (
    ContentKind,
    FetchOutcome,
    NetworkExhausted,
    PageSnapshot,
    ScrapeConfig,
    sniff_content_kind,
)

Transport = Callable[[str, float], bytes]

DEFAULT_TIMEOUT_SECS = 30.0


def http_timeout() -> float:
    raw = os.environ.get("FAILS_HTTP_TIMEOUT_SECS", "")
    try:
        return float(raw) if raw else DEFAULT_TIMEOUT_SECS
    except ValueError:
        return DEFAULT_TIMEOUT_SECS


def _default_transport(url: str, timeout: float) -> bytes:
    response = httpx.get(url, timeout=timeout, follow_redirects=True)
    response.raise_for_status()
    return response.content


def history_urls(provider: Provider) -> list[str]:
    """Live endpoints per page format; see docs/providers.md."""
    base = provider.status_url.rstrip("/")
    if provider.page_format == PageFormat.STATUSPAGE:
        return [f"{base}/api/v2/incidents.json"]
    return [f"{base}/summary.json"]


def _fixture_snapshots(provider: Provider, config: ScrapeConfig) -> FetchOutcome:
    outcome = FetchOutcome()
    root = Path(config.fixture_dir) / provider.id
    if not root.is_dir():
        outcome.warnings.append(f"no fixture directory for provider {provider.id!r}")
        return outcome
    paths = sorted(p for p in root.iterdir() if p.suffix in (".html", ".json"))
    if config.page_limit is not None:
        paths = paths[: config.page_limit]
    for path in paths:
        body = path.read_bytes()
        if not body:
            outcome.errors.append(f"fixture {path.name} is empty")
            continue
        outcome.snapshots.append(
            PageSnapshot(
                provider=provider.id,
                url=f"fixture://{provider.id}/{path.name}",
                fetched_at=utc_now(),
                body=body,
                content_kind=sniff_content_kind(body),
            )
        )
    return outcome


def fetch_history(
    provider: Provider,
    config: ScrapeConfig,
    transport: Optional[Transport] = None,
    sleep: Callable[[float], None] = time.sleep,
) -> FetchOutcome:
    """Fetch every history page for one provider.

    Each page is retried up to ``config.max_retries`` times with doubling
    backoff; a page that exhausts its retries is noted in ``errors`` while
    pages already fetched are still returned.
    """
    if config.fixture_dir is not None:
        return _fixture_snapshots(provider, config)

    transport = transport or _default_transport
    timeout = http_timeout()
    outcome = FetchOutcome()
    urls = history_urls(provider)
    if config.page_limit is not None:
        urls = urls[: config.page_limit]

    for url in urls:
        attempts = 1 + config.max_retries
        last_error: Optional[Exception] = None
        for attempt in range(attempts):
            try:
                body = transport(url, timeout)
            except Exception as exc:  # transport failures are retried uniformly
                last_error = exc
                if attempt + 1 < attempts:
                    sleep(config.retry_backoff * (2**attempt))
                continue
            if attempt > 0:
                outcome.warnings.append(f"{url}: succeeded after {attempt + 1} attempts")
            if not body:
                outcome.errors.append(f"{url}: empty response body")
                break
            outcome.snapshots.append(
                PageSnapshot(
                    provider=provider.id,
                    url=url,
                    fetched_at=utc_now(),
                    body=body,
                    content_kind=sniff_content_kind(body),
                )
            )
            break
        else:
            exhausted = NetworkExhausted(
                f"{url}: all {attempts} attempts failed (last error: {last_error})"
            )
            outcome.errors.append(str(exhausted))
    return outcome
