"""End-to-end scrape: fetch pages, parse per format, validate, merge.

Each provider is fetched and parsed by its own worker; staging is kept
per-provider so one provider's malformed pages never disturb another's
records. The merge into a single dataset runs after all workers finish.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Optional

from fails.model import (
    IncidentDataset,
    IncidentRecord,
    PageFormat,
    Registry,
    builtin_registry,
    latest_observed,
    utc_now,
    validate_incident,
)
from fails.ingestion.fetcher import Transport, fetch_history
from fails.ingestion.instatus import parse_instatus_history
from fails.ingestion.statuspage import parse_statuspage_history
from fails.ingestion.types import (
    IngestionError,
    ProviderReport,
    ScrapeConfig,
    ScrapeReport,
    UnknownProvider,
)


def _parse_snapshot(snapshot, provider, registry):
    if provider.page_format == PageFormat.INSTATUS:
        return parse_instatus_history(snapshot, provider, registry)
    return parse_statuspage_history(snapshot, provider, registry)


def _scrape_provider(
    provider_id: str,
    config: ScrapeConfig,
    registry: Registry,
    transport: Optional[Transport],
    sleep: Callable[[float], None],
) -> tuple[list[IncidentRecord], ProviderReport]:
    provider = registry.provider(provider_id)
    report = ProviderReport()
    staged: list[IncidentRecord] = []

    outcome = fetch_history(provider, config, transport=transport, sleep=sleep)
    report.warnings.extend(outcome.warnings)
    report.errors.extend(outcome.errors)
    report.pages_fetched = len(outcome.snapshots)

    for snapshot in outcome.snapshots:
        try:
            parsed = _parse_snapshot(snapshot, provider, registry)
        except IngestionError as exc:
            report.errors.append(str(exc))
            continue
        report.warnings.extend(parsed.warnings)
        for record in parsed.records:
            issues = validate_incident(record, registry)
            hard = [i for i in issues if i.is_error]
            if hard:
                report.errors.append(
                    f"record {record.incident_id!r} dropped: "
                    + "; ".join(i.message for i in hard)
                )
                continue
            report.warnings.extend(
                f"record {record.incident_id!r}: {i.message}" for i in issues if not i.is_error
            )
            staged.append(record)

    report.incidents_parsed = len(staged)
    return staged, report


def run_pipeline(
    config: ScrapeConfig,
    registry: Optional[Registry] = None,
    transport: Optional[Transport] = None,
    sleep: Callable[[float], None] = None,
) -> tuple[IncidentDataset, ScrapeReport]:
    """Scrape every configured provider and merge the staged results.

    Never raises for per-provider failures; those land in the report. In
    fixture mode the dataset's scraped_at is derived from the newest
    timestamp in the data so repeat runs are byte-identical once stored.
    """
    import time as _time

    registry = registry or builtin_registry()
    sleep = sleep or _time.sleep
    for pid in config.providers:
        if not registry.has_provider(pid):
            raise UnknownProvider(pid)

    started = utc_now()
    provider_ids = sorted(config.providers)
    staged: dict[str, tuple[list[IncidentRecord], ProviderReport]] = {}

    with ThreadPoolExecutor(max_workers=max(1, len(provider_ids))) as pool:
        futures = {
            pid: pool.submit(_scrape_provider, pid, config, registry, transport, sleep)
            for pid in provider_ids
        }
        for pid, future in futures.items():
            staged[pid] = future.result()

    merged: list[IncidentRecord] = []
    seen_ids: set[str] = set()
    per_provider: dict[str, ProviderReport] = {}
    for pid in provider_ids:
        records, report = staged[pid]
        for record in records:
            if record.incident_id in seen_ids:
                report.warnings.append(
                    f"duplicate incident id {record.incident_id!r}; first occurrence kept"
                )
                continue
            seen_ids.add(record.incident_id)
            merged.append(record)
        per_provider[pid] = report

    if config.fixture_dir is not None:
        scraped_at = latest_observed(merged) or started
        source = f"fixture:{config.fixture_dir}"
    else:
        scraped_at = started
        source = "live"
    provenance = {pid: f"{source}/{pid}" for pid in provider_ids}

    dataset = IncidentDataset(records=tuple(merged), scraped_at=scraped_at, provenance=provenance)
    report = ScrapeReport(per_provider=per_provider, started_at=started, finished_at=utc_now())
    return dataset, report
