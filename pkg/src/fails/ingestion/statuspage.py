"""Parser for Statuspage-family incident histories.

Two source shapes are supported, dispatched on the snapshot's content kind:
the month-by-month HTML history (grammar documented in docs/providers.md and
pinned by the fixture corpus) and the JSON incidents feed the same platform
serves under /api/v2/incidents.json.
"""

from __future__ import annotations

import json
from datetime import datetime
from typing import Optional

from fails.model import (
    ImpactLevel,
    IncidentRecord,
    IncidentUpdate,
    Provider,
    RecoveryStage,
    Registry,
)
from fails.ingestion.htmldoc import parse_html
from fails.ingestion.identify import identify_services
from fails.ingestion.timestamps import UnparseableTimestamp, normalize_timestamp
from fails.ingestion.types import ContentKind, MalformedPage, PageSnapshot, ParseResult

# Colors assigned when the source reports an impact but no color of its own
# (the JSON feed carries no color field).
DEFAULT_IMPACT_COLORS = {
    ImpactLevel.NONE: "#2ecc71",
    ImpactLevel.MINOR: "#f1c40f",
    ImpactLevel.MAJOR: "#e67e22",
    ImpactLevel.CRITICAL: "#e74c3c",
    ImpactLevel.MAINTENANCE: "#3498db",
}

_STAGE_BY_LABEL = {stage.token: stage for stage in RecoveryStage}


def _translate_impact(
    provider: Provider, label: str, incident_name: str, result: ParseResult
) -> ImpactLevel:
    canonical = provider.impact_map.get(label, provider.impact_map.get(label.lower()))
    if canonical is None:
        result.warnings.append(
            f"unknown impact label {label!r} on {incident_name!r}; defaulting to none"
        )
        return ImpactLevel.NONE
    return ImpactLevel.from_token(canonical)


def _finish_record(
    provider: Provider,
    registry: Registry,
    result: ParseResult,
    incident_id: str,
    title: str,
    impact: ImpactLevel,
    color: str,
    updates: list[IncidentUpdate],
    explicit_tags: list[str],
    source_url: Optional[str],
    start: Optional[datetime] = None,
    end: Optional[datetime] = None,
) -> None:
    """Assemble one record from parsed pieces and append it to the result."""
    if not updates and start is None:
        result.warnings.append(f"incident {incident_id!r} has no usable timestamps; skipped")
        return

    stage_times: dict[RecoveryStage, datetime] = {}
    for update in updates:
        if update.stage not in stage_times or update.at < stage_times[update.stage]:
            stage_times[update.stage] = update.at

    if start is None:
        start = min(u.at for u in updates)
    if end is None:
        end = stage_times.get(RecoveryStage.S4_RESOLVED)

    description = " ".join([title, *(u.body for u in updates)])
    services, provider_wide = identify_services(provider, explicit_tags, description, registry)
    if provider_wide:
        result.warnings.append(
            f"incident {incident_id!r} matched no service; attributed provider-wide"
        )

    result.records.append(
        IncidentRecord(
            incident_id=incident_id,
            provider=provider.id,
            services=frozenset(services),
            title=title,
            impact=impact,
            impact_color=color,
            start=start,
            end=end,
            stage_times=stage_times,
            updates=tuple(updates),
            source_url=source_url,
        )
    )


# --------------------------------------------------------------------------
# HTML month-history pages
# --------------------------------------------------------------------------


def _parse_history_html(snapshot: PageSnapshot, provider: Provider, registry: Registry) -> ParseResult:
    result = ParseResult()
    doc = parse_html(snapshot.text())
    container = doc.find(cls="months-container")
    if container is None:
        raise MalformedPage(f"{snapshot.url}: missing element 'months-container'")

    incidents = container.find_all(cls="incident-container")
    if not incidents:
        result.warnings.append(f"{snapshot.url}: history page lists no incidents")
        return result

    for box in incidents:
        anchor = box.find("a", cls="incident-title")
        if anchor is None:
            raise MalformedPage(f"{snapshot.url}: incident missing element 'incident-title'")
        href = anchor.get("href")
        if not href:
            raise MalformedPage(f"{snapshot.url}: incident-title missing 'href'")
        incident_id = href.rstrip("/").rsplit("/", 1)[-1]
        title = anchor.text()

        impact_label = next(
            (c.removeprefix("impact-") for c in sorted(anchor.classes) if c.startswith("impact-")),
            None,
        )
        if impact_label is None:
            result.warnings.append(f"incident {incident_id!r} carries no impact class")
            impact = ImpactLevel.NONE
        else:
            impact = _translate_impact(provider, impact_label, title, result)
        color = box.get("data-impact-color") or DEFAULT_IMPACT_COLORS[impact]

        tags = [el.text() for el in box.find_all(cls="component-tag")]

        updates: list[IncidentUpdate] = []
        for row in box.find_all(cls="update"):
            status_el = row.find(cls="update-status")
            time_el = row.find(cls="update-time")
            if status_el is None or time_el is None:
                raise MalformedPage(f"{snapshot.url}: update missing status or time element")
            stage = _STAGE_BY_LABEL.get(status_el.text().strip().lower())
            if stage is None:
                result.warnings.append(
                    f"incident {incident_id!r}: unknown update status {status_el.text()!r}; skipped"
                )
                continue
            try:
                at = normalize_timestamp(time_el.text())
            except UnparseableTimestamp as exc:
                result.warnings.append(f"incident {incident_id!r}: {exc}")
                continue
            body_el = row.find(cls="update-body")
            updates.append(IncidentUpdate(stage=stage, at=at, body=body_el.text() if body_el else ""))

        _finish_record(
            provider, registry, result,
            incident_id=incident_id, title=title, impact=impact, color=color,
            updates=updates, explicit_tags=tags, source_url=href,
        )
    return result


# --------------------------------------------------------------------------
# JSON incidents feed
# --------------------------------------------------------------------------


def _parse_history_json(snapshot: PageSnapshot, provider: Provider, registry: Registry) -> ParseResult:
    result = ParseResult()
    try:
        payload = json.loads(snapshot.text())
    except json.JSONDecodeError as exc:
        raise MalformedPage(f"{snapshot.url}: body is not valid JSON ({exc})") from exc
    if not isinstance(payload, dict) or "incidents" not in payload:
        raise MalformedPage(f"{snapshot.url}: missing element 'incidents'")

    incidents = payload["incidents"]
    if not incidents:
        result.warnings.append(f"{snapshot.url}: incidents feed is empty")
        return result

    for item in incidents:
        incident_id = item.get("id")
        title = item.get("name", "")
        if not incident_id:
            raise MalformedPage(f"{snapshot.url}: incident entry missing 'id'")

        impact = _translate_impact(provider, item.get("impact", ""), title, result)
        color = DEFAULT_IMPACT_COLORS[impact]

        updates: list[IncidentUpdate] = []
        for upd in item.get("incident_updates", []):
            stage = _STAGE_BY_LABEL.get(str(upd.get("status", "")).lower())
            if stage is None:
                result.warnings.append(
                    f"incident {incident_id!r}: unknown update status {upd.get('status')!r}; skipped"
                )
                continue
            raw_at = upd.get("display_at") or upd.get("created_at") or ""
            try:
                at = normalize_timestamp(raw_at)
            except UnparseableTimestamp as exc:
                result.warnings.append(f"incident {incident_id!r}: {exc}")
                continue
            updates.append(IncidentUpdate(stage=stage, at=at, body=upd.get("body", "")))

        start = end = None
        if item.get("started_at"):
            start = normalize_timestamp(item["started_at"])
        if item.get("resolved_at"):
            end = normalize_timestamp(item["resolved_at"])

        tags = [c.get("name", "") for c in item.get("components", [])]

        _finish_record(
            provider, registry, result,
            incident_id=incident_id, title=title, impact=impact, color=color,
            updates=updates, explicit_tags=tags,
            source_url=item.get("shortlink"), start=start, end=end,
        )
    return result


def parse_statuspage_history(
    snapshot: PageSnapshot, provider: Provider, registry: Registry
) -> ParseResult:
    """Parse one Statuspage-family snapshot into incident records."""
    if snapshot.content_kind == ContentKind.JSON:
        return _parse_history_json(snapshot, provider, registry)
    return _parse_history_html(snapshot, provider, registry)
