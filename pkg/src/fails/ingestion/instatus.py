"""Parser for Instatus-style incident list pages (JSON).

Instatus pages expose no per-incident URL id, so the record id is a
deterministic content hash of (provider, title, start); re-scrapes of the
same history therefore deduplicate instead of multiplying.
"""

from __future__ import annotations

import hashlib
import json

from fails.model import format_ts, Provider, RecoveryStage, Registry
from fails.ingestion.statuspage import _finish_record, _translate_impact, DEFAULT_IMPACT_COLORS
from fails.ingestion.timestamps import UnparseableTimestamp, normalize_timestamp
from fails.ingestion.types import MalformedPage, PageSnapshot, ParseResult
from fails.model import IncidentUpdate

_STAGE_BY_STATUS = {
    "INVESTIGATING": RecoveryStage.S1_INVESTIGATING,
    "IDENTIFIED": RecoveryStage.S2_IDENTIFIED,
    "MONITORING": RecoveryStage.S3_MONITORING,
    "RESOLVED": RecoveryStage.S4_RESOLVED,
    "POSTMORTEM": RecoveryStage.S5_POSTMORTEM,
}


def content_hash_id(provider_id: str, title: str, start_iso: str) -> str:
    digest = hashlib.sha256(f"{provider_id}|{title}|{start_iso}".encode("utf-8")).hexdigest()
    return digest[:12]


def parse_instatus_history(
    snapshot: PageSnapshot, provider: Provider, registry: Registry
) -> ParseResult:
    """Parse one Instatus list-page snapshot into incident records."""
    result = ParseResult()
    try:
        payload = json.loads(snapshot.text())
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise MalformedPage(f"{snapshot.url}: body is not valid JSON ({exc})") from exc
    if not isinstance(payload, dict) or "incidents" not in payload:
        raise MalformedPage(f"{snapshot.url}: missing element 'incidents'")

    incidents = payload["incidents"]
    if not incidents:
        result.warnings.append(f"{snapshot.url}: incident list is empty")
        return result

    for item in incidents:
        title = item.get("name", "")
        raw_started = item.get("started")
        if not raw_started:
            raise MalformedPage(f"{snapshot.url}: incident {title!r} missing 'started'")
        start = normalize_timestamp(raw_started)
        incident_id = content_hash_id(provider.id, title, format_ts(start))

        impact = _translate_impact(provider, str(item.get("impact", "")), title, result)
        color = item.get("color") or DEFAULT_IMPACT_COLORS[impact]

        end = None
        if item.get("resolved"):
            end = normalize_timestamp(item["resolved"])

        updates: list[IncidentUpdate] = []
        for upd in item.get("updates", []):
            stage = _STAGE_BY_STATUS.get(str(upd.get("status", "")).upper())
            if stage is None:
                result.warnings.append(
                    f"incident {incident_id!r}: unknown update status {upd.get('status')!r}; skipped"
                )
                continue
            try:
                at = normalize_timestamp(upd.get("created", ""))
            except UnparseableTimestamp as exc:
                result.warnings.append(f"incident {incident_id!r}: {exc}")
                continue
            updates.append(IncidentUpdate(stage=stage, at=at, body=upd.get("message", "")))

        tags = [str(c) for c in item.get("components", [])]

        _finish_record(
            provider, registry, result,
            incident_id=incident_id, title=title, impact=impact, color=color,
            updates=updates, explicit_tags=tags,
            source_url=item.get("url"), start=start, end=end,
        )
    return result
