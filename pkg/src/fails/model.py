"""Canonical domain model: providers, services, impact levels, the five-stage
failure-recovery lifecycle, and the incident record shared by every subsystem.

All types are immutable after construction and safe to share across threads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum, IntEnum
from importlib import resources
from typing import Iterable, Optional


# --------------------------------------------------------------------------
# Timestamps
# --------------------------------------------------------------------------

TS_FORMAT = "%Y-%m-%dT%H:%M:%SZ"


def utc_now() -> datetime:
    """Current UTC time truncated to whole seconds."""
    return datetime.now(timezone.utc).replace(microsecond=0)


def to_utc(dt: datetime) -> datetime:
    """Normalize an aware datetime to UTC, truncating sub-second precision."""
    if dt.tzinfo is None:
        raise ValueError("naive datetime has no zone; resolve it before normalizing")
    return dt.astimezone(timezone.utc).replace(microsecond=0)


def format_ts(dt: datetime) -> str:
    """Serialize to the canonical ISO-8601 form with a trailing Z."""
    return to_utc(dt).strftime(TS_FORMAT)


def parse_ts(text: str) -> datetime:
    """Parse a canonical `YYYY-MM-DDTHH:MM:SSZ` string."""
    dt = datetime.strptime(text, TS_FORMAT)
    return dt.replace(tzinfo=timezone.utc)


# --------------------------------------------------------------------------
# Enums
# --------------------------------------------------------------------------


class PageFormat(str, Enum):
    STATUSPAGE = "statuspage"
    INSTATUS = "instatus"


class ImpactLevel(IntEnum):
    """Normalized incident impact. Maintenance sorts below None."""

    MAINTENANCE = 0
    NONE = 1
    MINOR = 2
    MAJOR = 3
    CRITICAL = 4

    @property
    def token(self) -> str:
        return self.name.lower()

    @property
    def severity_score(self) -> int:
        """Severity on a 1..5 scale: maintenance=1, none=2, ..., critical=5."""
        return _SEVERITY_BY_LEVEL[self]

    @classmethod
    def from_token(cls, token: str) -> "ImpactLevel":
        try:
            return cls[token.strip().upper()]
        except KeyError:
            raise ValueError(f"unknown impact level token: {token!r}") from None


_SEVERITY_BY_LEVEL = {
    ImpactLevel.MAINTENANCE: 1,
    ImpactLevel.NONE: 2,
    ImpactLevel.MINOR: 3,
    ImpactLevel.MAJOR: 4,
    ImpactLevel.CRITICAL: 5,
}


class RecoveryStage(IntEnum):
    """Five-stage incident lifecycle, totally ordered S1 < ... < S5."""

    S1_INVESTIGATING = 1
    S2_IDENTIFIED = 2
    S3_MONITORING = 3
    S4_RESOLVED = 4
    S5_POSTMORTEM = 5

    @property
    def token(self) -> str:
        return self.name.split("_", 1)[1].lower()

    @property
    def short(self) -> str:
        return f"S{self.value}"

    @classmethod
    def from_token(cls, token: str) -> "RecoveryStage":
        key = token.strip().lower()
        for stage in cls:
            if stage.token == key:
                return stage
        raise ValueError(f"unknown recovery stage token: {token!r}")


# --------------------------------------------------------------------------
# Registry
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Provider:
    id: str
    display_name: str
    page_format: PageFormat
    status_url: str
    impact_map: dict[str, str] = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class Service:
    id: str
    provider: str
    display_name: str
    match_keywords: tuple[str, ...] = ()


class Registry:
    """Lookup tables for provider and service ids.

    Extensible: extra providers/services may be registered at runtime but ids
    stay unique.
    """

    def __init__(self, providers: Iterable[Provider], services: Iterable[Service]):
        self._providers: dict[str, Provider] = {}
        self._services: dict[str, Service] = {}
        for p in providers:
            self.add_provider(p)
        for s in services:
            self.add_service(s)

    def add_provider(self, provider: Provider) -> None:
        if provider.id in self._providers:
            raise ValueError(f"duplicate provider id: {provider.id}")
        self._providers[provider.id] = provider

    def add_service(self, service: Service) -> None:
        if service.id in self._services:
            raise ValueError(f"duplicate service id: {service.id}")
        if service.provider not in self._providers:
            raise ValueError(f"service {service.id} names unknown provider {service.provider}")
        self._services[service.id] = service

    @property
    def providers(self) -> list[Provider]:
        return list(self._providers.values())

    @property
    def services(self) -> list[Service]:
        return list(self._services.values())

    def provider(self, provider_id: str) -> Provider:
        try:
            return self._providers[provider_id]
        except KeyError:
            raise KeyError(f"unknown provider: {provider_id}") from None

    def service(self, service_id: str) -> Service:
        try:
            return self._services[service_id]
        except KeyError:
            raise KeyError(f"unknown service: {service_id}") from None

    def has_provider(self, provider_id: str) -> bool:
        return provider_id in self._providers

    def has_service(self, service_id: str) -> bool:
        return service_id in self._services

    def services_of(self, provider_id: str) -> list[Service]:
        return [s for s in self._services.values() if s.provider == provider_id]


def _load_registry_config() -> dict:
    data = resources.files("fails.config").joinpath("services.json").read_text("utf-8")
    return json.loads(data)


def builtin_registry() -> Registry:
    """The built-in registry: 4 providers and their 11 services."""
    cfg = _load_registry_config()
    providers = [
        Provider(
            id=p["id"],
            display_name=p["display_name"],
            page_format=PageFormat(p["page_format"]),
            status_url=p["status_url"],
            impact_map=p.get("impact_map", {}),
        )
        for p in cfg["providers"]
    ]
    services = [
        Service(
            id=s["id"],
            provider=s["provider"],
            display_name=s["display_name"],
            match_keywords=tuple(s["match_keywords"]),
        )
        for s in cfg["services"]
    ]
    return Registry(providers, services)


# --------------------------------------------------------------------------
# Incident records
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class IncidentUpdate:
    stage: RecoveryStage
    at: datetime
    body: str = ""

    def to_dict(self) -> dict:
        return {"stage": self.stage.token, "at": format_ts(self.at), "body": self.body}

    @classmethod
    def from_dict(cls, d: dict) -> "IncidentUpdate":
        return cls(
            stage=RecoveryStage.from_token(d["stage"]),
            at=parse_ts(d["at"]),
            body=d.get("body", ""),
        )


@dataclass(frozen=True)
class IncidentRecord:
    incident_id: str
    provider: str
    services: frozenset[str]
    title: str
    impact: ImpactLevel
    impact_color: str
    start: datetime
    end: Optional[datetime]
    stage_times: dict[RecoveryStage, datetime] = field(default_factory=dict)
    updates: tuple[IncidentUpdate, ...] = ()
    source_url: Optional[str] = None

    @property
    def duration_seconds(self) -> Optional[int]:
        if self.end is None:
            return None
        return int((self.end - self.start).total_seconds())

    @property
    def severity_score(self) -> int:
        return self.impact.severity_score

    def to_dict(self) -> dict:
        return {
            "incident_id": self.incident_id,
            "provider": self.provider,
            "services": sorted(self.services),
            "title": self.title,
            "impact_level": self.impact.token,
            "impact_color": self.impact_color,
            "severity_score": self.severity_score,
            "start": format_ts(self.start),
            "end": format_ts(self.end) if self.end else None,
            "stage_times": {
                stage.token: format_ts(at) for stage, at in sorted(self.stage_times.items())
            },
            "updates": [u.to_dict() for u in self.updates],
            "source_url": self.source_url,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "IncidentRecord":
        return cls(
            incident_id=d["incident_id"],
            provider=d["provider"],
            services=frozenset(d["services"]),
            title=d["title"],
            impact=ImpactLevel.from_token(d["impact_level"]),
            impact_color=d["impact_color"],
            start=parse_ts(d["start"]),
            end=parse_ts(d["end"]) if d.get("end") else None,
            stage_times={
                RecoveryStage.from_token(k): parse_ts(v)
                for k, v in d.get("stage_times", {}).items()
            },
            updates=tuple(IncidentUpdate.from_dict(u) for u in d.get("updates", [])),
            source_url=d.get("source_url"),
        )


def record_sort_key(record: IncidentRecord) -> tuple:
    return (record.start, record.incident_id)


@dataclass(frozen=True)
class IncidentDataset:
    """Validated, deduplicated collection of incidents sorted by (start, id)."""

    records: tuple[IncidentRecord, ...]
    scraped_at: datetime
    provenance: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        ids = [r.incident_id for r in self.records]
        if len(ids) != len(set(ids)):
            seen, dupes = set(), set()
            for i in ids:
                (dupes if i in seen else seen).add(i)
            raise ValueError(f"duplicate incident ids: {sorted(dupes)}")
        ordered = tuple(sorted(self.records, key=record_sort_key))
        object.__setattr__(self, "records", ordered)

    def __len__(self) -> int:
        return len(self.records)

    @property
    def ids(self) -> set[str]:
        return {r.incident_id for r in self.records}

    def by_provider(self, provider_id: str) -> list[IncidentRecord]:
        return [r for r in self.records if r.provider == provider_id]

    def by_service(self, service_id: str) -> list[IncidentRecord]:
        return [r for r in self.records if service_id in r.services]


def empty_dataset(scraped_at: Optional[datetime] = None) -> IncidentDataset:
    return IncidentDataset(records=(), scraped_at=scraped_at or utc_now(), provenance={})


def latest_observed(records: Iterable[IncidentRecord]) -> Optional[datetime]:
    """The most recent timestamp mentioned anywhere in the given records."""
    best: Optional[datetime] = None
    for r in records:
        candidates = [r.start]
        if r.end:
            candidates.append(r.end)
        candidates.extend(r.stage_times.values())
        candidates.extend(u.at for u in r.updates)
        top = max(candidates)
        if best is None or top > best:
            best = top
    return best


# --------------------------------------------------------------------------
# Validation
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ValidationIssue:
    code: str
    severity: str  # "error" | "warning"
    message: str

    @property
    def is_error(self) -> bool:
        return self.severity == "error"


def validate_incident(
    record: IncidentRecord, registry: Optional[Registry] = None
) -> list[ValidationIssue]:
    """Check one record against the model invariants.

    Hard invariant violations come back with severity "error"; data-quality
    oddities that real status pages produce (out-of-order stage times, still
    open incidents) are warnings. Issues are data, never exceptions.
    """
    registry = registry or builtin_registry()
    issues: list[ValidationIssue] = []

    if not record.incident_id:
        issues.append(ValidationIssue("MISSING_ID", "error", "incident_id is empty"))
    if not registry.has_provider(record.provider):
        issues.append(
            ValidationIssue("UNKNOWN_PROVIDER", "error", f"unknown provider {record.provider!r}")
        )
    if not record.services:
        issues.append(ValidationIssue("EMPTY_SERVICES", "error", "no services attached"))
    for sid in sorted(record.services):
        if not registry.has_service(sid):
            issues.append(
                ValidationIssue("UNKNOWN_SERVICE", "error", f"unknown service {sid!r}")
            )
        elif registry.service(sid).provider != record.provider:
            issues.append(
                ValidationIssue(
                    "SERVICE_PROVIDER_MISMATCH",
                    "error",
                    f"service {sid} does not belong to provider {record.provider}",
                )
            )

    if record.end is not None and record.end < record.start:
        issues.append(
            ValidationIssue(
                "END_BEFORE_START",
                "error",
                f"end {format_ts(record.end)} precedes start {format_ts(record.start)}",
            )
        )
    if record.end is None:
        issues.append(
            ValidationIssue("MISSING_END", "warning", "incident has no end timestamp (still open)")
        )

    present = sorted(record.stage_times.items())
    for (earlier, t_earlier), (later, t_later) in zip(present, present[1:]):
        if t_later < t_earlier:
            issues.append(
                ValidationIssue(
                    "STAGE_ORDER",
                    "warning",
                    f"{later.short} at {format_ts(t_later)} precedes "
                    f"{earlier.short} at {format_ts(t_earlier)}",
                )
            )
    return issues


# --------------------------------------------------------------------------
# Selection
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class AnalysisSelection:
    """Time window plus service subset that scopes an analysis."""

    start: datetime
    end: datetime
    services: frozenset[str]

    def __post_init__(self):
        if self.start >= self.end:
            raise ValueError("selection window start must precede end")
        if not self.services:
            raise ValueError("selection requires at least one service")

    @property
    def span_days(self) -> float:
        return (self.end - self.start).total_seconds() / 86400.0


def full_selection(dataset: IncidentDataset, registry: Optional[Registry] = None) -> AnalysisSelection:
    """Selection covering every built-in service and the dataset's full range."""
    registry = registry or builtin_registry()
    services = frozenset(s.id for s in registry.services)
    if dataset.records:
        start = dataset.records[0].start
        end = max(dataset.scraped_at, latest_observed(dataset.records) or dataset.scraped_at)
        if end <= start:
            end = start + (parse_ts("1970-01-02T00:00:00Z") - parse_ts("1970-01-01T00:00:00Z"))
    else:
        start = parse_ts("2020-01-01T00:00:00Z")
        end = dataset.scraped_at if dataset.scraped_at > start else parse_ts("2030-01-01T00:00:00Z")
    return AnalysisSelection(start=start, end=end, services=services)


def filter_selection(dataset: IncidentDataset, sel: AnalysisSelection) -> IncidentDataset:
    """Records whose start is inside the window and whose services intersect
    the selected set. Sorted order is preserved; the result may be empty."""
    kept = tuple(
        r
        for r in dataset.records
        if sel.start <= r.start <= sel.end and r.services & sel.services
    )
    return IncidentDataset(records=kept, scraped_at=dataset.scraped_at, provenance=dict(dataset.provenance))
