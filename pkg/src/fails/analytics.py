"""Reliability metrics over incident datasets.

Everything here is a pure function of an immutable dataset: MTBF/MTTR
samples, empirical CDFs, boxplot statistics, co-occurrence matrices,
temporal distributions, day-by-day availability, autocorrelation, stage
durations, status combinations, impact distributions and summaries.

All durations are integer seconds (timestamps carry second resolution).
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass
from datetime import date, datetime, timedelta, timezone
from typing import Optional

from fails.model import (
    AnalysisSelection,
    IncidentDataset,
    IncidentRecord,
    Provider,
    RecoveryStage,
    Registry,
    builtin_registry,
    filter_selection,
)


class AnalyticsError(Exception):
    pass


class UnknownGroup(AnalyticsError):
    pass


class EmptySamples(AnalyticsError):
    pass


class DegenerateSeries(AnalyticsError):
    """Raised when a series has zero variance and the estimator is undefined."""


# --------------------------------------------------------------------------
# Result types
# --------------------------------------------------------------------------


class GroupKind:
    PROVIDER = "provider"
    SERVICE = "service"
    TRANSITION = "transition"


@dataclass(frozen=True)
class GroupKey:
    kind: str
    id: str

    def label(self) -> str:
        return self.id


@dataclass(frozen=True)
class DurationSamples:
    group: GroupKey
    samples: tuple[int, ...]
    mean: float
    median: float
    count: int
    skipped: int = 0

    @classmethod
    def from_values(cls, group: GroupKey, values: list[int], skipped: int = 0) -> "DurationSamples":
        if values:
            mean = statistics.fmean(values)
            median = float(statistics.median(values))
        else:
            mean = median = 0.0
        return cls(
            group=group,
            samples=tuple(values),
            mean=mean,
            median=median,
            count=len(values),
            skipped=skipped,
        )


@dataclass(frozen=True)
class EcdfSeries:
    group: GroupKey
    points: tuple[tuple[float, float], ...]  # (x, P(X <= x)), x strictly increasing


@dataclass(frozen=True)
class BoxplotStats:
    group: GroupKey
    min: float
    q1: float
    median: float
    q3: float
    max: float
    outliers: tuple[float, ...]
    whisker_low: float
    whisker_high: float


@dataclass(frozen=True)
class MatrixSeries:
    labels: tuple[str, ...]
    cells: tuple[tuple[float, ...], ...]

    def cell(self, i: int, j: int) -> float:
        return self.cells[i][j]


class BinKind:
    DAY_OF_WEEK = "day_of_week"
    HOUR_OF_DAY = "hour_of_day"
    CALENDAR_DAY = "calendar_day"
    CATEGORY = "category"


@dataclass(frozen=True)
class TimeSeriesBins:
    bin_kind: str
    bins: tuple[tuple[str, float], ...]

    @property
    def values(self) -> list[float]:
        return [v for _, v in self.bins]

    @property
    def labels(self) -> list[str]:
        return [k for k, _ in self.bins]

    @property
    def total(self) -> float:
        return sum(self.values)


DAY_LABELS = ["Monday", "Tuesday", "Wednesday", "Thursday", "Friday", "Saturday", "Sunday"]


# --------------------------------------------------------------------------
# Grouping helpers
# --------------------------------------------------------------------------


def _group_records(
    dataset: IncidentDataset, group: GroupKey, registry: Registry
) -> list[IncidentRecord]:
    if group.kind == GroupKind.PROVIDER:
        if not registry.has_provider(group.id):
            raise UnknownGroup(f"unknown provider group {group.id!r}")
        return dataset.by_provider(group.id)
    if group.kind == GroupKind.SERVICE:
        if not registry.has_service(group.id):
            raise UnknownGroup(f"unknown service group {group.id!r}")
        return dataset.by_service(group.id)
    raise UnknownGroup(f"unsupported group kind {group.kind!r}")


def provider_group(provider_id: str) -> GroupKey:
    return GroupKey(kind=GroupKind.PROVIDER, id=provider_id)


def service_group(service_id: str) -> GroupKey:
    return GroupKey(kind=GroupKind.SERVICE, id=service_id)


# --------------------------------------------------------------------------
# MTBF / MTTR
# --------------------------------------------------------------------------


def mtbf_samples(
    dataset: IncidentDataset, group: GroupKey, registry: Optional[Registry] = None
) -> DurationSamples:
    """Start-to-start gaps between consecutive incidents of the group.

    n incidents yield n-1 samples; the mean is the MTBF. The gap is taken
    between starts so still-open incidents contribute too.
    """
    registry = registry or builtin_registry()
    records = _group_records(dataset, group, registry)
    starts = sorted(r.start for r in records)
    gaps = [int((b - a).total_seconds()) for a, b in zip(starts, starts[1:])]
    return DurationSamples.from_values(group, gaps)


def mttr_samples(
    dataset: IncidentDataset, group: GroupKey, registry: Optional[Registry] = None
) -> DurationSamples:
    """Per-incident recovery spans: resolution (S4) minus investigation (S1).

    Incidents missing S1 fall back to their start, missing S4 to their end;
    incidents with neither S4 nor end are skipped (counted in ``skipped``).
    Negative spans from out-of-order reports are skipped likewise.
    """
    registry = registry or builtin_registry()
    records = _group_records(dataset, group, registry)
    values: list[int] = []
    skipped = 0
    for record in records:
        began = record.stage_times.get(RecoveryStage.S1_INVESTIGATING, record.start)
        resolved = record.stage_times.get(RecoveryStage.S4_RESOLVED, record.end)
        if resolved is None:
            skipped += 1
            continue
        span = int((resolved - began).total_seconds())
        if span < 0:
            skipped += 1
            continue
        values.append(span)
    return DurationSamples.from_values(group, values, skipped=skipped)


# --------------------------------------------------------------------------
# Distribution statistics
# --------------------------------------------------------------------------


def ecdf(samples: DurationSamples) -> EcdfSeries:
    """Empirical CDF P(X <= x) = (#samples <= x) / n at each distinct value."""
    if samples.count == 0:
        raise EmptySamples(f"no samples for group {samples.group.id!r}")
    ordered = sorted(samples.samples)
    n = len(ordered)
    points: list[tuple[float, float]] = []
    seen = 0
    for i, x in enumerate(ordered):
        seen += 1
        if i + 1 < n and ordered[i + 1] == x:
            continue  # collapse ties onto the highest cumulative fraction
        points.append((float(x), seen / n))
    return EcdfSeries(group=samples.group, points=tuple(points))


def _quantile(ordered: list[float], q: float) -> float:
    """Linear interpolation between closest ranks over a sorted sample."""
    n = len(ordered)
    if n == 1:
        return float(ordered[0])
    h = (n - 1) * q
    lo = math.floor(h)
    hi = math.ceil(h)
    if lo == hi:
        return float(ordered[lo])
    return ordered[lo] + (h - lo) * (ordered[hi] - ordered[lo])


def boxplot(samples: DurationSamples) -> BoxplotStats:
    """Quartiles by linear rank interpolation plus 1.5 IQR outlier fences."""
    if samples.count == 0:
        raise EmptySamples(f"no samples for group {samples.group.id!r}")
    ordered = sorted(float(v) for v in samples.samples)
    q1 = _quantile(ordered, 0.25)
    med = _quantile(ordered, 0.50)
    q3 = _quantile(ordered, 0.75)
    iqr = q3 - q1
    fence_lo = q1 - 1.5 * iqr
    fence_hi = q3 + 1.5 * iqr
    outliers = tuple(v for v in ordered if v < fence_lo or v > fence_hi)
    inside = [v for v in ordered if fence_lo <= v <= fence_hi]
    whisker_low = min(inside) if inside else q1
    whisker_high = max(inside) if inside else q3
    return BoxplotStats(
        group=samples.group,
        min=ordered[0],
        q1=q1,
        median=med,
        q3=q3,
        max=ordered[-1],
        outliers=outliers,
        whisker_low=whisker_low,
        whisker_high=whisker_high,
    )


# --------------------------------------------------------------------------
# Co-occurrence
# --------------------------------------------------------------------------


def cooccurrence_histogram(
    dataset: IncidentDataset, provider: Provider, registry: Optional[Registry] = None
) -> TimeSeriesBins:
    """Histogram of how many of the provider's services one incident hit."""
    registry = registry or builtin_registry()
    if not registry.has_provider(provider.id):
        raise UnknownGroup(f"unknown provider {provider.id!r}")
    n_services = len(registry.services_of(provider.id))
    counts = {k: 0 for k in range(1, n_services + 1)}
    for record in dataset.by_provider(provider.id):
        k = len(record.services)
        if k in counts:
            counts[k] += 1
    return TimeSeriesBins(
        bin_kind=BinKind.CATEGORY,
        bins=tuple((str(k), float(counts[k])) for k in sorted(counts)),
    )


def cooccurrence_matrix(dataset: IncidentDataset, services: list[str]) -> MatrixSeries:
    """cell(i, j) = number of incidents affecting both service i and j.

    Symmetric; the diagonal is each service's incident count.
    """
    idx = {sid: i for i, sid in enumerate(services)}
    n = len(services)
    cells = [[0.0] * n for _ in range(n)]
    for record in dataset.records:
        hit = sorted(idx[s] for s in record.services if s in idx)
        for a in hit:
            for b in hit:
                cells[a][b] += 1.0
    return MatrixSeries(labels=tuple(services), cells=tuple(tuple(row) for row in cells))


def cooccurrence_probability(dataset: IncidentDataset, services: list[str]) -> MatrixSeries:
    """Conditional probability matrix: cell(i, j) = P(j affected | i affected).

    Rows with a zero marginal are all zeros; the diagonal is 1 elsewhere.
    """
    counts = cooccurrence_matrix(dataset, services)
    n = len(services)
    cells = []
    for i in range(n):
        marginal = counts.cell(i, i)
        if marginal == 0:
            cells.append(tuple(0.0 for _ in range(n)))
        else:
            cells.append(tuple(counts.cell(i, j) / marginal for j in range(n)))
    return MatrixSeries(labels=tuple(services), cells=tuple(cells))


# --------------------------------------------------------------------------
# Temporal distributions
# --------------------------------------------------------------------------


def weekly_overview(
    dataset: IncidentDataset, sel: AnalysisSelection
) -> dict[str, TimeSeriesBins]:
    """Incident starts per day of week (Monday-first), one series per
    selected service. An incident on k selected services contributes to k
    series."""
    subset = filter_selection(dataset, sel)
    out: dict[str, TimeSeriesBins] = {}
    for sid in sorted(sel.services):
        counts = [0.0] * 7
        for record in subset.records:
            if sid in record.services:
                counts[record.start.weekday()] += 1.0
        out[sid] = TimeSeriesBins(
            bin_kind=BinKind.DAY_OF_WEEK,
            bins=tuple(zip(DAY_LABELS, counts)),
        )
    return out


def hourly_overview(
    dataset: IncidentDataset, sel: AnalysisSelection
) -> dict[str, TimeSeriesBins]:
    """Incident starts per UTC hour (0-23), one series per selected service."""
    subset = filter_selection(dataset, sel)
    out: dict[str, TimeSeriesBins] = {}
    for sid in sorted(sel.services):
        counts = [0.0] * 24
        for record in subset.records:
            if sid in record.services:
                counts[record.start.hour] += 1.0
        out[sid] = TimeSeriesBins(
            bin_kind=BinKind.HOUR_OF_DAY,
            bins=tuple((str(h), counts[h]) for h in range(24)),
        )
    return out


def _day_range(sel: AnalysisSelection) -> list[date]:
    first = sel.start.date()
    last = sel.end.date()
    days = []
    cursor = first
    while cursor <= last:
        days.append(cursor)
        cursor += timedelta(days=1)
    return days


def _union_coverage_seconds(
    intervals: list[tuple[datetime, datetime]], lo: datetime, hi: datetime
) -> float:
    clipped = sorted(
        (max(s, lo), min(e, hi)) for s, e in intervals if max(s, lo) < min(e, hi)
    )
    total = 0.0
    cur_start: Optional[datetime] = None
    cur_end: Optional[datetime] = None
    for s, e in clipped:
        if cur_end is None or s > cur_end:
            if cur_end is not None:
                total += (cur_end - cur_start).total_seconds()
            cur_start, cur_end = s, e
        elif e > cur_end:
            cur_end = e
    if cur_end is not None:
        total += (cur_end - cur_start).total_seconds()
    return total


def daily_availability(
    dataset: IncidentDataset, service_id: str, sel: AnalysisSelection
) -> TimeSeriesBins:
    """Fraction of each UTC calendar day in the window not covered by the
    union of the service's incident intervals. Open incidents extend to the
    dataset's scraped_at; values are clamped to [0, 1]."""
    intervals = [
        (r.start, r.end if r.end is not None else dataset.scraped_at)
        for r in dataset.by_service(service_id)
    ]
    bins = []
    for day in _day_range(sel):
        lo = datetime(day.year, day.month, day.day, tzinfo=timezone.utc)
        hi = lo + timedelta(days=1)
        covered = _union_coverage_seconds(intervals, lo, hi)
        value = min(1.0, max(0.0, 1.0 - covered / 86400.0))
        bins.append((day.isoformat(), value))
    return TimeSeriesBins(bin_kind=BinKind.CALENDAR_DAY, bins=tuple(bins))


def daily_counts(dataset: IncidentDataset, sel: AnalysisSelection) -> TimeSeriesBins:
    """Incidents started per UTC calendar day within the selection."""
    subset = filter_selection(dataset, sel)
    days = _day_range(sel)
    counts = {d: 0.0 for d in days}
    for record in subset.records:
        d = record.start.date()
        if d in counts:
            counts[d] += 1.0
    return TimeSeriesBins(
        bin_kind=BinKind.CALENDAR_DAY,
        bins=tuple((d.isoformat(), counts[d]) for d in days),
    )


def autocorrelation(
    dataset: IncidentDataset, sel: AnalysisSelection, max_lag: int = 30
) -> list[tuple[int, float]]:
    """Sample autocorrelation of the daily incident-count series.

    r(k) = sum_t (x_t - xbar)(x_{t+k} - xbar) / sum_t (x_t - xbar)^2 for
    k = 0..max_lag (the biased estimator normalized by total variance).
    """
    if sel.span_days < max_lag + 2:
        raise ValueError(
            f"selection spans {sel.span_days:.1f} days; needs at least {max_lag + 2}"
        )
    series = [v for _, v in daily_counts(dataset, sel).bins]
    n = len(series)
    mean = sum(series) / n
    dev = [x - mean for x in series]
    denom = sum(d * d for d in dev)
    if denom == 0:
        raise DegenerateSeries("daily incident counts have zero variance")
    out = []
    for k in range(max_lag + 1):
        num = sum(dev[t] * dev[t + k] for t in range(n - k))
        out.append((k, num / denom))
    return out


# --------------------------------------------------------------------------
# Stage analysis
# --------------------------------------------------------------------------

TRANSITIONS = (
    (RecoveryStage.S1_INVESTIGATING, RecoveryStage.S2_IDENTIFIED),
    (RecoveryStage.S2_IDENTIFIED, RecoveryStage.S3_MONITORING),
    (RecoveryStage.S3_MONITORING, RecoveryStage.S4_RESOLVED),
)


def stage_durations(
    dataset: IncidentDataset, sel: AnalysisSelection
) -> tuple[dict[str, DurationSamples], list[str]]:
    """Durations of consecutive stage transitions (S1-S2, S2-S3, S3-S4).

    Negative spans from out-of-order reports are excluded; each exclusion is
    returned as a warning.
    """
    subset = filter_selection(dataset, sel)
    values: dict[str, list[int]] = {f"{a.short}->{b.short}": [] for a, b in TRANSITIONS}
    warnings: list[str] = []
    for record in subset.records:
        for a, b in TRANSITIONS:
            key = f"{a.short}->{b.short}"
            if a in record.stage_times and b in record.stage_times:
                span = int((record.stage_times[b] - record.stage_times[a]).total_seconds())
                if span < 0:
                    warnings.append(
                        f"{record.incident_id}: {key} spans {span}s; excluded"
                    )
                    continue
                values[key].append(span)
    out = {
        key: DurationSamples.from_values(GroupKey(GroupKind.TRANSITION, key), vals)
        for key, vals in values.items()
    }
    return out, warnings


def status_combinations(dataset: IncidentDataset, sel: AnalysisSelection) -> TimeSeriesBins:
    """Count incidents per set of distinct stages seen in their updates.

    Labels are canonical stage shorthands joined with '+', e.g. "S1+S4";
    incidents with no updates land in "(none)". Bins are ordered by count
    descending, label ascending.
    """
    subset = filter_selection(dataset, sel)
    counts: dict[str, float] = {}
    for record in subset.records:
        stages = sorted({u.stage for u in record.updates})
        label = "+".join(s.short for s in stages) if stages else "(none)"
        counts[label] = counts.get(label, 0.0) + 1.0
    ordered = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return TimeSeriesBins(bin_kind=BinKind.CATEGORY, bins=tuple(ordered))


# --------------------------------------------------------------------------
# Impact, counts, timelines, summary
# --------------------------------------------------------------------------


def impact_distribution(
    dataset: IncidentDataset, sel: AnalysisSelection
) -> dict[str, TimeSeriesBins]:
    """Per provider: incident counts over severity scores 1..5."""
    subset = filter_selection(dataset, sel)
    providers = sorted({r.provider for r in subset.records})
    out: dict[str, TimeSeriesBins] = {}
    for pid in providers:
        counts = {s: 0.0 for s in range(1, 6)}
        for record in subset.records:
            if record.provider == pid:
                counts[record.severity_score] += 1.0
        out[pid] = TimeSeriesBins(
            bin_kind=BinKind.CATEGORY,
            bins=tuple((str(s), counts[s]) for s in range(1, 6)),
        )
    return out


def impact_severity_stats(
    dataset: IncidentDataset, sel: AnalysisSelection
) -> dict[str, tuple[float, float]]:
    """Per provider (mean severity, median severity) over the selection."""
    subset = filter_selection(dataset, sel)
    out: dict[str, tuple[float, float]] = {}
    for pid in sorted({r.provider for r in subset.records}):
        scores = [r.severity_score for r in subset.records if r.provider == pid]
        out[pid] = (statistics.fmean(scores), float(statistics.median(scores)))
    return out


def incident_counts(dataset: IncidentDataset, sel: AnalysisSelection) -> dict[str, int]:
    """Incidents per selected service within the selection."""
    subset = filter_selection(dataset, sel)
    return {
        sid: sum(1 for r in subset.records if sid in r.services)
        for sid in sorted(sel.services)
    }


def timeline_intervals(
    dataset: IncidentDataset, sel: AnalysisSelection
) -> dict[str, list[tuple[datetime, datetime]]]:
    """Per selected service: (start, end) spans sorted by start.

    Open incidents close at scraped_at. Overlapping intervals are kept as-is
    (no merging) so the timeline shows each report."""
    subset = filter_selection(dataset, sel)
    out: dict[str, list[tuple[datetime, datetime]]] = {}
    for sid in sorted(sel.services):
        spans = [
            (r.start, r.end if r.end is not None else dataset.scraped_at)
            for r in subset.records
            if sid in r.services
        ]
        out[sid] = sorted(spans)
    return out


@dataclass(frozen=True)
class ProviderSummary:
    provider: str
    first: datetime
    last: datetime
    reports: int
    maintenance_reports: int


def dataset_summary(dataset: IncidentDataset) -> list[ProviderSummary]:
    """Per provider: first and last incident start plus report counts.

    Counts include maintenance entries; the maintenance subtotal is reported
    separately so either convention can be read off.
    """
    out = []
    for pid in sorted({r.provider for r in dataset.records}):
        records = dataset.by_provider(pid)
        starts = [r.start for r in records]
        out.append(
            ProviderSummary(
                provider=pid,
                first=min(starts),
                last=max(starts),
                reports=len(records),
                maintenance_reports=sum(
                    1 for r in records if r.impact.token == "maintenance"
                ),
            )
        )
    return out
