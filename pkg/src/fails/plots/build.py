"""Build renderer-independent plot specs by invoking the analytics layer."""

from __future__ import annotations

from typing import Callable, Optional

from fails import analytics
from fails.analytics import (
    DegenerateSeries,
    DurationSamples,
    EmptySamples,
    GroupKey,
    provider_group,
    service_group,
)
from fails.model import (
    AnalysisSelection,
    IncidentDataset,
    Registry,
    builtin_registry,
    filter_selection,
)
from fails.plots.kinds import (
    PLOT_TITLES,
    InsufficientData,
    PlotKind,
    PlotSeries,
    PlotSpec,
    SeriesStyle,
)

HOUR = 3600.0
DAY = 86400.0

DEFAULT_MAX_LAG = 30


def _selected_services(sel: AnalysisSelection, registry: Registry) -> list[str]:
    """Selected service ids in registry order (stable plot ordering)."""
    return [s.id for s in registry.services if s.id in sel.services]


def _selected_providers(sel: AnalysisSelection, registry: Registry) -> list[str]:
    providers = []
    for p in registry.providers:
        if any(s.provider == p.id for s in registry.services if s.id in sel.services):
            providers.append(p.id)
    return providers


def _duration_groups(
    dataset: IncidentDataset,
    sel: AnalysisSelection,
    registry: Registry,
    by_provider: bool,
    sampler: Callable[..., DurationSamples],
) -> list[DurationSamples]:
    subset = filter_selection(dataset, sel)
    if by_provider:
        groups = [provider_group(p) for p in _selected_providers(sel, registry)]
    else:
        groups = [service_group(s) for s in _selected_services(sel, registry)]
    out = []
    for group in groups:
        samples = sampler(subset, group, registry)
        if samples.count > 0:
            out.append(samples)
    return out


def _ecdf_series(samples: DurationSamples, unit: float) -> PlotSeries:
    series = analytics.ecdf(samples)
    return PlotSeries(
        name=samples.group.id,
        style=SeriesStyle.STEP,
        x=tuple(x / unit for x, _ in series.points),
        y=tuple(p for _, p in series.points),
    )


def _box_series(samples: DurationSamples, unit: float) -> PlotSeries:
    stats = analytics.boxplot(samples)
    return PlotSeries(
        name=samples.group.id,
        style=SeriesStyle.BOX,
        box={
            "min": stats.min / unit,
            "q1": stats.q1 / unit,
            "median": stats.median / unit,
            "q3": stats.q3 / unit,
            "max": stats.max / unit,
            "whisker_low": stats.whisker_low / unit,
            "whisker_high": stats.whisker_high / unit,
            "outliers": [v / unit for v in stats.outliers],
        },
    )


def _duration_stats(prefix: str, unit: str, groups: list[DurationSamples], divisor: float) -> dict:
    stats: dict[str, float] = {}
    for g in groups:
        stats[f"{prefix}_mean_{unit}[{g.group.id}]"] = round(g.mean / divisor, 4)
        stats[f"{prefix}_median_{unit}[{g.group.id}]"] = round(g.median / divisor, 4)
        stats[f"{prefix}_count[{g.group.id}]"] = float(g.count)
    return stats


def build_plot_spec(
    kind: PlotKind,
    dataset: IncidentDataset,
    sel: AnalysisSelection,
    registry: Optional[Registry] = None,
) -> PlotSpec:
    """Compute the series and statistics for one plot kind.

    Pure: equal inputs give equal specs. Raises InsufficientData, naming the
    kind, when the selection yields nothing for it to show.
    """
    registry = registry or builtin_registry()
    subset = filter_selection(dataset, sel)
    if not subset.records:
        raise InsufficientData(kind, "selection matches no incidents")

    stats: dict[str, float] = {"n_incidents": float(len(subset.records))}
    title = PLOT_TITLES[kind]
    builder = _BUILDERS[kind]
    x_label, y_label, series, extra_stats = builder(dataset, subset, sel, registry)
    if not series:
        raise InsufficientData(kind, "no series had samples in this selection")
    stats.update(extra_stats)
    return PlotSpec(
        kind=kind,
        title=title,
        x_label=x_label,
        y_label=y_label,
        series=tuple(series),
        selection=sel,
        stats_sidecar=stats,
    )


# Builders return (x_label, y_label, series list, extra stats).


def _build_weekly(dataset, subset, sel, registry):
    per_service = analytics.weekly_overview(dataset, sel)
    series = [
        PlotSeries(name=sid, style=SeriesStyle.BAR,
                   labels=tuple(bins.labels), values=tuple(bins.values))
        for sid, bins in per_service.items()
        if bins.total > 0
    ]
    pairs = sum(bins.total for bins in per_service.values())
    return "Day of week", "Incidents", series, {"attribution_pairs": pairs}


def _build_hourly(dataset, subset, sel, registry):
    per_service = analytics.hourly_overview(dataset, sel)
    series = [
        PlotSeries(name=sid, style=SeriesStyle.BAR,
                   labels=tuple(bins.labels), values=tuple(bins.values))
        for sid, bins in per_service.items()
        if bins.total > 0
    ]
    pairs = sum(bins.total for bins in per_service.values())
    return "Hour of day (UTC)", "Incidents", series, {"attribution_pairs": pairs}


def _build_mttr_ecdf(by_provider):
    def build(dataset, subset, sel, registry):
        groups = _duration_groups(dataset, sel, registry, by_provider, analytics.mttr_samples)
        series = [_ecdf_series(g, HOUR) for g in groups]
        return (
            "Recovery time (hours)",
            "P(X ≤ x)",
            series,
            _duration_stats("mttr", "hours", groups, HOUR),
        )

    return build


def _build_mtbf_ecdf(by_provider):
    def build(dataset, subset, sel, registry):
        groups = _duration_groups(dataset, sel, registry, by_provider, analytics.mtbf_samples)
        series = [_ecdf_series(g, DAY) for g in groups]
        return (
            "Time between failures (days)",
            "P(X ≤ x)",
            series,
            _duration_stats("mtbf", "days", groups, DAY),
        )

    return build


def _build_mttr_box(dataset, subset, sel, registry):
    groups = _duration_groups(dataset, sel, registry, False, analytics.mttr_samples)
    series = [_box_series(g, HOUR) for g in groups]
    return "Service", "Recovery time (hours)", series, _duration_stats("mttr", "hours", groups, HOUR)


def _build_mtbf_box(dataset, subset, sel, registry):
    groups = _duration_groups(dataset, sel, registry, False, analytics.mtbf_samples)
    series = [_box_series(g, DAY) for g in groups]
    return "Service", "Time between failures (days)", series, _duration_stats("mtbf", "days", groups, DAY)


def _build_resolution(dataset, subset, sel, registry):
    per_transition, _warnings = analytics.stage_durations(dataset, sel)
    series = []
    stats = {}
    for key, samples in per_transition.items():
        if samples.count == 0:
            continue
        series.append(_box_series(samples, HOUR))
        stats[f"stage_mean_hours[{key}]"] = round(samples.mean / HOUR, 4)
        stats[f"stage_count[{key}]"] = float(samples.count)
    return "Transition", "Duration (hours)", series, stats


def _build_combinations(dataset, subset, sel, registry):
    bins = analytics.status_combinations(dataset, sel)
    series = [
        PlotSeries(name="combinations", style=SeriesStyle.BAR,
                   labels=tuple(bins.labels), values=tuple(bins.values))
    ]
    return "Status combination", "Incidents", series, {"n_combinations": float(len(bins.bins))}


def _build_availability(dataset, subset, sel, registry):
    series = []
    stats = {}
    present = sorted({sid for r in subset.records for sid in r.services if sid in sel.services})
    for sid in present:
        bins = analytics.daily_availability(dataset, sid, sel)
        values = bins.values
        series.append(
            PlotSeries(name=sid, style=SeriesStyle.LINE,
                       x=tuple(range(len(values))), y=tuple(values),
                       labels=tuple(bins.labels))
        )
        stats[f"availability_mean[{sid}]"] = round(sum(values) / len(values), 6)
    return "Day", "Availability", series, stats


def _build_matrix(probability: bool):
    def build(dataset, subset, sel, registry):
        services = _selected_services(sel, registry)
        if probability:
            matrix = analytics.cooccurrence_probability(subset, services)
        else:
            matrix = analytics.cooccurrence_matrix(subset, services)
        series = [
            PlotSeries(name="cooccurrence", style=SeriesStyle.MATRIX,
                       labels=matrix.labels, matrix=matrix.cells)
        ]
        return "Service", "Service", series, {"n_services": float(len(services))}

    return build


def _build_service_incidents(dataset, subset, sel, registry):
    counts = analytics.incident_counts(dataset, sel)
    ordered = [(sid, counts[sid]) for sid in _selected_services(sel, registry)]
    series = [
        PlotSeries(name="incidents", style=SeriesStyle.BAR,
                   labels=tuple(sid for sid, _ in ordered),
                   values=tuple(float(c) for _, c in ordered))
    ]
    return "Service", "Incidents", series, {}


def _build_timeline(dataset, subset, sel, registry):
    from fails.model import format_ts

    spans = analytics.timeline_intervals(dataset, sel)
    series = []
    for sid in _selected_services(sel, registry):
        if not spans.get(sid):
            continue
        series.append(
            PlotSeries(
                name=sid,
                style=SeriesStyle.INTERVAL,
                intervals=tuple((format_ts(a), format_ts(b)) for a, b in spans[sid]),
            )
        )
    return "Time", "Service", series, {}


def _build_autocorrelation(dataset, subset, sel, registry):
    max_lag = min(DEFAULT_MAX_LAG, int(sel.span_days) - 2)
    if max_lag < 1:
        raise InsufficientData(PlotKind.AUTOCORRELATIONS, "selection window too short")
    try:
        acf = analytics.autocorrelation(dataset, sel, max_lag=max_lag)
    except DegenerateSeries as exc:
        raise InsufficientData(PlotKind.AUTOCORRELATIONS, str(exc)) from exc
    series = [
        PlotSeries(name="acf", style=SeriesStyle.LINE,
                   x=tuple(float(k) for k, _ in acf),
                   y=tuple(v for _, v in acf))
    ]
    stats = {"max_lag": float(max_lag), "r1": round(acf[1][1], 6) if len(acf) > 1 else 0.0}
    return "Lag (days)", "Autocorrelation", series, stats


def _build_impact(dataset, subset, sel, registry):
    per_provider = analytics.impact_distribution(dataset, sel)
    severity = analytics.impact_severity_stats(dataset, sel)
    series = []
    stats = {}
    for pid, bins in per_provider.items():
        series.append(
            PlotSeries(name=pid, style=SeriesStyle.BAR,
                       labels=tuple(bins.labels), values=tuple(bins.values))
        )
        mean, median = severity[pid]
        stats[f"severity_mean[{pid}]"] = round(mean, 4)
        stats[f"severity_median[{pid}]"] = median
    return "Severity score", "Incidents", series, stats


_BUILDERS: dict[PlotKind, Callable] = {
    PlotKind.WEEKLY_OVERVIEW: _build_weekly,
    PlotKind.HOURLY_OVERVIEW: _build_hourly,
    PlotKind.MTTR_DISTRIBUTION: _build_mttr_ecdf(by_provider=False),
    PlotKind.MTTR_BY_PROVIDER: _build_mttr_ecdf(by_provider=True),
    PlotKind.MTTR_BOXPLOT: _build_mttr_box,
    PlotKind.MTBF_DISTRIBUTION: _build_mtbf_ecdf(by_provider=False),
    PlotKind.MTBF_BY_PROVIDER: _build_mtbf_ecdf(by_provider=True),
    PlotKind.MTBF_BOXPLOT: _build_mtbf_box,
    PlotKind.RESOLUTION_ACTIVITIES: _build_resolution,
    PlotKind.STATUS_COMBINATIONS: _build_combinations,
    PlotKind.DAILY_AVAILABILITY: _build_availability,
    PlotKind.SERVICE_COOCCURRENCE: _build_matrix(probability=False),
    PlotKind.COOCCURRENCE_PROBABILITY: _build_matrix(probability=True),
    PlotKind.SERVICE_INCIDENTS: _build_service_incidents,
    PlotKind.INCIDENT_OUTAGE_TIMELINE: _build_timeline,
    PlotKind.AUTOCORRELATIONS: _build_autocorrelation,
    PlotKind.INCIDENT_IMPACT_DISTRIBUTION: _build_impact,
}

assert set(_BUILDERS) == set(PlotKind), "every plot kind needs exactly one builder"
