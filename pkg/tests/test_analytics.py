from __future__ import annotations

import pytest

from fails import analytics
from fails.analytics import (
    DegenerateSeries,
    DurationSamples,
    EmptySamples,
    GroupKey,
    GroupKind,
    UnknownGroup,
    provider_group,
    service_group,
)
from fails.model import (
    AnalysisSelection,
    ImpactLevel,
    IncidentDataset,
    IncidentRecord,
    RecoveryStage,
    parse_ts,
)

S1 = RecoveryStage.S1_INVESTIGATING
S2 = RecoveryStage.S2_IDENTIFIED
S3 = RecoveryStage.S3_MONITORING
S4 = RecoveryStage.S4_RESOLVED


def _record(i, start, end=None, services=("openai/chatgpt",), provider="openai",
            stage_times=None, impact=ImpactLevel.MAJOR, updates=()):
    return IncidentRecord(
        incident_id=f"i{i}",
        provider=provider,
        services=frozenset(services),
        title=f"incident {i}",
        impact=impact,
        impact_color="#e67e22",
        start=parse_ts(start),
        end=parse_ts(end) if end else None,
        stage_times=stage_times or {},
        updates=updates,
    )


def _dataset(*records, scraped="2024-03-30T00:00:00Z"):
    return IncidentDataset(records=tuple(records), scraped_at=parse_ts(scraped))


def _sel(start="2024-03-01T00:00:00Z", end="2024-03-29T00:00:00Z",
         services=("openai/chatgpt", "openai/api", "anthropic/claude")):
    return AnalysisSelection(
        start=parse_ts(start), end=parse_ts(end), services=frozenset(services))


def _samples(values):
    return DurationSamples.from_values(GroupKey(GroupKind.SERVICE, "openai/chatgpt"), values)


# ---- MTBF -----------------------------------------------------------------


def test_mtbf_worked_example(registry):
    # starts at t=0h, 10h, 30h -> gaps of 10h and 20h, mean 15h
    ds = _dataset(
        _record(1, "2024-03-01T00:00:00Z"),
        _record(2, "2024-03-01T10:00:00Z"),
        _record(3, "2024-03-02T06:00:00Z"),
    )
    out = analytics.mtbf_samples(ds, provider_group("openai"), registry)
    assert out.samples == (36000, 72000)
    assert out.mean == 54000.0  # 15 hours
    assert out.count == 2


def test_mtbf_single_incident(registry):
    ds = _dataset(_record(1, "2024-03-01T00:00:00Z"))
    out = analytics.mtbf_samples(ds, provider_group("openai"), registry)
    assert out.samples == () and out.count == 0


def test_mtbf_tied_starts(registry):
    ds = _dataset(
        _record(1, "2024-03-01T00:00:00Z"),
        _record(2, "2024-03-01T00:00:00Z"),
    )
    out = analytics.mtbf_samples(ds, provider_group("openai"), registry)
    assert out.samples == (0,)


def test_mtbf_unknown_group(registry):
    ds = _dataset(_record(1, "2024-03-01T00:00:00Z"))
    with pytest.raises(UnknownGroup):
        analytics.mtbf_samples(ds, provider_group("nope"), registry)


# ---- MTTR -----------------------------------------------------------------


def test_mttr_worked_example(registry):
    ds = _dataset(
        _record(1, "2024-03-01T00:00:00Z", end="2024-03-01T03:00:00Z",
                stage_times={S1: parse_ts("2024-03-01T00:00:00Z"),
                             S4: parse_ts("2024-03-01T02:30:00Z")}),
    )
    out = analytics.mttr_samples(ds, provider_group("openai"), registry)
    assert out.samples == (9000,)


def test_mttr_zero_span(registry):
    at = parse_ts("2024-03-01T00:00:00Z")
    ds = _dataset(_record(1, "2024-03-01T00:00:00Z", stage_times={S1: at, S4: at}))
    out = analytics.mttr_samples(ds, provider_group("openai"), registry)
    assert out.samples == (0,)


def test_mttr_open_incident_skipped(registry):
    ds = _dataset(_record(1, "2024-03-01T00:00:00Z"))  # no S4, no end
    out = analytics.mttr_samples(ds, provider_group("openai"), registry)
    assert out.count == 0 and out.skipped == 1


def test_mttr_fallbacks(registry):
    # missing S1 -> start; missing S4 -> end
    ds = _dataset(
        _record(1, "2024-03-01T00:00:00Z", end="2024-03-01T01:00:00Z"),
        _record(2, "2024-03-02T00:00:00Z",
                stage_times={S4: parse_ts("2024-03-02T02:00:00Z")}),
    )
    out = analytics.mttr_samples(ds, provider_group("openai"), registry)
    assert sorted(out.samples) == [3600, 7200]


# ---- ECDF / boxplot ---------------------------------------------------------


def test_ecdf_worked_example():
    series = analytics.ecdf(_samples([1, 2, 3]))
    assert series.points == ((1.0, 1 / 3), (2.0, 2 / 3), (3.0, 1.0))


def test_ecdf_single_sample():
    assert analytics.ecdf(_samples([5])).points == ((5.0, 1.0),)


def test_ecdf_tie_collapsing():
    assert analytics.ecdf(_samples([2, 2, 4])).points == ((2.0, 2 / 3), (4.0, 1.0))


def test_ecdf_empty_raises():
    with pytest.raises(EmptySamples):
        analytics.ecdf(_samples([]))


def test_boxplot_worked_example():
    stats = analytics.boxplot(_samples([1, 2, 3, 4, 5]))
    assert (stats.q1, stats.median, stats.q3) == (2.0, 3.0, 4.0)
    assert stats.outliers == ()


def test_boxplot_single_value():
    stats = analytics.boxplot(_samples([7]))
    assert stats.min == stats.q1 == stats.median == stats.q3 == stats.max == 7.0


def test_boxplot_outlier_flagged():
    stats = analytics.boxplot(_samples([1, 1, 1, 100]))
    assert 100.0 in stats.outliers
    assert stats.whisker_high < 100.0


# ---- co-occurrence ----------------------------------------------------------


def test_cooccurrence_matrix_single_incident():
    ds = _dataset(_record(1, "2024-03-01T00:00:00Z",
                          services=("openai/chatgpt", "openai/api")))
    m = analytics.cooccurrence_matrix(ds, ["openai/chatgpt", "openai/api"])
    assert m.cells == ((1.0, 1.0), (1.0, 1.0))


def test_cooccurrence_matrix_disjoint():
    ds = _dataset(
        _record(1, "2024-03-01T00:00:00Z", services=("openai/chatgpt",)),
        _record(2, "2024-03-02T00:00:00Z", services=("openai/api",)),
    )
    m = analytics.cooccurrence_matrix(ds, ["openai/chatgpt", "openai/api"])
    assert m.cell(0, 1) == 0.0 and m.cell(1, 0) == 0.0
    assert m.cell(0, 0) == 1.0 and m.cell(1, 1) == 1.0


def test_cooccurrence_probability_certainty():
    ds = _dataset(
        _record(1, "2024-03-01T00:00:00Z", services=("openai/chatgpt", "openai/api")),
        _record(2, "2024-03-02T00:00:00Z", services=("openai/chatgpt", "openai/api")),
    )
    m = analytics.cooccurrence_probability(ds, ["openai/chatgpt", "openai/api"])
    assert m.cell(0, 1) == 1.0


def test_cooccurrence_probability_zero_marginal():
    ds = _dataset(_record(1, "2024-03-01T00:00:00Z", services=("openai/chatgpt",)))
    m = analytics.cooccurrence_probability(ds, ["openai/chatgpt", "openai/api"])
    assert m.cells[1] == (0.0, 0.0)


def test_cooccurrence_histogram(registry):
    ds = _dataset(
        _record(1, "2024-03-01T00:00:00Z", provider="anthropic",
                services=("anthropic/claude", "anthropic/api", "anthropic/console")),
    )
    bins = analytics.cooccurrence_histogram(ds, registry.provider("anthropic"), registry)
    assert dict(bins.bins) == {"1": 0.0, "2": 0.0, "3": 1.0}


def test_cooccurrence_histogram_empty(registry):
    bins = analytics.cooccurrence_histogram(_dataset(), registry.provider("anthropic"), registry)
    assert all(v == 0 for _, v in bins.bins)


# ---- weekly / hourly --------------------------------------------------------


def test_weekly_monday_counts():
    # 2024-03-04 is a Monday
    ds = _dataset(*[_record(i, "2024-03-04T10:00:00Z") for i in range(3)])
    out = analytics.weekly_overview(ds, _sel())
    assert out["openai/chatgpt"].bins[0] == ("Monday", 3.0)


def test_hourly_boundary():
    ds = _dataset(_record(1, "2024-03-01T23:59:00Z"))
    out = analytics.hourly_overview(ds, _sel())
    assert out["openai/chatgpt"].bins[23] == ("23", 1.0)


def test_weekly_multi_service_attribution():
    ds = _dataset(_record(1, "2024-03-04T10:00:00Z",
                          services=("openai/chatgpt", "openai/api")))
    out = analytics.weekly_overview(ds, _sel())
    assert out["openai/chatgpt"].total == 1.0
    assert out["openai/api"].total == 1.0


# ---- availability -----------------------------------------------------------


def test_availability_idle_day():
    ds = _dataset(_record(1, "2024-03-20T00:00:00Z", end="2024-03-20T01:00:00Z"))
    sel = _sel(start="2024-03-01T00:00:00Z", end="2024-03-02T00:00:00Z")
    bins = analytics.daily_availability(ds, "openai/chatgpt", sel)
    assert bins.bins[0] == ("2024-03-01", 1.0)


def test_availability_six_hour_incident():
    ds = _dataset(_record(1, "2024-03-01T06:00:00Z", end="2024-03-01T12:00:00Z"))
    sel = _sel(start="2024-03-01T00:00:00Z", end="2024-03-02T00:00:00Z")
    bins = analytics.daily_availability(ds, "openai/chatgpt", sel)
    assert bins.bins[0] == ("2024-03-01", 0.75)


def test_availability_overlap_unions():
    ds = _dataset(
        _record(1, "2024-03-01T06:00:00Z", end="2024-03-01T12:00:00Z"),
        _record(2, "2024-03-01T06:00:00Z", end="2024-03-01T12:00:00Z"),
    )
    sel = _sel(start="2024-03-01T00:00:00Z", end="2024-03-02T00:00:00Z")
    bins = analytics.daily_availability(ds, "openai/chatgpt", sel)
    assert bins.bins[0][1] == 0.75  # union, not sum


def test_availability_open_incident_extends_to_scrape():
    ds = _dataset(_record(1, "2024-03-01T00:00:00Z"), scraped="2024-03-03T00:00:00Z")
    sel = _sel(start="2024-03-01T00:00:00Z", end="2024-03-04T00:00:00Z")
    bins = analytics.daily_availability(ds, "openai/chatgpt", sel)
    values = dict(bins.bins)
    assert values["2024-03-01"] == 0.0
    assert values["2024-03-02"] == 0.0
    assert values["2024-03-03"] == 1.0


# ---- autocorrelation --------------------------------------------------------


def test_acf_lag_zero_is_one():
    records = [
        _record(i, f"2024-03-{d:02d}T00:00:00Z")
        for i, d in enumerate([1, 1, 2, 5, 8, 9, 9, 9, 12, 15], start=1)
    ]
    out = analytics.autocorrelation(_dataset(*records), _sel(), max_lag=5)
    assert out[0] == (0, 1.0)
    assert all(abs(v) <= 1.0 + 1e-12 for _, v in out)


def test_acf_degenerate_series():
    with pytest.raises(DegenerateSeries):
        analytics.autocorrelation(_dataset(), _sel(), max_lag=3)


def test_acf_weekly_period_beats_offbeat():
    # one incident every 7 days -> r(7) well above r(3)
    records = [
        _record(i, f"2024-03-{d:02d}T00:00:00Z")
        for i, d in enumerate([1, 8, 15, 22], start=1)
    ]
    out = dict(analytics.autocorrelation(_dataset(*records), _sel(), max_lag=10))
    assert out[7] > out[3]


def test_acf_requires_wide_enough_window():
    with pytest.raises(ValueError):
        analytics.autocorrelation(
            _dataset(_record(1, "2024-03-02T00:00:00Z")),
            _sel(start="2024-03-01T00:00:00Z", end="2024-03-05T00:00:00Z"),
            max_lag=30,
        )


# ---- stage durations --------------------------------------------------------


def test_stage_durations_worked_example():
    t = lambda m: parse_ts(f"2024-03-01T{m // 60:02d}:{m % 60:02d}:00Z")
    ds = _dataset(
        _record(1, "2024-03-01T00:00:00Z", end="2024-03-01T01:00:00Z",
                stage_times={S1: t(0), S2: t(10), S3: t(40), S4: t(60)}),
    )
    out, warnings = analytics.stage_durations(ds, _sel())
    assert out["S1->S2"].samples == (600,)
    assert out["S2->S3"].samples == (1800,)
    assert out["S3->S4"].samples == (1200,)
    assert warnings == []


def test_stage_durations_requires_both_endpoints():
    ds = _dataset(
        _record(1, "2024-03-01T00:00:00Z",
                stage_times={S1: parse_ts("2024-03-01T00:00:00Z"),
                             S4: parse_ts("2024-03-01T01:00:00Z")}),
    )
    out, _ = analytics.stage_durations(ds, _sel())
    assert all(s.count == 0 for s in out.values())


def test_stage_durations_excludes_negative():
    ds = _dataset(
        _record(1, "2024-03-01T00:00:00Z",
                stage_times={S1: parse_ts("2024-03-01T01:00:00Z"),
                             S2: parse_ts("2024-03-01T00:30:00Z")}),
    )
    out, warnings = analytics.stage_durations(ds, _sel())
    assert out["S1->S2"].count == 0
    assert warnings and "S1->S2" in warnings[0]


# ---- status combinations ----------------------------------------------------


def _upd(stage, at):
    from fails.model import IncidentUpdate

    return IncidentUpdate(stage=stage, at=parse_ts(at), body="")


def test_status_combinations_labels():
    ds = _dataset(
        _record(1, "2024-03-01T00:00:00Z",
                updates=(_upd(S1, "2024-03-01T00:00:00Z"), _upd(S4, "2024-03-01T01:00:00Z"))),
        _record(2, "2024-03-02T00:00:00Z"),
    )
    bins = dict(analytics.status_combinations(ds, _sel()).bins)
    assert bins["S1+S4"] == 1.0
    assert bins["(none)"] == 1.0


def test_status_combinations_full_lifecycle():
    from fails.model import RecoveryStage as RS

    updates = tuple(
        _upd(stage, f"2024-03-01T0{i}:00:00Z") for i, stage in enumerate(RS)
    )
    ds = _dataset(_record(1, "2024-03-01T00:00:00Z", updates=updates))
    bins = dict(analytics.status_combinations(ds, _sel()).bins)
    assert "S1+S2+S3+S4+S5" in bins


# ---- impact / counts / summary ------------------------------------------------


def test_impact_distribution_counts():
    ds = _dataset(
        _record(1, "2024-03-01T00:00:00Z", impact=ImpactLevel.CRITICAL),
        _record(2, "2024-03-02T00:00:00Z", impact=ImpactLevel.CRITICAL),
    )
    bins = analytics.impact_distribution(ds, _sel())["openai"]
    assert dict(bins.bins)["5"] == 2.0


def test_impact_distribution_empty():
    assert analytics.impact_distribution(_dataset(), _sel()) == {}


def test_incident_counts_and_timelines():
    ds = _dataset(
        _record(1, "2024-03-01T00:00:00Z", end="2024-03-01T02:00:00Z",
                services=("openai/chatgpt", "openai/api")),
    )
    counts = analytics.incident_counts(ds, _sel())
    assert counts["openai/chatgpt"] == 1 and counts["openai/api"] == 1
    spans = analytics.timeline_intervals(ds, _sel())
    assert len(spans["openai/chatgpt"]) == 1
    assert len(spans["openai/api"]) == 1


def test_timeline_preserves_overlaps():
    ds = _dataset(
        _record(1, "2024-03-01T00:00:00Z", end="2024-03-01T06:00:00Z"),
        _record(2, "2024-03-01T03:00:00Z", end="2024-03-01T09:00:00Z"),
    )
    spans = analytics.timeline_intervals(ds, _sel())
    assert len(spans["openai/chatgpt"]) == 2


def test_dataset_summary_counts():
    ds = _dataset(
        _record(1, "2024-03-01T00:00:00Z"),
        _record(2, "2024-03-05T00:00:00Z"),
        _record(3, "2024-03-03T00:00:00Z", provider="anthropic",
                services=("anthropic/claude",)),
    )
    rows = {s.provider: s for s in analytics.dataset_summary(ds)}
    assert rows["openai"].reports == 2
    assert rows["openai"].first == parse_ts("2024-03-01T00:00:00Z")
    assert rows["openai"].last == parse_ts("2024-03-05T00:00:00Z")
    assert rows["anthropic"].reports == 1


def test_dataset_summary_empty():
    assert analytics.dataset_summary(_dataset()) == []


def test_dataset_summary_maintenance_subtotal():
    ds = _dataset(
        _record(1, "2024-03-01T00:00:00Z", impact=ImpactLevel.MAINTENANCE),
        _record(2, "2024-03-02T00:00:00Z"),
    )
    rows = analytics.dataset_summary(ds)
    assert rows[0].reports == 2 and rows[0].maintenance_reports == 1


def test_duration_samples_mean_median_consistency():
    import statistics

    s = _samples([5, 1, 9, 3])
    assert s.mean == statistics.fmean(s.samples)
    assert s.median == statistics.median(s.samples)
    assert s.count == len(s.samples)


def test_service_group_lookup(registry):
    ds = _dataset(
        _record(1, "2024-03-01T00:00:00Z", services=("openai/chatgpt", "openai/api")),
        _record(2, "2024-03-02T00:00:00Z", services=("openai/api",)),
    )
    out = analytics.mtbf_samples(ds, service_group("openai/api"), registry)
    assert out.count == 1
