from __future__ import annotations

import random

import pytest

from fails.model import (
    AnalysisSelection,
    ImpactLevel,
    IncidentDataset,
    IncidentRecord,
    RecoveryStage,
    builtin_registry,
    filter_selection,
    format_ts,
    parse_ts,
    validate_incident,
)

from .gen import analysis_window, random_dataset, random_record


def test_builtin_registry_counts(registry):
    assert len(registry.providers) == 4
    assert len(registry.services) == 11


def test_builtin_registry_ids(registry):
    assert {p.id for p in registry.providers} == {
        "openai", "anthropic", "characterai", "stabilityai",
    }
    assert {s.id for s in registry.services} == {
        "openai/chatgpt", "openai/api", "openai/dalle", "openai/playground",
        "anthropic/claude", "anthropic/api", "anthropic/console",
        "characterai/characterai",
        "stabilityai/rest-api", "stabilityai/grpc-api", "stabilityai/stable-assistant",
    }


def test_service_provider_links(registry):
    assert registry.service("openai/dalle").provider == "openai"
    for service in registry.services:
        assert registry.has_provider(service.provider)


def test_page_formats(registry):
    assert registry.provider("stabilityai").page_format.value == "instatus"
    for pid in ("openai", "anthropic", "characterai"):
        assert registry.provider(pid).page_format.value == "statuspage"


def test_registry_rejects_duplicate_ids(registry):
    with pytest.raises(ValueError):
        registry.add_provider(registry.provider("openai"))


def test_impact_ordering():
    order = [ImpactLevel.MAINTENANCE, ImpactLevel.NONE, ImpactLevel.MINOR,
             ImpactLevel.MAJOR, ImpactLevel.CRITICAL]
    assert order == sorted(order)
    assert [lvl.severity_score for lvl in order] == [1, 2, 3, 4, 5]


def test_recovery_stage_ordering():
    stages = list(RecoveryStage)
    assert stages == sorted(stages)
    assert [s.short for s in stages] == ["S1", "S2", "S3", "S4", "S5"]


def test_timestamp_round_trip():
    text = "2025-01-10T13:03:25Z"
    assert format_ts(parse_ts(text)) == text


def _record(**overrides) -> IncidentRecord:
    base = dict(
        incident_id="x1",
        provider="openai",
        services=frozenset({"openai/chatgpt"}),
        title="t",
        impact=ImpactLevel.MAJOR,
        impact_color="#e67e22",
        start=parse_ts("2024-03-01T10:00:00Z"),
        end=parse_ts("2024-03-01T12:00:00Z"),
        stage_times={},
        updates=(),
        source_url=None,
    )
    base.update(overrides)
    return IncidentRecord(**base)


def test_validate_end_before_start():
    record = _record(end=parse_ts("2024-03-01T09:00:00Z"))
    issues = validate_incident(record)
    assert any(i.code == "END_BEFORE_START" and i.is_error for i in issues)


def test_validate_stage_order_is_warning():
    record = _record(stage_times={
        RecoveryStage.S1_INVESTIGATING: parse_ts("2024-03-01T10:30:00Z"),
        RecoveryStage.S2_IDENTIFIED: parse_ts("2024-03-01T10:00:00Z"),
    })
    issues = validate_incident(record)
    stage = [i for i in issues if i.code == "STAGE_ORDER"]
    assert stage and not stage[0].is_error


def test_validate_clean_record_is_empty():
    assert validate_incident(_record()) == []


def test_validate_flags_foreign_service():
    record = _record(services=frozenset({"anthropic/claude"}))
    issues = validate_incident(record)
    assert any(i.code == "SERVICE_PROVIDER_MISMATCH" and i.is_error for i in issues)


def test_validate_missing_end_is_warning():
    issues = validate_incident(_record(end=None))
    assert [i.code for i in issues] == ["MISSING_END"]
    assert not issues[0].is_error


def test_dataset_rejects_duplicate_ids():
    a = _record()
    with pytest.raises(ValueError, match="duplicate"):
        IncidentDataset(records=(a, a), scraped_at=parse_ts("2024-03-02T00:00:00Z"))


def test_dataset_sorts_by_start_then_id():
    late = _record(incident_id="b", start=parse_ts("2024-03-02T00:00:00Z"), end=None)
    early = _record(incident_id="a", end=None, start=parse_ts("2024-03-01T00:00:00Z"))
    ds = IncidentDataset(records=(late, early), scraped_at=parse_ts("2024-03-03T00:00:00Z"))
    assert [r.incident_id for r in ds.records] == ["a", "b"]


def test_selection_requires_ordered_window():
    with pytest.raises(ValueError):
        AnalysisSelection(
            start=parse_ts("2024-03-02T00:00:00Z"),
            end=parse_ts("2024-03-01T00:00:00Z"),
            services=frozenset({"openai/api"}),
        )


def test_filter_selection_examples(registry):
    records = tuple(
        _record(incident_id=f"r{i}", start=parse_ts(f"2024-03-0{i}T00:00:00Z"), end=None)
        for i in (1, 2, 3)
    )
    ds = IncidentDataset(records=records, scraped_at=parse_ts("2024-03-05T00:00:00Z"))
    everything = AnalysisSelection(
        start=parse_ts("2024-01-01T00:00:00Z"),
        end=parse_ts("2024-12-31T00:00:00Z"),
        services=frozenset(s.id for s in registry.services),
    )
    assert len(filter_selection(ds, everything)) == 3

    chatgpt_only = AnalysisSelection(
        start=everything.start, end=everything.end,
        services=frozenset({"openai/chatgpt"}),
    )
    claude = _record(incident_id="c", provider="anthropic",
                     services=frozenset({"anthropic/claude"}), end=None)
    mixed = IncidentDataset(records=records[:1] + (claude,),
                            scraped_at=parse_ts("2024-03-05T00:00:00Z"))
    assert [r.incident_id for r in filter_selection(mixed, chatgpt_only).records] == ["r1"]

    nothing = AnalysisSelection(
        start=parse_ts("2020-01-01T00:00:00Z"), end=parse_ts("2020-02-01T00:00:00Z"),
        services=everything.services,
    )
    assert len(filter_selection(ds, nothing)) == 0


def test_filter_selection_idempotent_and_subset(registry):
    rng = random.Random(7)
    sel = analysis_window(registry)
    for _ in range(25):
        ds = random_dataset(rng, registry)
        once = filter_selection(ds, sel)
        twice = filter_selection(once, sel)
        assert once.ids == twice.ids
        assert once.ids <= ds.ids


def test_record_serialization_round_trip(registry):
    rng = random.Random(11)
    for i in range(200):
        record = random_record(rng, registry, i)
        assert IncidentRecord.from_dict(record.to_dict()) == record
