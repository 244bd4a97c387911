from __future__ import annotations

import json
from pathlib import Path

import pytest

from fails.ingestion import (
    MalformedPage,
    PageSnapshot,
    ScrapeConfig,
    UnknownProvider,
    UnparseableTimestamp,
    content_hash_id,
    fetch_history,
    identify_services,
    normalize_timestamp,
    parse_instatus_history,
    parse_statuspage_history,
    run_pipeline,
    sniff_content_kind,
)
from fails.model import RecoveryStage, format_ts, utc_now

from .conftest import FIXTURE_DIR


# --------------------------------------------------------------------------
# normalize_timestamp
# --------------------------------------------------------------------------


@pytest.mark.parametrize(
    "raw,expected",
    [
        ("Mar 16, 2023 10:00 PST", "2023-03-16T18:00:00Z"),
        ("2025-01-10T13:03:25Z", "2025-01-10T13:03:25Z"),
        ("2024-03-02T08:15:00.000Z", "2024-03-02T08:15:00Z"),
        ("Apr 18, 2024 22:40 GMT", "2024-04-18T22:40:00Z"),
        ("Jul 4, 2024 12:00 PDT", "2024-07-04T19:00:00Z"),
        ("2024-06-01 09:30:00", "2024-06-01T09:30:00Z"),
        ("2024-01-05T10:00:00+01:00", "2024-01-05T09:00:00Z"),
    ],
)
def test_normalize_timestamp(raw, expected):
    assert format_ts(normalize_timestamp(raw)) == expected


def test_normalize_respects_assumed_zone():
    out = normalize_timestamp("Mar 16, 2023 10:00", assumed_zone="America/Los_Angeles")
    assert format_ts(out) == "2023-03-16T17:00:00Z"  # PDT on that date


def test_normalize_rejects_garbage():
    with pytest.raises(UnparseableTimestamp) as err:
        normalize_timestamp("garbage")
    assert "garbage" in str(err.value)


# --------------------------------------------------------------------------
# identify_services
# --------------------------------------------------------------------------


def test_identify_explicit_tag(registry):
    services, wide = identify_services(
        registry.provider("openai"), ["ChatGPT"], "", registry)
    assert services == {"openai/chatgpt"}
    assert not wide


def test_identify_keywords(registry):
    services, wide = identify_services(
        registry.provider("openai"), [], "Elevated errors on DALL·E and the API", registry)
    assert services == {"openai/dalle", "openai/api"}
    assert not wide


def test_identify_fallback_provider_wide(registry):
    services, wide = identify_services(
        registry.provider("anthropic"), [], "Something unrelated happened", registry)
    assert services == {"anthropic/claude", "anthropic/api", "anthropic/console"}
    assert wide


def test_identify_requires_word_boundaries(registry):
    services, wide = identify_services(
        registry.provider("openai"), [], "rapid responses observed", registry)
    assert wide  # "api" must not match inside "rapid"


def test_identify_output_within_provider(registry):
    for provider in registry.providers:
        services, _ = identify_services(provider, ["API"], "api console claude", registry)
        allowed = {s.id for s in registry.services_of(provider.id)}
        assert services <= allowed


# --------------------------------------------------------------------------
# fetch_history
# --------------------------------------------------------------------------


def test_fetch_fixture_pages_in_order(registry):
    config = ScrapeConfig(providers=frozenset({"anthropic"}), fixture_dir=FIXTURE_DIR)
    outcome = fetch_history(registry.provider("anthropic"), config)
    assert [s.url for s in outcome.snapshots] == [
        "fixture://anthropic/000.html",
        "fixture://anthropic/001.html",
    ]
    assert not outcome.errors


def test_fetch_fixture_page_limit(registry):
    config = ScrapeConfig(
        providers=frozenset({"anthropic"}), fixture_dir=FIXTURE_DIR, page_limit=1)
    outcome = fetch_history(registry.provider("anthropic"), config)
    assert len(outcome.snapshots) == 1


def test_fetch_retries_transient_failure(registry):
    calls = []
    sleeps = []

    def flaky(url, timeout):
        calls.append(url)
        if len(calls) < 3:
            raise ConnectionError("boom")
        return b'{"incidents": []}'

    config = ScrapeConfig(providers=frozenset({"openai"}), max_retries=3, retry_backoff=2.0)
    outcome = fetch_history(
        registry.provider("openai"), config, transport=flaky, sleep=sleeps.append)
    assert len(outcome.snapshots) == 1
    assert outcome.warnings and "3 attempts" in outcome.warnings[0]
    assert sleeps == [2.0, 4.0]  # doubling backoff


def test_fetch_honors_timeout_env(registry, monkeypatch):
    seen = {}

    def capture(url, timeout):
        seen["timeout"] = timeout
        return b'{"incidents": []}'

    config = ScrapeConfig(providers=frozenset({"openai"}))
    monkeypatch.setenv("FAILS_HTTP_TIMEOUT_SECS", "7")
    fetch_history(registry.provider("openai"), config, transport=capture)
    assert seen["timeout"] == 7.0

    monkeypatch.delenv("FAILS_HTTP_TIMEOUT_SECS")
    fetch_history(registry.provider("openai"), config, transport=capture)
    assert seen["timeout"] == 30.0


def test_fetch_exhausts_retries(registry):
    def always_down(url, timeout):
        raise ConnectionError("down")

    config = ScrapeConfig(providers=frozenset({"openai"}), max_retries=2, retry_backoff=0.0)
    outcome = fetch_history(
        registry.provider("openai"), config, transport=always_down, sleep=lambda s: None)
    assert outcome.snapshots == []
    assert outcome.errors and "all 3 attempts" in outcome.errors[0]


# --------------------------------------------------------------------------
# page parsers
# --------------------------------------------------------------------------


def _snapshot(provider: str, body: bytes) -> PageSnapshot:
    return PageSnapshot(
        provider=provider,
        url=f"test://{provider}",
        fetched_at=utc_now(),
        body=body,
        content_kind=sniff_content_kind(body),
    )


STATUSPAGE_PAGE = """<!DOCTYPE html>
<html><body>
<div class="months-container">
  <div class="month">
    <h4 class="month-title">May 2024</h4>
    <div class="incident-container" data-impact-color="#e67e22">
      <a class="incident-title impact-major" href="https://status.example.com/incidents/slug01">Elevated errors</a>
      <div class="components"><span class="component-tag">ChatGPT</span></div>
      <div class="updates">
        <div class="update">
          <span class="update-status">Investigating</span>
          <span class="update-body">Looking into it.</span>
          <span class="update-time">May 2, 2024 10:00 UTC</span>
        </div>
        <div class="update">
          <span class="update-status">Resolved</span>
          <span class="update-body">Fixed.</span>
          <span class="update-time">May 2, 2024 12:30 UTC</span>
        </div>
      </div>
    </div>
  </div>
</div>
</body></html>"""


def test_parse_statuspage_stage_times(registry):
    result = parse_statuspage_history(
        _snapshot("openai", STATUSPAGE_PAGE.encode()), registry.provider("openai"), registry)
    assert len(result.records) == 1
    record = result.records[0]
    assert record.incident_id == "slug01"
    assert record.services == {"openai/chatgpt"}
    assert format_ts(record.stage_times[RecoveryStage.S1_INVESTIGATING]) == "2024-05-02T10:00:00Z"
    assert format_ts(record.stage_times[RecoveryStage.S4_RESOLVED]) == "2024-05-02T12:30:00Z"
    assert format_ts(record.start) == "2024-05-02T10:00:00Z"
    assert format_ts(record.end) == "2024-05-02T12:30:00Z"


def test_parse_statuspage_empty_history(registry):
    page = '<html><body><div class="months-container"></div></body></html>'
    result = parse_statuspage_history(
        _snapshot("openai", page.encode()), registry.provider("openai"), registry)
    assert result.records == []
    assert result.warnings


def test_parse_statuspage_malformed_names_element(registry):
    with pytest.raises(MalformedPage, match="months-container"):
        parse_statuspage_history(
            _snapshot("openai", b"<html><body><p>nope</p></body></html>"),
            registry.provider("openai"), registry)


INSTATUS_PAGE = {
    "page": {"name": "Stability AI"},
    "incidents": [
        {
            "name": "REST API incident",
            "status": "RESOLVED",
            "impact": "MAJOROUTAGE",
            "color": "#d9534f",
            "started": "2024-05-01T08:00:00.000Z",
            "resolved": "2024-05-01T09:00:00.000Z",
            "components": ["REST API"],
            "updates": [
                {"status": "INVESTIGATING", "message": "x", "created": "2024-05-01T08:00:00.000Z"},
                {"status": "RESOLVED", "message": "y", "created": "2024-05-01T09:00:00.000Z"},
            ],
        }
    ],
}


def test_parse_instatus_basic(registry):
    body = json.dumps(INSTATUS_PAGE).encode()
    result = parse_instatus_history(
        _snapshot("stabilityai", body), registry.provider("stabilityai"), registry)
    assert len(result.records) == 1
    record = result.records[0]
    assert record.services == {"stabilityai/rest-api"}
    assert record.impact.token == "critical"
    assert record.incident_id == content_hash_id(
        "stabilityai", "REST API incident", "2024-05-01T08:00:00Z")


def test_parse_instatus_deterministic_ids(registry):
    body = json.dumps(INSTATUS_PAGE).encode()
    provider = registry.provider("stabilityai")
    first = parse_instatus_history(_snapshot("stabilityai", body), provider, registry)
    second = parse_instatus_history(_snapshot("stabilityai", body), provider, registry)
    assert [r.incident_id for r in first.records] == [r.incident_id for r in second.records]


def test_parse_instatus_unknown_impact_warns(registry):
    page = json.loads(json.dumps(INSTATUS_PAGE))
    page["incidents"][0]["impact"] = "WEIRDLEVEL"
    result = parse_instatus_history(
        _snapshot("stabilityai", json.dumps(page).encode()),
        registry.provider("stabilityai"), registry)
    assert result.records[0].impact.token == "none"
    assert any("WEIRDLEVEL" in w for w in result.warnings)


def test_parse_instatus_empty_history(registry):
    result = parse_instatus_history(
        _snapshot("stabilityai", b'{"incidents": []}'),
        registry.provider("stabilityai"), registry)
    assert result.records == []
    assert result.warnings


def test_parse_instatus_malformed(registry):
    with pytest.raises(MalformedPage, match="incidents"):
        parse_instatus_history(
            _snapshot("stabilityai", b'{"page": {}}'),
            registry.provider("stabilityai"), registry)


# --------------------------------------------------------------------------
# pipeline
# --------------------------------------------------------------------------


def _small_corpus(tmp_path: Path) -> Path:
    """Two providers: 3 statuspage incidents + 2 instatus incidents."""
    root = tmp_path / "fixtures"
    (root / "openai").mkdir(parents=True)
    (root / "stabilityai").mkdir(parents=True)

    incidents = []
    for i, (impact, color) in enumerate(
        [("major", "#e67e22"), ("minor", "#f1c40f"), ("critical", "#e74c3c")]
    ):
        incidents.append(f"""
    <div class="incident-container" data-impact-color="{color}">
      <a class="incident-title impact-{impact}" href="https://x/incidents/sp{i}">Incident {i} on ChatGPT</a>
      <div class="updates">
        <div class="update">
          <span class="update-status">Investigating</span>
          <span class="update-body">issue</span>
          <span class="update-time">May {i + 1}, 2024 10:00 UTC</span>
        </div>
        <div class="update">
          <span class="update-status">Resolved</span>
          <span class="update-body">done</span>
          <span class="update-time">May {i + 1}, 2024 11:00 UTC</span>
        </div>
      </div>
    </div>""")
    page = (
        '<html><body><div class="months-container"><div class="month">'
        '<h4 class="month-title">May 2024</h4>' + "".join(incidents)
        + "</div></div></body></html>"
    )
    (root / "openai" / "000.html").write_text(page)

    instatus = {
        "incidents": [
            {
                "name": f"Stability incident {i}",
                "status": "RESOLVED",
                "impact": "PARTIALOUTAGE",
                "color": "#f0ad4e",
                "started": f"2024-05-1{i}T08:00:00.000Z",
                "resolved": f"2024-05-1{i}T09:00:00.000Z",
                "components": ["REST API"],
                "updates": [],
            }
            for i in range(2)
        ]
    }
    (root / "stabilityai" / "000.json").write_text(json.dumps(instatus))
    return root


def test_pipeline_counts_per_provider(tmp_path):
    root = _small_corpus(tmp_path)
    config = ScrapeConfig(
        providers=frozenset({"openai", "stabilityai"}), fixture_dir=root)
    dataset, report = run_pipeline(config)
    assert len(dataset.records) == 5
    assert report.per_provider["openai"].incidents_parsed == 3
    assert report.per_provider["stabilityai"].incidents_parsed == 2


def test_pipeline_isolates_provider_failures(tmp_path):
    root = _small_corpus(tmp_path)
    (root / "openai" / "000.html").write_text("<html><body>broken</body></html>")
    config = ScrapeConfig(
        providers=frozenset({"openai", "stabilityai"}), fixture_dir=root)
    dataset, report = run_pipeline(config)
    assert {r.provider for r in dataset.records} == {"stabilityai"}
    assert report.per_provider["openai"].errors
    assert not report.per_provider["stabilityai"].errors


def test_pipeline_deterministic(tmp_path):
    from fails.store import serialize_dataset

    root = _small_corpus(tmp_path)
    config = ScrapeConfig(
        providers=frozenset({"openai", "stabilityai"}), fixture_dir=root)
    first, _ = run_pipeline(config)
    second, _ = run_pipeline(config)
    assert serialize_dataset(first) == serialize_dataset(second)


def test_pipeline_rejects_unknown_provider(tmp_path):
    config = ScrapeConfig(providers=frozenset({"nope"}), fixture_dir=tmp_path)
    with pytest.raises(UnknownProvider):
        run_pipeline(config)


def test_pipeline_records_pass_validation(corpus, registry):
    from fails.model import validate_incident

    dataset, _ = corpus
    for record in dataset.records:
        issues = validate_incident(record, registry)
        assert not [i for i in issues if i.is_error]


def test_pipeline_emits_utc_timestamps(corpus):
    dataset, _ = corpus
    for record in dataset.records:
        assert record.start.utcoffset().total_seconds() == 0
        if record.end:
            assert record.end.utcoffset().total_seconds() == 0
