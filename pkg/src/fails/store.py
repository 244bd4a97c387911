"""Dataset persistence: a fixed-schema CSV file with atomic writes, automatic
backups, and newest-wins merging.

Dialect: comma delimiter, double-quote quoting, LF line endings, UTF-8,
mandatory header. Writes go through ``<path>.tmp`` + rename; the previous
file, if any, is copied to ``<path>.bak`` first, so a crash mid-write leaves
either the complete old file or the complete new file.
"""

from __future__ import annotations

import csv
import io
import json
import os
import shutil
from dataclasses import dataclass, field
from pathlib import Path

from fails.model import (
    ImpactLevel,
    IncidentDataset,
    IncidentRecord,
    IncidentUpdate,
    RecoveryStage,
    format_ts,
    latest_observed,
    parse_ts,
    utc_now,
)

COLUMNS = [
    "incident_id",
    "provider",
    "services",
    "title",
    "impact_level",
    "impact_color",
    "severity_score",
    "start_ts",
    "end_ts",
    "investigating_ts",
    "identified_ts",
    "monitoring_ts",
    "resolved_ts",
    "postmortem_ts",
    "source_url",
    "raw_updates_json",
]

_STAGE_COLUMNS = {
    RecoveryStage.S1_INVESTIGATING: "investigating_ts",
    RecoveryStage.S2_IDENTIFIED: "identified_ts",
    RecoveryStage.S3_MONITORING: "monitoring_ts",
    RecoveryStage.S4_RESOLVED: "resolved_ts",
    RecoveryStage.S5_POSTMORTEM: "postmortem_ts",
}

BACKUP_SUFFIX = ".bak"
TEMP_SUFFIX = ".tmp"


class StoreError(Exception):
    pass


class SchemaMismatch(StoreError):
    pass


class RowInvalid(StoreError):
    def __init__(self, row_number: int, message: str):
        super().__init__(f"row {row_number}: {message}")
        self.row_number = row_number


@dataclass
class MergeReport:
    added: int = 0
    replaced: int = 0
    unchanged: int = 0
    conflicts: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "added": self.added,
            "replaced": self.replaced,
            "unchanged": self.unchanged,
            "conflicts": list(self.conflicts),
        }


def _record_to_row(record: IncidentRecord) -> list[str]:
    stage_cells = {
        col: format_ts(record.stage_times[stage]) if stage in record.stage_times else ""
        for stage, col in _STAGE_COLUMNS.items()
    }
    return [
        record.incident_id,
        record.provider,
        "|".join(sorted(record.services)),
        record.title,
        record.impact.token,
        record.impact_color,
        str(record.severity_score),
        format_ts(record.start),
        format_ts(record.end) if record.end else "",
        stage_cells["investigating_ts"],
        stage_cells["identified_ts"],
        stage_cells["monitoring_ts"],
        stage_cells["resolved_ts"],
        stage_cells["postmortem_ts"],
        record.source_url or "",
        json.dumps([u.to_dict() for u in record.updates], ensure_ascii=False),
    ]


def _row_to_record(row: dict[str, str], row_number: int) -> IncidentRecord:
    def fail(msg: str):
        raise RowInvalid(row_number, msg)

    if not row["incident_id"]:
        fail("empty incident_id")
    try:
        impact = ImpactLevel.from_token(row["impact_level"])
    except ValueError as exc:
        fail(str(exc))
    try:
        start = parse_ts(row["start_ts"])
    except ValueError:
        fail(f"bad start_ts {row['start_ts']!r}")
    end = None
    if row["end_ts"]:
        try:
            end = parse_ts(row["end_ts"])
        except ValueError:
            fail(f"bad end_ts {row['end_ts']!r}")
        if end < start:
            fail(f"end_ts {row['end_ts']} precedes start_ts {row['start_ts']}")

    services = frozenset(s for s in row["services"].split("|") if s)
    if not services:
        fail("empty services")

    if str(impact.severity_score) != row["severity_score"]:
        fail(
            f"severity_score {row['severity_score']!r} inconsistent with "
            f"impact_level {row['impact_level']!r}"
        )

    stage_times = {}
    for stage, col in _STAGE_COLUMNS.items():
        if row[col]:
            try:
                stage_times[stage] = parse_ts(row[col])
            except ValueError:
                fail(f"bad {col} {row[col]!r}")

    try:
        raw = json.loads(row["raw_updates_json"]) if row["raw_updates_json"] else []
        updates = tuple(IncidentUpdate.from_dict(u) for u in raw)
    except (ValueError, KeyError) as exc:
        fail(f"bad raw_updates_json: {exc}")

    return IncidentRecord(
        incident_id=row["incident_id"],
        provider=row["provider"],
        services=services,
        title=row["title"],
        impact=impact,
        impact_color=row["impact_color"],
        start=start,
        end=end,
        stage_times=stage_times,
        updates=updates,
        source_url=row["source_url"] or None,
    )


def serialize_dataset(dataset: IncidentDataset) -> bytes:
    """Render the dataset to canonical CSV bytes (used for hashing too)."""
    buf = io.StringIO()
    writer = csv.writer(buf, quoting=csv.QUOTE_MINIMAL, lineterminator="\n")
    writer.writerow(COLUMNS)
    for record in dataset.records:
        writer.writerow(_record_to_row(record))
    return buf.getvalue().encode("utf-8")


def write_dataset(dataset: IncidentDataset, path: str | Path) -> None:
    """Atomically persist the dataset, backing up any previous file first."""
    path = Path(path)
    payload = serialize_dataset(dataset)
    path.parent.mkdir(parents=True, exist_ok=True)
    if path.exists():
        shutil.copyfile(path, path.with_name(path.name + BACKUP_SUFFIX))
    tmp = path.with_name(path.name + TEMP_SUFFIX)
    try:
        with open(tmp, "wb") as fh:
            fh.write(payload)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    finally:
        if tmp.exists():
            tmp.unlink()


def read_dataset(path: str | Path) -> IncidentDataset:
    """Load a dataset file, rejecting rows that violate hard invariants.

    scraped_at is reconstructed as the newest timestamp observed in the data
    (the file schema stores records only).
    """
    path = Path(path)
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaMismatch(f"{path}: file is empty, header row required") from None
        if header != COLUMNS:
            raise SchemaMismatch(f"{path}: header {header!r} does not match schema")
        records = []
        for i, cells in enumerate(reader, start=2):
            if len(cells) != len(COLUMNS):
                raise RowInvalid(i, f"expected {len(COLUMNS)} cells, got {len(cells)}")
            records.append(_row_to_record(dict(zip(COLUMNS, cells)), i))

    scraped_at = latest_observed(records) or utc_now()
    return IncidentDataset(
        records=tuple(records),
        scraped_at=scraped_at,
        provenance={"file": str(path)},
    )


def merge_datasets(
    base: IncidentDataset, incoming: IncidentDataset
) -> tuple[IncidentDataset, MergeReport]:
    """Union by incident id; on collision the newer scrape wins.

    "Newer" is judged by each dataset's scraped_at; a tie goes to the
    incoming side. Identical records count as unchanged regardless.
    """
    report = MergeReport()
    by_id: dict[str, IncidentRecord] = {r.incident_id: r for r in base.records}

    for record in incoming.records:
        existing = by_id.get(record.incident_id)
        if existing is None:
            by_id[record.incident_id] = record
            report.added += 1
        elif existing == record:
            report.unchanged += 1
        else:
            report.conflicts.append(record.incident_id)
            if incoming.scraped_at >= base.scraped_at:
                by_id[record.incident_id] = record
                report.replaced += 1

    merged = IncidentDataset(
        records=tuple(by_id.values()),
        scraped_at=max(base.scraped_at, incoming.scraped_at),
        provenance={**base.provenance, **incoming.provenance},
    )
    return merged, report
