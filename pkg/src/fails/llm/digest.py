"""Token-budgeted textual digest of a dataset, injected into chat prompts.

Summary numbers always come from the analytics operations (never recomputed
here) so the digest can be cross-checked against them exactly. Only the
incident index is truncated when the budget is tight, oldest rows first.
"""

from __future__ import annotations

from dataclasses import dataclass

from fails import analytics
from fails.model import IncidentDataset, format_ts, full_selection

CHARS_PER_TOKEN = 4  # crude but deterministic
MIN_BUDGET = 500
TOP_LONGEST = 5


@dataclass(frozen=True)
class DatasetDigest:
    total_incidents: int
    first: str
    last: str
    per_provider: tuple[dict, ...]
    per_service: tuple[tuple[str, int], ...]
    top_longest: tuple[tuple[str, str, int], ...]  # (id, title, seconds)
    impact_histogram: tuple[tuple[int, int], ...]  # (severity, count)
    index_rows: tuple[str, ...]
    truncated: bool
    omitted: int

    def to_text(self) -> str:
        lines = [
            "Dataset digest",
            f"Total incidents: {self.total_incidents}",
            f"Date range: {self.first} to {self.last}",
            "Per provider:",
        ]
        for row in self.per_provider:
            lines.append(
                f"- {row['provider']}: {row['reports']} reports "
                f"({row['maintenance_reports']} maintenance), "
                f"first {row['first']}, last {row['last']}"
            )
        lines.append("Per service incident counts:")
        lines.extend(f"- {sid}: {count}" for sid, count in self.per_service)
        lines.append("Impact histogram (severity: count):")
        lines.extend(f"- severity {sev}: {count}" for sev, count in self.impact_histogram)
        lines.append(f"Longest resolved incidents (top {len(self.top_longest)}):")
        lines.extend(
            f"- {iid}: {title} ({seconds} s)" for iid, title, seconds in self.top_longest
        )
        lines.append("Incident index (start, id, title, services):")
        lines.extend(self.index_rows)
        if self.truncated:
            lines.append(f"(index truncated: {self.omitted} older rows omitted)")
        return "\n".join(lines)

    def estimated_tokens(self) -> int:
        return len(self.to_text()) // CHARS_PER_TOKEN


def _estimate(rows: list[str], fixed: str) -> int:
    return (len(fixed) + sum(len(r) + 1 for r in rows)) // CHARS_PER_TOKEN


def build_dataset_digest(dataset: IncidentDataset, token_budget: int = 4000) -> DatasetDigest:
    """Build the digest, dropping index rows oldest-first to fit the budget."""
    if token_budget < MIN_BUDGET:
        raise ValueError(f"token_budget must be at least {MIN_BUDGET}")

    if not dataset.records:
        return DatasetDigest(
            total_incidents=0, first="-", last="-",
            per_provider=(), per_service=(), top_longest=(),
            impact_histogram=tuple((s, 0) for s in range(1, 6)),
            index_rows=(), truncated=False, omitted=0,
        )

    summary = analytics.dataset_summary(dataset)
    sel = full_selection(dataset)
    impact = analytics.impact_distribution(dataset, sel)
    histogram = {s: 0 for s in range(1, 6)}
    for bins in impact.values():
        for label, count in bins.bins:
            histogram[int(label)] += int(count)

    per_service = tuple(
        (sid, count)
        for sid, count in sorted(analytics.incident_counts(dataset, sel).items())
        if count > 0
    )

    resolved = [r for r in dataset.records if r.duration_seconds is not None]
    top = tuple(
        (r.incident_id, r.title, r.duration_seconds)
        for r in sorted(resolved, key=lambda r: (-r.duration_seconds, r.incident_id))[:TOP_LONGEST]
    )

    all_rows = [
        f"- {format_ts(r.start)} {r.incident_id} {r.title} [{', '.join(sorted(r.services))}]"
        for r in dataset.records
    ]

    per_provider = tuple(
        {
            "provider": s.provider,
            "reports": s.reports,
            "maintenance_reports": s.maintenance_reports,
            "first": s.first.date().isoformat(),
            "last": s.last.date().isoformat(),
        }
        for s in summary
    )

    def assemble(rows: list[str], truncated: bool, omitted: int) -> DatasetDigest:
        return DatasetDigest(
            total_incidents=len(dataset.records),
            first=dataset.records[0].start.date().isoformat(),
            last=max(r.start for r in dataset.records).date().isoformat(),
            per_provider=per_provider,
            per_service=per_service,
            top_longest=top,
            impact_histogram=tuple(sorted(histogram.items())),
            index_rows=tuple(rows),
            truncated=truncated,
            omitted=omitted,
        )

    digest = assemble(all_rows, False, 0)
    if digest.estimated_tokens() <= token_budget:
        return digest

    rows = list(all_rows)
    omitted = 0
    while rows and assemble(rows, True, omitted).estimated_tokens() > token_budget:
        rows.pop(0)  # records are sorted ascending, so the front is oldest
        omitted += 1
    return assemble(rows, True, omitted)
