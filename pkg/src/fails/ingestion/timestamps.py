"""Timestamp normalization for the source formats status pages emit.

Everything is reduced to UTC with second resolution. Zone abbreviations are
resolved through a fixed offset table (status pages label times with the
abbreviation, not a zone id); zoneless inputs are interpreted in the caller's
assumed zone.
"""

from __future__ import annotations

import re
from datetime import datetime, timedelta, timezone
from zoneinfo import ZoneInfo

from fails.model import to_utc

# Fixed offsets in hours. Pages pick the abbreviation; no DST inference here.
ZONE_ABBREVIATIONS = {
    "UTC": 0,
    "GMT": 0,
    "Z": 0,
    "PST": -8,
    "PDT": -7,
    "MST": -7,
    "MDT": -6,
    "CST": -6,
    "CDT": -5,
    "EST": -5,
    "EDT": -4,
    "CET": 1,
    "CEST": 2,
}

# strptime patterns tried for non-ISO inputs, after any trailing zone
# abbreviation has been split off.
SOURCE_FORMATS = (
    "%b %d, %Y %H:%M:%S",
    "%b %d, %Y %H:%M",
    "%B %d, %Y %H:%M:%S",
    "%B %d, %Y %H:%M",
    "%Y-%m-%d %H:%M:%S",
    "%Y-%m-%d %H:%M",
)

_ABBREV_RE = re.compile(r"\s+([A-Z]{1,4})$")


class UnparseableTimestamp(ValueError):
    def __init__(self, raw: str):
        formats = ["ISO-8601", *SOURCE_FORMATS]
        super().__init__(f"cannot parse timestamp {raw!r}; formats tried: {formats}")
        self.raw = raw


def _try_iso(raw: str) -> datetime | None:
    text = raw.strip()
    if text.endswith("Z"):
        text = text[:-1] + "+00:00"
    try:
        dt = datetime.fromisoformat(text)
    except ValueError:
        return None
    if dt.tzinfo is None:
        return None  # zoneless ISO handled by the strptime path
    return to_utc(dt)


def normalize_timestamp(raw: str, assumed_zone: str = "UTC") -> datetime:
    """Parse `raw` into a UTC datetime with second resolution.

    Raises UnparseableTimestamp when no registered format matches.
    """
    if not raw or not raw.strip():
        raise UnparseableTimestamp(raw)
    text = raw.strip()

    iso = _try_iso(text)
    if iso is not None:
        return iso

    offset_hours: int | None = None
    m = _ABBREV_RE.search(text)
    if m and m.group(1) in ZONE_ABBREVIATIONS:
        offset_hours = ZONE_ABBREVIATIONS[m.group(1)]
        text = text[: m.start()].strip()

    for fmt in SOURCE_FORMATS:
        try:
            naive = datetime.strptime(text, fmt)
        except ValueError:
            continue
        if offset_hours is not None:
            aware = naive.replace(tzinfo=timezone(timedelta(hours=offset_hours)))
        else:
            aware = naive.replace(tzinfo=ZoneInfo(assumed_zone))
        return to_utc(aware)

    raise UnparseableTimestamp(raw)
