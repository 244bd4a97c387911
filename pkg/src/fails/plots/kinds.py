"""The 17 plot kinds and their renderer-independent spec types."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from fails.model import AnalysisSelection, format_ts


class PlotKind(str, Enum):
    WEEKLY_OVERVIEW = "weekly-overview"
    HOURLY_OVERVIEW = "hourly-overview"
    MTTR_DISTRIBUTION = "mttr-distribution"
    MTTR_BY_PROVIDER = "mttr-by-provider"
    MTTR_BOXPLOT = "mttr-boxplot"
    MTBF_DISTRIBUTION = "mtbf-distribution"
    MTBF_BY_PROVIDER = "mtbf-by-provider"
    MTBF_BOXPLOT = "mtbf-boxplot"
    RESOLUTION_ACTIVITIES = "resolution-activities"
    STATUS_COMBINATIONS = "status-combinations"
    DAILY_AVAILABILITY = "daily-availability"
    SERVICE_COOCCURRENCE = "service-cooccurrence"
    COOCCURRENCE_PROBABILITY = "cooccurrence-probability"
    SERVICE_INCIDENTS = "service-incidents"
    INCIDENT_OUTAGE_TIMELINE = "incident-outage-timeline"
    AUTOCORRELATIONS = "autocorrelations"
    INCIDENT_IMPACT_DISTRIBUTION = "incident-impact-distribution"

    @classmethod
    def from_name(cls, name: str) -> "PlotKind":
        for kind in cls:
            if kind.value == name:
                return kind
        raise KeyError(f"unknown plot kind {name!r}")


PLOT_TITLES = {
    PlotKind.WEEKLY_OVERVIEW: "Weekly incident overview",
    PlotKind.HOURLY_OVERVIEW: "Hourly incident overview",
    PlotKind.MTTR_DISTRIBUTION: "Recovery time distribution by service",
    PlotKind.MTTR_BY_PROVIDER: "Recovery time distribution by provider",
    PlotKind.MTTR_BOXPLOT: "Recovery time boxplot by service",
    PlotKind.MTBF_DISTRIBUTION: "Time between failures distribution by service",
    PlotKind.MTBF_BY_PROVIDER: "Time between failures distribution by provider",
    PlotKind.MTBF_BOXPLOT: "Time between failures boxplot by service",
    PlotKind.RESOLUTION_ACTIVITIES: "Resolution activity durations",
    PlotKind.STATUS_COMBINATIONS: "Status combinations",
    PlotKind.DAILY_AVAILABILITY: "Daily availability",
    PlotKind.SERVICE_COOCCURRENCE: "Service co-occurrence matrix",
    PlotKind.COOCCURRENCE_PROBABILITY: "Co-occurrence probability matrix",
    PlotKind.SERVICE_INCIDENTS: "Incidents by service",
    PlotKind.INCIDENT_OUTAGE_TIMELINE: "Incident and outage timeline",
    PlotKind.AUTOCORRELATIONS: "Autocorrelation of daily incident counts",
    PlotKind.INCIDENT_IMPACT_DISTRIBUTION: "Incident impact distribution by provider",
}

assert set(PLOT_TITLES) == set(PlotKind), "every plot kind needs a title"


class InsufficientData(Exception):
    """The selection yields no samples for this plot kind."""

    def __init__(self, kind: PlotKind, detail: str = ""):
        msg = f"not enough data for plot {kind.value!r}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)
        self.kind = kind


class SeriesStyle:
    BAR = "bar"
    STEP = "step"
    LINE = "line"
    BOX = "box"
    MATRIX = "matrix"
    INTERVAL = "interval"


@dataclass(frozen=True)
class PlotSeries:
    """One named series; which payload fields are set depends on the style."""

    name: str
    style: str
    x: tuple[float, ...] = ()
    y: tuple[float, ...] = ()
    labels: tuple[str, ...] = ()
    values: tuple[float, ...] = ()
    box: Optional[dict] = None
    matrix: Optional[tuple[tuple[float, ...], ...]] = None
    intervals: tuple[tuple[str, str], ...] = ()

    def to_dict(self) -> dict:
        payload: dict = {"name": self.name, "style": self.style}
        if self.style in (SeriesStyle.STEP, SeriesStyle.LINE):
            payload["x"] = list(self.x)
            payload["y"] = list(self.y)
        elif self.style == SeriesStyle.BAR:
            payload["labels"] = list(self.labels)
            payload["values"] = list(self.values)
        elif self.style == SeriesStyle.BOX:
            payload["box"] = dict(self.box or {})
        elif self.style == SeriesStyle.MATRIX:
            payload["labels"] = list(self.labels)
            payload["cells"] = [list(row) for row in (self.matrix or ())]
        elif self.style == SeriesStyle.INTERVAL:
            payload["intervals"] = [list(span) for span in self.intervals]
        return payload


@dataclass(frozen=True)
class PlotSpec:
    kind: PlotKind
    title: str
    x_label: str
    y_label: str
    series: tuple[PlotSeries, ...]
    selection: AnalysisSelection
    stats_sidecar: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if "n_incidents" not in self.stats_sidecar:
            raise ValueError("stats_sidecar must include n_incidents")

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "title": self.title,
            "x_label": self.x_label,
            "y_label": self.y_label,
            "series": [s.to_dict() for s in self.series],
            "selection": {
                "from": format_ts(self.selection.start),
                "to": format_ts(self.selection.end),
                "services": sorted(self.selection.services),
            },
            "stats_sidecar": dict(self.stats_sidecar),
        }


class ImageFormat(str, Enum):
    PNG = "png"
    SVG = "svg"


@dataclass(frozen=True)
class RenderedPlot:
    kind: PlotKind
    format: ImageFormat
    data: bytes
    width: int
    height: int

    def __post_init__(self):
        if not self.data:
            raise ValueError("rendered plot is empty")
