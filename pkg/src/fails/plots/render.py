"""Render plot specs to SVG or PNG via matplotlib (Agg backend).

Rendering is deterministic: fixed hash salt, no embedded dates, and colors
assigned from a fixed palette keyed by series name, so re-renders of the
same spec are byte-identical. pyplot is not reentrant, hence the module-wide
lock.
"""

from __future__ import annotations

import io
import threading
import zlib
from datetime import datetime
from typing import Optional

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
from matplotlib import dates as mdates  # noqa: E402

from fails.model import AnalysisSelection, IncidentDataset, Registry, parse_ts  # noqa: E402
from fails.plots.build import build_plot_spec  # noqa: E402
from fails.plots.kinds import (  # noqa: E402
    ImageFormat,
    InsufficientData,
    PlotKind,
    PlotSeries,
    PlotSpec,
    RenderedPlot,
    SeriesStyle,
)

_RENDER_LOCK = threading.Lock()

DEFAULT_WIDTH = 1600
DEFAULT_HEIGHT = 900
_DPI = 100

PALETTE = [
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948",
    "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac", "#86bcb6", "#d37295",
    "#a0cbe8", "#ffbe7d", "#8cd17d", "#b6992d",
]


class RenderFailure(Exception):
    pass


def series_color(name: str) -> str:
    """Stable palette color for a series name."""
    return PALETTE[zlib.crc32(name.encode("utf-8")) % len(PALETTE)]


def _draw_bars(ax, series: list[PlotSeries]):
    labels = list(series[0].labels)
    n = len(series)
    width = 0.8 / n
    positions = range(len(labels))
    for i, s in enumerate(series):
        offset = (i - (n - 1) / 2) * width
        ax.bar(
            [p + offset for p in positions],
            s.values,
            width=width,
            label=s.name,
            color=series_color(s.name),
        )
    ax.set_xticks(list(positions))
    ax.set_xticklabels(labels, rotation=30, ha="right")
    if n > 1 or series[0].name not in ("incidents", "combinations"):
        ax.legend(loc="best", fontsize="small")


def _draw_steps(ax, series: list[PlotSeries]):
    for s in series:
        xs = list(s.x)
        ys = list(s.y)
        # anchor the CDF at p=0 just before the first sample
        if xs:
            xs = [xs[0]] + xs
            ys = [0.0] + ys
        ax.step(xs, ys, where="post", label=s.name, color=series_color(s.name))
    ax.set_ylim(0, 1.05)
    ax.legend(loc="best", fontsize="small")


def _draw_lines(ax, series: list[PlotSeries]):
    for s in series:
        ax.plot(s.x, s.y, label=s.name, color=series_color(s.name), marker=".")
    if len(series) > 1 or series[0].name != "acf":
        ax.legend(loc="best", fontsize="small")


def _draw_boxes(ax, series: list[PlotSeries]):
    stats = []
    for s in series:
        b = s.box or {}
        stats.append(
            {
                "label": s.name,
                "med": b["median"],
                "q1": b["q1"],
                "q3": b["q3"],
                "whislo": b["whisker_low"],
                "whishi": b["whisker_high"],
                "fliers": b.get("outliers", []),
            }
        )
    ax.bxp(stats, showfliers=True)
    ax.tick_params(axis="x", rotation=30)


def _draw_matrix(fig, ax, series: PlotSeries):
    cells = [list(row) for row in (series.matrix or ())]
    im = ax.imshow(cells, cmap="YlOrRd", aspect="auto")
    labels = list(series.labels)
    ax.set_xticks(range(len(labels)))
    ax.set_yticks(range(len(labels)))
    ax.set_xticklabels(labels, rotation=45, ha="right")
    ax.set_yticklabels(labels)
    for i in range(len(labels)):
        for j in range(len(labels)):
            value = cells[i][j]
            text = f"{value:.2f}" if isinstance(value, float) and value % 1 else f"{int(value)}"
            ax.text(j, i, text, ha="center", va="center", fontsize="x-small")
    fig.colorbar(im, ax=ax, shrink=0.8)


def _draw_intervals(ax, series: list[PlotSeries]):
    names = []
    for row, s in enumerate(series):
        names.append(s.name)
        spans = []
        for start_iso, end_iso in s.intervals:
            start = mdates.date2num(parse_ts(start_iso))
            end = mdates.date2num(parse_ts(end_iso))
            spans.append((start, max(end - start, 0.003)))  # keep slivers visible
        ax.broken_barh(spans, (row - 0.3, 0.6), facecolors=series_color(s.name))
    ax.set_yticks(range(len(names)))
    ax.set_yticklabels(names)
    ax.xaxis.set_major_formatter(mdates.DateFormatter("%Y-%m-%d"))
    ax.tick_params(axis="x", rotation=30)


def render(
    spec: PlotSpec,
    format: ImageFormat = ImageFormat.SVG,
    width: int = DEFAULT_WIDTH,
    height: int = DEFAULT_HEIGHT,
) -> RenderedPlot:
    """Render a spec to image bytes. The spec is never mutated."""
    if width < 100 or height < 100:
        raise ValueError("width and height must be at least 100 px")
    format = ImageFormat(format)

    with _RENDER_LOCK:
        plt.rcParams["svg.hashsalt"] = "fails"
        plt.rcParams["svg.fonttype"] = "none"
        fig, ax = plt.subplots(figsize=(width / _DPI, height / _DPI), dpi=_DPI)
        try:
            styles = {s.style for s in spec.series}
            if styles == {SeriesStyle.BAR}:
                _draw_bars(ax, list(spec.series))
            elif styles == {SeriesStyle.STEP}:
                _draw_steps(ax, list(spec.series))
            elif styles == {SeriesStyle.LINE}:
                _draw_lines(ax, list(spec.series))
            elif styles == {SeriesStyle.BOX}:
                _draw_boxes(ax, list(spec.series))
            elif styles == {SeriesStyle.MATRIX}:
                _draw_matrix(fig, ax, spec.series[0])
            elif styles == {SeriesStyle.INTERVAL}:
                _draw_intervals(ax, list(spec.series))
            else:
                raise RenderFailure(f"cannot render mixed series styles {styles}")

            ax.set_title(spec.title)
            ax.set_xlabel(spec.x_label)
            ax.set_ylabel(spec.y_label)
            fig.tight_layout()

            buf = io.BytesIO()
            if format == ImageFormat.SVG:
                fig.savefig(buf, format="svg", metadata={"Date": None})
            else:
                fig.savefig(buf, format="png")
        except (RenderFailure, KeyError) as exc:
            raise RenderFailure(str(exc)) from exc
        finally:
            plt.close(fig)

    return RenderedPlot(kind=spec.kind, format=format, data=buf.getvalue(), width=width, height=height)


def render_all(
    dataset: IncidentDataset,
    sel: AnalysisSelection,
    kinds: list[PlotKind],
    format: ImageFormat = ImageFormat.SVG,
    width: int = DEFAULT_WIDTH,
    height: int = DEFAULT_HEIGHT,
    registry: Optional[Registry] = None,
) -> tuple[dict[PlotKind, RenderedPlot], dict[PlotKind, str]]:
    """Render a batch of kinds; kinds without data are reported, not fatal."""
    if not kinds:
        raise ValueError("kinds must be non-empty")
    rendered: dict[PlotKind, RenderedPlot] = {}
    skipped: dict[PlotKind, str] = {}
    for kind in kinds:
        try:
            spec = build_plot_spec(kind, dataset, sel, registry=registry)
            rendered[kind] = render(spec, format=format, width=width, height=height)
        except InsufficientData as exc:
            skipped[kind] = str(exc)
    return rendered, skipped


def output_filename(kind: PlotKind, sel: AnalysisSelection, format: ImageFormat) -> str:
    """Bulk-export file name: <kind>_<from>_<to>.<ext> with compact stamps."""
    compact = "%Y%m%dT%H%M%SZ"

    def fmt(dt: datetime) -> str:
        return dt.strftime(compact)

    return f"{kind.value}_{fmt(sel.start)}_{fmt(sel.end)}.{format.value}"
