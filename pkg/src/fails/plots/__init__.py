"""Plot specs and rendering for the 17 analysis kinds."""

from fails.plots.build import build_plot_spec
from fails.plots.kinds import (
    PLOT_TITLES,
    ImageFormat,
    InsufficientData,
    PlotKind,
    PlotSeries,
    PlotSpec,
    RenderedPlot,
    SeriesStyle,
)
from fails.plots.render import RenderFailure, output_filename, render, render_all

__all__ = [
    "PLOT_TITLES",
    "ImageFormat",
    "InsufficientData",
    "PlotKind",
    "PlotSeries",
    "PlotSpec",
    "RenderFailure",
    "RenderedPlot",
    "SeriesStyle",
    "build_plot_spec",
    "output_filename",
    "render",
    "render_all",
]
