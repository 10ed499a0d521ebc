"""Static figure renderer for tubeosc plot-data bundles."""

from .bundle import MissingTraceError, PlotBundle, PlotStyle
from .render import build_day_figure, build_summary_figure, render_day, render_summary

__version__ = "0.1.0"

__all__ = [
    "MissingTraceError",
    "PlotBundle",
    "PlotStyle",
    "build_day_figure",
    "build_summary_figure",
    "render_day",
    "render_summary",
]
