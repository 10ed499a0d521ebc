"""Line-grid crossing oscillator and threshold trading backtester."""

from .engine import Thresholds, TradeRecord, TradingEngine, run_period
from .geometry import (
    Line,
    LineGrid,
    OscillatorOutput,
    OscillatorState,
    day_oscillator,
    reset_for_period,
    single_line_crossing,
    slope_crossing_count,
)
from .heuristics import (
    OscillatorParams,
    basic_slope_from_previous,
    default_slope_factors,
    default_starting_points,
)
from .metrics import MonthlyReturn, TradeStats, monthly_returns, sharpe, trade_stats
from .ticks import SecondSeries, TickFormat, TickRecord, parse_ticks, resample_to_seconds
from .timebase import PeriodSpec, PeriodSummary, summarize_period, zone_interval

__version__ = "0.1.0"

__all__ = [
    "Line",
    "LineGrid",
    "MonthlyReturn",
    "OscillatorOutput",
    "OscillatorParams",
    "OscillatorState",
    "PeriodSpec",
    "PeriodSummary",
    "SecondSeries",
    "Thresholds",
    "TickFormat",
    "TickRecord",
    "TradeRecord",
    "TradeStats",
    "TradingEngine",
    "basic_slope_from_previous",
    "day_oscillator",
    "default_slope_factors",
    "default_starting_points",
    "monthly_returns",
    "parse_ticks",
    "resample_to_seconds",
    "reset_for_period",
    "run_period",
    "sharpe",
    "single_line_crossing",
    "slope_crossing_count",
    "summarize_period",
    "trade_stats",
    "zone_interval",
]
