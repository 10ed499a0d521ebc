"""End-to-end backtest runs: data loading, per-day loops, report assembly.

A run walks the manifest day by day. Each day is resampled to seconds over
the zone of interest; the first usable days only seed the parameter
heuristics (warm-up), after which every day gets a fresh line grid built
from the previous day's summary, a zeroed oscillator, and its own trading
engine. Trade decisions never depend on the account balance, so days can be
computed in parallel as per-share ledgers; balances are folded sequentially
afterwards in date order, which keeps outputs byte-identical no matter how
many workers ran.
"""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from . import metrics as metrics_mod
from .config import BacktestConfig
from .engine import REINVEST_100, TradeRecord, TradingEngine, run_period
from .errors import (
    ConfigError,
    DegenerateRangeError,
    DegenerateVarianceError,
    EmptySeriesError,
    FormatError,
    MissingDataError,
    OutOfOrderError,
)
from .geometry import LineGrid, day_oscillator
from .heuristics import params_from_summary
from .ticks import SecondSeries, last_quote_before, parse_ticks, read_manifest, resample_to_seconds
from .timebase import PeriodSpec, PeriodSummary, summarize_period, zone_interval

logger = logging.getLogger(__name__)


@dataclass
class DayTrace:
    date: str
    t_start: int
    ask: np.ndarray
    bid: np.ndarray
    present: np.ndarray
    raw: np.ndarray
    scaled: np.ndarray
    grid_anchor: int
    starting_points: np.ndarray
    slopes: np.ndarray


@dataclass(frozen=True)
class RawTrade:
    """Size-independent ledger entry; balances are applied in the fold."""

    date: str
    side: str
    entry_time: int
    exit_time: int
    entry_price: float
    exit_price: float
    profit_per_share: float
    duration: int
    exit_reason: str


@dataclass
class DayData:
    date: str
    series: SecondSeries | None = None
    prev_quote: tuple[float, float] | None = None
    summary: PeriodSummary | None = None
    first_price: float | None = None
    skip_reason: str | None = None


@dataclass
class BacktestReport:
    config: BacktestConfig
    traded_days: list[str]
    warmup_days: list[str]
    skipped_days: list[tuple[str, str]]
    ledger: list[TradeRecord]
    equity: list[tuple[int, float]]
    monthly: list[metrics_mod.MonthlyReturn]
    sharpe_monthly: float | None
    sharpe_yearly: float | None
    sharpe_note: str | None
    stats: metrics_mod.TradeStats
    hourly: list[tuple[int, int, float]]
    initial_balance: float
    final_balance: float
    traces: dict[str, DayTrace] = field(default_factory=dict)

    @property
    def total_profit(self) -> float:
        return self.final_balance - self.initial_balance

    @property
    def calendar_days(self) -> int:
        return len(self.traded_days) + len(self.warmup_days) + len(self.skipped_days)

    def to_json_dict(self) -> dict:
        monthly_values = np.array([m.return_fraction for m in self.monthly], dtype=np.float64)
        mean, sd, median, mad = metrics_mod._location_spread(monthly_values, self.config.sd_mode)
        return {
            "config": _jsonable(self.config.echo()),
            "balance": {
                "initial": float(self.initial_balance),
                "final": float(self.final_balance),
                "total_profit": float(self.total_profit),
                "roi": float(self.total_profit / self.initial_balance),
            },
            "days": {
                "calendar": self.calendar_days,
                "processed": len(self.traded_days) + len(self.warmup_days),
                "traded": list(self.traded_days),
                "warmup": list(self.warmup_days),
                "skipped": [{"date": d, "reason": r} for d, r in self.skipped_days],
            },
            "sharpe": {
                "monthly": self.sharpe_monthly,
                "yearly": self.sharpe_yearly,
                "note": self.sharpe_note,
            },
            "monthly_returns": {
                "mean": mean,
                "sd": sd,
                "median": median,
                "mad": mad,
                "table": [
                    {"month": m.month, "return_fraction": m.return_fraction, "risk_free": m.risk_free}
                    for m in self.monthly
                ],
            },
            "trade_stats": _jsonable(
                {k: getattr(self.stats, k) for k in self.stats.__dataclass_fields__}
            ),
            "hourly_profile": [
                {"hour": h, "trade_count": c, "mean_profit_per_share": p} for h, c, p in self.hourly
            ],
        }


def _jsonable(value):
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (np.floating, float)):
        return float(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    return value


def _map_maybe_parallel(fn: Callable, items: Iterable, jobs: int) -> list:
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def _load_day(config: BacktestConfig, date: str, path) -> DayData:
    spec = PeriodSpec(
        period_start=_date_to_epoch(date),
        zone_offset=config.zone_start,
        zone_length=config.zone_length,
    )
    zone = zone_interval(spec)
    out = DayData(date=date)
    try:
        parsed = parse_ticks(path)
    except OSError:
        out.skip_reason = "data file unreadable"
        return out
    except (FormatError, OutOfOrderError) as exc:
        out.skip_reason = f"unparsable data: {exc}"
        return out
    if parsed.skipped_rows:
        logger.warning("%s: skipped %d malformed tick rows", date, parsed.skipped_rows)
    # A holiday is a day with zero in-zone ticks; stale pre-zone quotes must
    # not fabricate a flat trading day out of it.
    zone_start_ms, zone_stop_ms = zone[0] * 1000, (zone[1] + 1) * 1000
    if not any(zone_start_ms <= t.timestamp_ms < zone_stop_ms for t in parsed.ticks):
        out.skip_reason = "no data inside the zone"
        return out
    try:
        series = resample_to_seconds(parsed.ticks, zone)
    except EmptySeriesError:
        out.skip_reason = "no data inside the zone"
        return out
    out.series = series
    out.prev_quote = last_quote_before(parsed.ticks, zone[0])
    out.summary = summarize_period(series, price=config.signal_price)
    signal = series.prices(config.signal_price)
    out.first_price = float(signal[series.present][0])
    return out


def _date_to_epoch(date: str) -> int:
    from datetime import datetime, timezone

    return int(datetime.strptime(date, "%Y-%m-%d").replace(tzinfo=timezone.utc).timestamp())


def _prev_signal_price(quote: tuple[float, float] | None, kind: str) -> float | None:
    if quote is None:
        return None
    ask, bid = quote
    if kind == "ask":
        return ask
    if kind == "bid":
        return bid
    return (ask + bid) / 2.0


def _compute_day(
    config: BacktestConfig,
    day: DayData,
    summary_prev: PeriodSummary,
) -> tuple[list[RawTrade], DayTrace | None, str | None]:
    """Oscillator plus per-share trading for one day; returns a skip note on failure."""
    series = day.series
    assert series is not None and day.first_price is not None
    try:
        params = params_from_summary(
            summary_prev,
            config.zone_length,
            day.first_price,
            n_points=config.n_starting_points,
            n_factors=config.n_slope_factors,
            width_factor=config.grid_width_factor,
            bandwidth=config.bandwidth,
            multiplicator=config.multiplicator,
            discount=config.discount,
            basic_slope_override=config.basic_slope,
            fallback_slope=config.fallback_basic_slope,
            fallback_range=config.fallback_range,
        )
    except DegenerateRangeError as exc:
        return [], None, str(exc)
    grid = LineGrid.from_slope_factors(
        anchor_time=series.t_start,
        starting_points=params.starting_points,
        basic_slope=params.basic_slope,
        slope_factors=params.slope_factors,
    )
    signal = series.prices(config.signal_price)
    prev_price = _prev_signal_price(day.prev_quote, config.signal_price)
    raw = day_oscillator(grid, signal, series.present, prev_price, params.bandwidth, params.discount)
    scaled = params.multiplicator * raw

    engine = TradingEngine(
        config.thresholds(),
        start_balance=1.0,
        volume_mode=config.volume_mode,
        fixed_volume=config.fixed_volume,
        same_second_reentry=config.same_second_reentry,
    )
    records = run_period(
        engine,
        series.t_start,
        scaled,
        series.ask,
        series.bid,
        series.present,
        delay=config.delay,
    )
    raw_trades = [
        RawTrade(
            date=day.date,
            side=r.side,
            entry_time=r.entry_time,
            exit_time=r.exit_time,
            entry_price=r.entry_price,
            exit_price=r.exit_price,
            profit_per_share=r.profit_per_share,
            duration=r.duration,
            exit_reason=r.exit_reason,
        )
        for r in records
    ]
    trace = None
    if config.trace:
        trace = DayTrace(
            date=day.date,
            t_start=series.t_start,
            ask=series.ask,
            bid=series.bid,
            present=series.present,
            raw=raw,
            scaled=scaled,
            grid_anchor=grid.anchor_time,
            starting_points=grid.starting_points,
            slopes=grid.slopes,
        )
    return raw_trades, trace, None


def _fold_balances(config: BacktestConfig, raw_trades: list[RawTrade]) -> tuple[list[TradeRecord], float]:
    """Apply sizing and balance compounding in date order, exactly as the
    engine itself would have with the running balance."""
    balance = config.start_balance
    ledger: list[TradeRecord] = []
    for raw in raw_trades:
        if config.volume_mode == REINVEST_100:
            size = balance / raw.entry_price
        else:
            size = config.fixed_volume
        profit = raw.profit_per_share * size
        balance += profit
        ledger.append(
            TradeRecord(
                side=raw.side,
                entry_time=raw.entry_time,
                exit_time=raw.exit_time,
                entry_price=raw.entry_price,
                exit_price=raw.exit_price,
                size=size,
                profit=profit,
                profit_per_share=raw.profit_per_share,
                duration=raw.duration,
                exit_reason=raw.exit_reason,
            )
        )
    return ledger, balance


def run_backtest(config: BacktestConfig) -> BacktestReport:
    config.validate()
    manifest = read_manifest(config.manifest_path())
    dates = sorted(manifest)
    if config.date_from:
        dates = [d for d in dates if d >= config.date_from]
    if config.date_to:
        dates = [d for d in dates if d <= config.date_to]
    if not dates:
        raise ConfigError("no manifest days inside the date range")

    loaded = _map_maybe_parallel(lambda d: _load_day(config, d, manifest[d]), dates, config.jobs)

    # Chain summaries: every usable day seeds the next one's parameters.
    warmup_left = config.warmup_days
    summary_prev: PeriodSummary | None = None
    plan: list[tuple[DayData, PeriodSummary]] = []
    warmup_days: list[str] = []
    skipped: list[tuple[str, str]] = []
    for day in loaded:
        if day.skip_reason is not None:
            skipped.append((day.date, day.skip_reason))
            logger.warning("%s skipped: %s", day.date, day.skip_reason)
            continue
        if warmup_left > 0:
            warmup_days.append(day.date)
            warmup_left -= 1
        else:
            if summary_prev is None:
                # No seed day was requested: fall back to a zero-range summary
                # so fully overridden configs can trade from day one.
                flat = day.first_price if day.first_price is not None else 0.0
                summary_prev = PeriodSummary(max_price=flat, min_price=flat, close_price=flat)
            plan.append((day, summary_prev))
        summary_prev = day.summary

    computed = _map_maybe_parallel(lambda item: _compute_day(config, item[0], item[1]), plan, config.jobs)

    traded_days: list[str] = []
    raw_trades: list[RawTrade] = []
    traces: dict[str, DayTrace] = {}
    for (day, _), (day_trades, trace, note) in zip(plan, computed):
        if note is not None:
            skipped.append((day.date, note))
            logger.warning("%s skipped: %s", day.date, note)
            continue
        traded_days.append(day.date)
        raw_trades.extend(day_trades)
        if trace is not None:
            traces[day.date] = trace
    skipped.sort()

    ledger, final_balance = _fold_balances(config, raw_trades)
    equity: list[tuple[int, float]] = []
    if traded_days:
        first_zone_start = _date_to_epoch(traded_days[0]) + config.zone_start
        equity.append((first_zone_start, config.start_balance))
        running = config.start_balance
        for trade in ledger:
            running += trade.profit
            equity.append((trade.exit_time, running))

    monthly: list[metrics_mod.MonthlyReturn] = []
    sharpe_m: float | None = None
    sharpe_y: float | None = None
    sharpe_note: str | None = None
    if equity:
        rf_map: dict[str, float] = {}
        months = metrics_mod.months_between(
            metrics_mod._month_key(equity[0][0]), metrics_mod._month_key(equity[-1][0])
        )
        rf_path = config.risk_free_path()
        if rf_path is not None:
            rf_map = metrics_mod.risk_free_monthly(metrics_mod.load_risk_free_csv(rf_path), months)
        else:
            logger.warning("no risk-free file configured; using 0%% risk-free rate")
        monthly = metrics_mod.monthly_returns(equity, rf_map)
        try:
            sharpe_m, sharpe_y = metrics_mod.sharpe(monthly, sd_mode=config.sd_mode)
        except (ValueError, DegenerateVarianceError) as exc:
            sharpe_note = str(exc)
    else:
        sharpe_note = "no traded days"

    stats = metrics_mod.trade_stats(ledger, traded_days, sd_mode=config.sd_mode)
    hourly = metrics_mod.hourly_profile(ledger)
    return BacktestReport(
        config=config,
        traded_days=traded_days,
        warmup_days=warmup_days,
        skipped_days=skipped,
        ledger=ledger,
        equity=equity,
        monthly=monthly,
        sharpe_monthly=sharpe_m,
        sharpe_yearly=sharpe_y,
        sharpe_note=sharpe_note,
        stats=stats,
        hourly=hourly,
        initial_balance=config.start_balance,
        final_balance=final_balance,
        traces=traces,
    )
