"""Profitability statistics: monthly returns, Sharpe ratios, trade stats.

Conventions, spelled out because they matter when comparing numbers:
standard deviations use the n-1 (sample) denominator unless asked otherwise,
MAD is the mean absolute deviation from the median, monthly returns are read
off the equity curve at calendar-month boundaries, and the risk-free rate
for a month is that month's average daily annual yield divided by twelve.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .engine import TradeRecord
from .errors import DegenerateVarianceError, MissingDataError

SQRT_12 = math.sqrt(12.0)


@dataclass(frozen=True)
class MonthlyReturn:
    month: str  # "YYYY-MM"
    return_fraction: float
    risk_free: float


@dataclass(frozen=True)
class TradeStats:
    n_trades: int
    win_rate: float  # percent of trades with strictly positive profit
    win_rate_defined: bool
    duration_mean: float
    duration_sd: float
    duration_median: float
    duration_mad: float
    pps_mean: float
    pps_sd: float
    pps_median: float
    pps_mad: float
    trades_per_day_mean: float
    trades_per_day_sd: float
    trades_per_day_median: float
    trades_per_day_mad: float


def _month_key(epoch_seconds: int) -> str:
    moment = datetime.fromtimestamp(epoch_seconds, tz=timezone.utc)
    return f"{moment.year:04d}-{moment.month:02d}"


def _next_month(key: str) -> str:
    year, month = int(key[:4]), int(key[5:7])
    month += 1
    if month == 13:
        year, month = year + 1, 1
    return f"{year:04d}-{month:02d}"


def months_between(first: str, last: str) -> list[str]:
    months = [first]
    while months[-1] < last:
        months.append(_next_month(months[-1]))
    return months


def monthly_returns(
    equity: Sequence[tuple[int, float]],
    risk_free: dict[str, float] | None = None,
) -> list[MonthlyReturn]:
    """Balance-boundary returns per calendar month of the equity curve.

    The curve must start with the initial balance point. Months inside the
    span with no balance change return zero.
    """
    if not equity:
        raise ValueError("equity curve is empty")
    months = months_between(_month_key(equity[0][0]), _month_key(equity[-1][0]))
    rf = risk_free or {}
    out: list[MonthlyReturn] = []
    idx = 0
    balance_start = equity[0][1]
    for month in months:
        balance_end = balance_start
        while idx < len(equity) and _month_key(equity[idx][0]) <= month:
            balance_end = equity[idx][1]
            idx += 1
        out.append(
            MonthlyReturn(
                month=month,
                return_fraction=balance_end / balance_start - 1.0,
                risk_free=rf.get(month, 0.0),
            )
        )
        balance_start = balance_end
    return out


def risk_free_monthly(
    daily_yields: Iterable[tuple[str, float]],
    months: Sequence[str],
) -> dict[str, float]:
    """Monthly risk-free fractions from daily annual percent yields.

    Each month's daily annual yields are averaged, compounded linearly to
    one month (divide by 12), and converted from percent to a fraction.
    Raises MissingDataError when a requested month has no rows.
    """
    buckets: dict[str, list[float]] = {}
    for date, annual_percent in daily_yields:
        buckets.setdefault(date[:7], []).append(annual_percent)
    out: dict[str, float] = {}
    for month in months:
        rows = buckets.get(month)
        if not rows:
            raise MissingDataError(f"no risk-free yields for month {month}")
        # fsum keeps the average of identical daily values exact
        out[month] = (math.fsum(rows) / len(rows)) / 12.0 / 100.0
    return out


def load_risk_free_csv(path: str | Path) -> list[tuple[str, float]]:
    """Rows of ``date,annual_percent`` (one header line)."""
    rows: list[tuple[str, float]] = []
    with open(path, "r", encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        next(reader, None)
        for row in reader:
            if not row or not row[0].strip():
                continue
            rows.append((row[0].strip(), float(row[1])))
    return rows


def sharpe(monthly: Sequence[MonthlyReturn], sd_mode: str = "sample") -> tuple[float, float]:
    """Monthly Sharpe ratio of excess returns and its sqrt(12) annualization."""
    if len(monthly) < 2:
        raise ValueError("need at least two months for a Sharpe ratio")
    excess = np.array([m.return_fraction - m.risk_free for m in monthly], dtype=np.float64)
    sd = _std(excess, sd_mode)
    if sd == 0.0:
        raise DegenerateVarianceError("excess returns have zero variance")
    monthly_ratio = float(excess.mean()) / sd
    return monthly_ratio, SQRT_12 * monthly_ratio


def _std(values: np.ndarray, sd_mode: str) -> float:
    if sd_mode not in ("sample", "population"):
        raise ValueError(f"unknown sd mode {sd_mode!r}")
    if values.size < 2:
        return 0.0
    return float(values.std(ddof=1 if sd_mode == "sample" else 0))


def _mad_from_median(values: np.ndarray) -> float:
    if values.size == 0:
        return 0.0
    return float(np.abs(values - np.median(values)).mean())


def _location_spread(values: np.ndarray, sd_mode: str) -> tuple[float, float, float, float]:
    if values.size == 0:
        return 0.0, 0.0, 0.0, 0.0
    return (
        float(values.mean()),
        _std(values, sd_mode),
        float(np.median(values)),
        _mad_from_median(values),
    )


def trade_stats(
    ledger: Sequence[TradeRecord],
    trading_days: Sequence[str],
    sd_mode: str = "sample",
) -> TradeStats:
    """Ledger-level statistics; zero-trade days still count for trades/day."""
    durations = np.array([t.duration for t in ledger], dtype=np.float64)
    pps = np.array([t.profit_per_share for t in ledger], dtype=np.float64)
    per_day = {day: 0 for day in trading_days}
    for trade in ledger:
        day = datetime.fromtimestamp(trade.entry_time, tz=timezone.utc).strftime("%Y-%m-%d")
        if day in per_day:
            per_day[day] += 1
    day_counts = np.array([per_day[d] for d in trading_days], dtype=np.float64)

    n = len(ledger)
    wins = sum(1 for t in ledger if t.profit > 0.0)
    d_mean, d_sd, d_med, d_mad = _location_spread(durations, sd_mode)
    p_mean, p_sd, p_med, p_mad = _location_spread(pps, sd_mode)
    c_mean, c_sd, c_med, c_mad = _location_spread(day_counts, sd_mode)
    return TradeStats(
        n_trades=n,
        win_rate=(100.0 * wins / n) if n else 0.0,
        win_rate_defined=n > 0,
        duration_mean=d_mean,
        duration_sd=d_sd,
        duration_median=d_med,
        duration_mad=d_mad,
        pps_mean=p_mean,
        pps_sd=p_sd,
        pps_median=p_med,
        pps_mad=p_mad,
        trades_per_day_mean=c_mean,
        trades_per_day_sd=c_sd,
        trades_per_day_median=c_med,
        trades_per_day_mad=c_mad,
    )


def hourly_profile(ledger: Sequence[TradeRecord]) -> list[tuple[int, int, float]]:
    """(hour, trade count, mean profit per share) keyed by entry hour."""
    buckets: dict[int, list[float]] = {}
    for trade in ledger:
        hour = (trade.entry_time % 86400) // 3600
        buckets.setdefault(int(hour), []).append(trade.profit_per_share)
    return [(hour, len(vals), sum(vals) / len(vals)) for hour, vals in sorted(buckets.items())]
