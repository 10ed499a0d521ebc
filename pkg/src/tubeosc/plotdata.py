"""Writes run outputs: report.json, trade ledger, and the plot-data bundle.

Everything here is plain CSV/JSON with deterministic formatting (floats via
repr, sorted JSON keys) so that identical runs produce identical bytes. The
plotdata/ bundle is what the figure renderer consumes; per-day files exist
only when the run recorded traces.
"""
from __future__ import annotations

import csv
import json
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .backtest import BacktestReport, DayTrace
from .engine import TradeRecord
from .errors import TraceUnavailableError

TRADES_HEADER = [
    "entry_time",
    "exit_time",
    "side",
    "entry_price",
    "exit_price",
    "size",
    "profit",
    "profit_per_share",
    "duration",
    "exit_reason",
]

HIST_BINS = 50


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(cell) for cell in row])


def _trade_row(trade: TradeRecord) -> list:
    return [
        trade.entry_time,
        trade.exit_time,
        trade.side,
        trade.entry_price,
        trade.exit_price,
        trade.size,
        trade.profit,
        trade.profit_per_share,
        trade.duration,
        trade.exit_reason,
    ]


def write_trades_csv(path: Path, ledger: Sequence[TradeRecord]) -> None:
    write_csv(path, TRADES_HEADER, (_trade_row(t) for t in ledger))


def write_monthly_csv(path: Path, report: BacktestReport) -> None:
    write_csv(
        path,
        ["month", "return_fraction", "risk_free"],
        ((m.month, m.return_fraction, m.risk_free) for m in report.monthly),
    )


def histogram(values: np.ndarray, bins: int = HIST_BINS) -> list[tuple[float, float, int]]:
    """(bin_left, bin_right, count) rows; empty input yields no rows."""
    if values.size == 0:
        return []
    counts, edges = np.histogram(values, bins=bins)
    return [(float(edges[i]), float(edges[i + 1]), int(counts[i])) for i in range(len(counts))]


def _downsample_indices(n: int, points: int, keep: np.ndarray | None = None) -> np.ndarray:
    if points <= 0 or points >= n:
        return np.arange(n)
    idx = np.unique(np.round(np.linspace(0, n - 1, points)).astype(np.int64))
    if keep is not None and keep.size:
        idx = np.unique(np.concatenate([idx, keep]))
    return idx


def _signal_markers(scaled: np.ndarray, thresholds) -> np.ndarray:
    """Threshold-crossing labels per second, recomputable from the trace.

    A marker fires at the first second the scaled value sits beyond a
    threshold its previous value did not; in-markers win over out-markers
    when both fire at once.
    """
    labels = np.full(scaled.size, "", dtype=object)
    prev = np.concatenate([[0.0], scaled[:-1]])
    now = scaled
    in_long = (now > thresholds.in_long) & (prev <= thresholds.in_long)
    in_short = (now < thresholds.in_short) & (prev >= thresholds.in_short)
    out_long = (now < thresholds.out_long) & (prev >= thresholds.out_long)
    out_short = (now > thresholds.out_short) & (prev <= thresholds.out_short)
    labels[out_short] = "out_short"
    labels[out_long] = "out_long"
    labels[in_short] = "in_short"
    labels[in_long] = "in_long"
    return labels


def _day_files(plotdir: Path, trace: DayTrace, report: BacktestReport) -> None:
    config = report.config
    date = trace.date
    n = trace.raw.size
    markers = _signal_markers(trace.scaled, config.thresholds())
    marker_idx = np.nonzero(markers != "")[0]
    idx = _downsample_indices(n, config.plot_points, keep=marker_idx)

    seconds = trace.t_start + idx
    write_csv(
        plotdir / f"day_{date}_price.csv",
        ["t", "ask", "bid"],
        ((int(t), trace.ask[i], trace.bid[i]) for t, i in zip(seconds, idx) if trace.present[i]),
    )
    grid_rows = [("anchor_time", trace.grid_anchor)]
    grid_rows += [("starting_point", p) for p in trace.starting_points]
    grid_rows += [("slope", s) for s in trace.slopes]
    write_csv(plotdir / f"day_{date}_grid.csv", ["param", "value"], grid_rows)
    write_csv(
        plotdir / f"day_{date}_oscillator.csv",
        ["t", "raw", "scaled", "signal"],
        ((int(t), trace.raw[i], trace.scaled[i], markers[i]) for t, i in zip(seconds, idx)),
    )
    day_trades = [t for t in report.ledger if _entry_date(t) == date]
    write_csv(plotdir / f"day_{date}_trades.csv", TRADES_HEADER, (_trade_row(t) for t in day_trades))


def _entry_date(trade: TradeRecord) -> str:
    return datetime.fromtimestamp(trade.entry_time, tz=timezone.utc).strftime("%Y-%m-%d")


def emit_plot_data(report: BacktestReport, out_dir: Path, days: Sequence[str] | None = None) -> Path:
    """Write the plotdata/ bundle under ``out_dir``; returns the bundle dir.

    Raises TraceUnavailableError when per-day files are requested (or traces
    are implied by day selection) without trace recording enabled.
    """
    plotdir = Path(out_dir) / "plotdata"
    plotdir.mkdir(parents=True, exist_ok=True)

    write_monthly_csv(plotdir / "monthly_returns.csv", report)
    pps = np.array([t.profit_per_share for t in report.ledger], dtype=np.float64)
    durations = np.array([t.duration for t in report.ledger], dtype=np.float64)
    write_csv(plotdir / "profit_per_share_hist.csv", ["bin_left", "bin_right", "count"], histogram(pps))
    write_csv(plotdir / "duration_hist.csv", ["bin_left", "bin_right", "count"], histogram(durations))

    by_day = {day: 0 for day in report.traded_days}
    for trade in report.ledger:
        day = _entry_date(trade)
        if day in by_day:
            by_day[day] += 1
    counts = np.array([by_day[d] for d in report.traded_days], dtype=np.float64)
    if counts.size:
        edges = np.arange(counts.min(), counts.max() + 2) - 0.5
        hist, _ = np.histogram(counts, bins=edges)
        rows = [(float(edges[i]), float(edges[i + 1]), int(hist[i])) for i in range(len(hist))]
    else:
        rows = []
    write_csv(plotdir / "trades_per_day_hist.csv", ["bin_left", "bin_right", "count"], rows)

    write_csv(
        plotdir / "hourly_profile.csv",
        ["hour", "trade_count", "mean_profit_per_share"],
        report.hourly,
    )

    if days is not None and not report.traces:
        raise TraceUnavailableError("per-day plot data needs a run with --trace")
    selected = days if days is not None else sorted(report.traces)
    for date in selected:
        if date not in report.traces:
            raise TraceUnavailableError(f"no trace recorded for {date}")
        _day_files(plotdir, report.traces[date], report)
    return plotdir


def write_outputs(report: BacktestReport, out_dir: str | Path) -> Path:
    """Write report.json, trades.csv, monthly_returns.csv, equity.csv and
    the plotdata/ bundle; returns the output directory."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "report.json", "w", encoding="utf-8") as handle:
        json.dump(report.to_json_dict(), handle, indent=2, sort_keys=True)
        handle.write("\n")
    write_trades_csv(out / "trades.csv", report.ledger)
    write_monthly_csv(out / "monthly_returns.csv", report)
    write_csv(out / "equity.csv", ["t", "balance"], report.equity)
    emit_plot_data(report, out)
    return out
