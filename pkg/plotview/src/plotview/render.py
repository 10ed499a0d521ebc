"""Figure building: per-day price/oscillator panels and the summary grid.

Blue means long, orange means short, grey is the line grid; profit labels
are green when positive and red when negative. Trade segments carry gids of
the form ``trade:<side>:<i>`` so their endpoints stay machine-checkable
against the trade ledger.
"""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "plotview"

import numpy as np
from matplotlib.collections import LineCollection
from matplotlib.figure import Figure
from matplotlib.ticker import FuncFormatter

from .bundle import PlotBundle

LONG_COLOR = "#1f77b4"
SHORT_COLOR = "#ff7f0e"
GRID_COLOR = "0.82"
WIN_COLOR = "#2ca02c"
LOSS_COLOR = "#d62728"


def _clock_formatter():
    def fmt(x, _pos):
        seconds = int(x) % 86400
        return f"{seconds // 3600:02d}:{(seconds % 3600) // 60:02d}"

    return FuncFormatter(fmt)


def _downsample(rows, limit):
    if limit <= 0 or len(rows) <= limit:
        return rows
    idx = np.unique(np.round(np.linspace(0, len(rows) - 1, limit)).astype(int))
    return [rows[i] for i in idx]


def build_day_figure(bundle: PlotBundle, date: str) -> Figure:
    """Two panels: ask price with grid and trade segments, oscillator below."""
    price_rows = bundle.day_price(date)
    osc_rows = bundle.day_oscillator(date)
    grid = bundle.day_grid(date)
    trades = bundle.day_trades(date)
    thresholds = bundle.thresholds()

    fig = Figure(figsize=bundle.style.day_figsize)
    ax_price, ax_osc = fig.subplots(2, 1, sharex=True, height_ratios=[2, 1])

    t_first = osc_rows[0][0]
    t_last = osc_rows[-1][0]
    span = t_last - grid.anchor_time
    segments = [
        ((grid.anchor_time, p), (t_last, p + m * span))
        for p in grid.starting_points
        for m in grid.slopes
    ]
    ax_price.add_collection(LineCollection(segments, colors=GRID_COLOR, linewidths=0.4, zorder=1))

    shown_price = _downsample(price_rows, bundle.style.downsample)
    ax_price.plot(
        [r[0] for r in shown_price],
        [r[1] for r in shown_price],
        color="black",
        linewidth=0.8,
        zorder=2,
        label="ask",
    )

    for i, trade in enumerate(trades):
        color = LONG_COLOR if trade["side"] == "long" else SHORT_COLOR
        line = ax_price.plot(
            [trade["entry_time"], trade["exit_time"]],
            [trade["entry_price"], trade["exit_price"]],
            color=color,
            linewidth=2.0,
            zorder=3,
        )[0]
        line.set_gid(f"trade:{trade['side']}:{i}")
        mid_t = (trade["entry_time"] + trade["exit_time"]) / 2.0
        mid_p = (trade["entry_price"] + trade["exit_price"]) / 2.0
        profit = trade["profit"]
        ax_price.annotate(
            f"{profit:+.2f}",
            (mid_t, mid_p),
            color=WIN_COLOR if profit > 0 else LOSS_COLOR,
            fontsize=7,
            textcoords="offset points",
            xytext=(0, 5),
        )

    prices = [r[1] for r in price_rows]
    if prices:
        lo, hi = min(prices), max(prices)
        pad = (hi - lo) * 0.15 or 1e-4
        ax_price.set_ylim(lo - pad, hi + pad)
    ax_price.set_xlim(t_first, t_last)
    ax_price.set_ylabel("price")
    ax_price.set_title(date)

    shown_osc = _downsample(osc_rows, bundle.style.downsample)
    ax_osc.plot(
        [r[0] for r in shown_osc],
        [r[2] for r in shown_osc],
        color="black",
        linewidth=0.7,
        zorder=2,
    )
    markers = {"in_long": LONG_COLOR, "in_short": SHORT_COLOR}
    for signal, color in markers.items():
        pts = [(t, scaled) for t, _raw, scaled, s in osc_rows if s == signal]
        if pts:
            dots = ax_osc.plot(
                [p[0] for p in pts], [p[1] for p in pts], ".", color=color, markersize=5, zorder=3
            )[0]
            dots.set_gid(f"signals:{signal}")
    if thresholds:
        for name, value in thresholds.items():
            ax_osc.axhline(value, color="0.6", linewidth=0.6, linestyle="--", zorder=1)
            ax_osc.annotate(name, (t_first, value), fontsize=6, color="0.4")
    ax_osc.set_ylabel("oscillator (scaled)")
    ax_osc.set_xlabel("time")
    ax_osc.xaxis.set_major_formatter(_clock_formatter())
    fig.tight_layout()
    return fig


def _bar_from_hist(ax, hist, color="0.4", log=False):
    rows = [(a, b, c) for a, b, c in hist if not log or c > 0]
    lefts = [a for a, _b, _c in rows]
    widths = [b - a for a, b, _c in rows]
    counts = [c for _a, _b, c in rows]
    bars = ax.bar(lefts, counts, width=widths, align="edge", color=color, edgecolor="white", linewidth=0.3)
    if log and counts:
        ax.set_yscale("log")
    return bars


def build_summary_figure(bundle: PlotBundle) -> Figure:
    """Six panels: hourly counts, trades/day, duration, hourly profit/share,
    log-histogram of profit/share, monthly returns."""
    fig = Figure(figsize=bundle.style.summary_figsize)
    axes = fig.subplots(3, 2)
    hourly = bundle.hourly_profile()

    ax = axes[0][0]
    ax.bar([h for h, _c, _p in hourly], [c for _h, c, _p in hourly], color="0.4")
    ax.set_title("trades by entry hour")
    ax.set_xlabel("hour")

    ax = axes[0][1]
    _bar_from_hist(ax, bundle.histogram("trades_per_day_hist.csv"))
    ax.set_title("trades per day")

    ax = axes[1][0]
    _bar_from_hist(ax, bundle.histogram("duration_hist.csv"))
    ax.set_title("position holding time (s)")

    ax = axes[1][1]
    ax.bar([h for h, _c, _p in hourly], [p for _h, _c, p in hourly], color="0.4")
    ax.set_title("mean profit/share by entry hour")
    ax.set_xlabel("hour")

    ax = axes[2][0]
    bars = _bar_from_hist(ax, bundle.histogram("profit_per_share_hist.csv"), log=True)
    for patch in bars:
        patch.set_gid("pps-hist")
    ax.set_title("profit/share per trade (log counts)")

    ax = axes[2][1]
    monthly = bundle.monthly_returns()
    ax.bar(range(len(monthly)), [100.0 * r for _m, r, _rf in monthly], color="0.4")
    ax.set_xticks(range(len(monthly)))
    ax.set_xticklabels([m for m, _r, _rf in monthly], rotation=90, fontsize=6)
    ax.set_title("monthly returns (%)")
    for patch in ax.patches:
        patch.set_gid("monthly-bar")

    fig.tight_layout()
    return fig


def save_figure(fig: Figure, out_base: Path) -> list[Path]:
    """PNG and SVG side by side; SVG output is byte-stable across reruns."""
    out_base.parent.mkdir(parents=True, exist_ok=True)
    png = out_base.with_suffix(".png")
    svg = out_base.with_suffix(".svg")
    fig.savefig(png, dpi=120)
    fig.savefig(svg, metadata={"Date": None})
    return [png, svg]


def render_day(bundle: PlotBundle, date: str) -> list[Path]:
    fig = build_day_figure(bundle, date)
    return save_figure(fig, bundle.out_dir / f"day_{date}")


def render_summary(bundle: PlotBundle) -> list[Path]:
    fig = build_summary_figure(bundle)
    return save_figure(fig, bundle.out_dir / "summary")
