"""Derives the golden fixture's expected ledger independently of the package.

Everything is recomputed from the raw tick CSVs with the brute-force
primitives in tests/reference.py: per-second resample, period summaries, the
parameter rules of thumb, per-line crossing sums, from-scratch window
averages, and the literal trading state machine. The only shared artifact
with the production pipeline is the fixture itself.
"""
from __future__ import annotations

import csv
import math
import sys
from datetime import datetime, timezone
from pathlib import Path

HERE = Path(__file__).resolve().parent
sys.path.insert(0, str(HERE.parent))  # tests/ for reference.py

import reference  # noqa: E402

FIXTURE_DIR = HERE.parent / "data" / "golden"

# Mirror of golden.cfg, kept in literals on purpose.
ZONE_START = 36000
ZONE_LEN = 1800
IN_LONG, OUT_LONG = 0.4, 0.1
BANDWIDTH = 120
MULTIPLICATOR = 20.0
N_POINTS = 40
N_FACTORS = 3
FALLBACK_SLOPE = 2e-6
FALLBACK_RANGE = 0.002
DELAY = 1
START_BALANCE = 10_000.0
DAYS = ["2024-03-04", "2024-03-05", "2024-03-06"]


def day_epoch(date: str) -> int:
    return int(datetime.strptime(date, "%Y-%m-%d").replace(tzinfo=timezone.utc).timestamp())


def read_ticks(path: Path) -> list[tuple[int, float, float]]:
    rows = []
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        next(reader)
        for row in reader:
            rows.append((int(row[0]), float(row[1]), float(row[2])))
    return rows


def resample(ticks, t_first: int, t_last: int):
    """Last tick strictly before each next second boundary; plus the quote
    one second before the interval."""
    ask, bid = [], []
    idx = -1
    for s in range(t_first, t_last + 1):
        while idx + 1 < len(ticks) and ticks[idx + 1][0] < (s + 1) * 1000:
            idx += 1
        if idx < 0:
            raise ValueError("fixture day must start with a pre-zone tick")
        ask.append(ticks[idx][1])
        bid.append(ticks[idx][2])
    prev = None
    for ts, a, b in ticks:
        if ts < t_first * 1000:
            prev = (a, b)
    return ask, bid, prev


def day_inputs(date: str):
    ticks = read_ticks(FIXTURE_DIR / "ticks" / f"{date}.csv")
    t0 = day_epoch(date) + ZONE_START
    ask, bid, prev = resample(ticks, t0, t0 + ZONE_LEN)
    return t0, ask, bid, prev


def summarize(prices):
    return max(prices), min(prices), prices[-1]


def grid_for(summary_prev, first_price):
    high, low, _close = summary_prev
    spread = high - low
    basic = (spread / ZONE_LEN) if spread > 0 else FALLBACK_SLOPE
    span = spread if spread > 0 else FALLBACK_RANGE
    step = 4.0 * span / N_POINTS
    points = [(first_price - 2.0 * span) + j * step for j in range(1, N_POINTS + 1)]
    slopes = []
    for k in range(1, N_FACTORS + 1):
        factor = math.tan(math.pi / 2.0 * k / 10.0)
        slopes.extend([basic * factor, -basic * factor])
    return points, slopes


def derive_ledger():
    """Expected trades with sizes and balances, day chain included."""
    summary_prev = None
    balance = START_BALANCE
    ledger = []
    for date in DAYS:
        t0, ask, bid, prev = day_inputs(date)
        if summary_prev is not None:
            points, slopes = grid_for(summary_prev, ask[0])
            prev_price = prev[0] if prev else None
            raw = reference.oscillator_trace(points, slopes, ask, prev_price, BANDWIDTH)
            scaled = [MULTIPLICATOR * r for r in raw]
            present = [True] * len(ask)
            trades = reference.trade_day(
                scaled, ask, bid, present, t0, IN_LONG, OUT_LONG, -IN_LONG, -OUT_LONG, delay=DELAY
            )
            for trade in trades:
                size = balance / trade["entry_price"]
                profit = trade["profit_per_share"] * size
                balance += profit
                ledger.append({**trade, "size": size, "profit": profit, "balance": balance})
        summary_prev = summarize(ask)
    return ledger, balance


def main() -> int:
    ledger, balance = derive_ledger()
    longs = sum(1 for t in ledger if t["side"] == "long")
    shorts = len(ledger) - longs
    print(f"{len(ledger)} trades ({longs} long / {shorts} short), final balance {balance:.5f}")
    for t in ledger:
        print(
            f"  {t['side']:5s} {t['entry_time']} -> {t['exit_time']} "
            f"pps={t['profit_per_share']:+.6f} profit={t['profit']:+.4f} [{t['exit_reason']}]"
        )
    return 0


if __name__ == "__main__":
    sys.exit(main())
