"""Acceptance suite: one test per release criterion, tolerances pinned.

Run with ``pytest tests/test_acceptance.py -v`` to get one pass/fail line
per criterion.
"""
import json
import math
import sys
import time
from pathlib import Path

import numpy as np
import pytest

import reference
from helpers import GRID_STEP, LATTICE, random_grid, random_walk
from tubeosc.backtest import run_backtest
from tubeosc.cli import main as cli_main
from tubeosc.config import load_config
from tubeosc.engine import Thresholds, TradingEngine, run_period
from tubeosc.errors import DegenerateVarianceError
from tubeosc.geometry import (
    LineGrid,
    crossing_counts,
    day_oscillator,
    reset_for_period,
    slope_crossing_count_brute,
)
from tubeosc.metrics import MonthlyReturn, risk_free_monthly, sharpe, trade_stats

TESTS_DIR = Path(__file__).resolve().parent
sys.path.insert(0, str(TESTS_DIR / "tools"))

import golden_reference  # noqa: E402

GOLDEN_FIXTURE = TESTS_DIR / "data" / "golden"
GOLDEN_FROZEN = TESTS_DIR / "golden"


def brute_counts_for_walk(grid, prices, prev):
    """Vectorized per-line oracle: sign sums for every slope and second."""
    full = np.concatenate([[prev], prices])
    taus = np.arange(-1, prices.size, dtype=np.float64)
    out = np.empty((grid.n_slopes, prices.size), dtype=np.int64)
    for k in range(grid.n_slopes):
        values = grid.starting_points[:, None] + grid.slopes[k] * taus[None, :] - full[None, :]
        signs = np.where(values >= 0.0, 1, -1)
        out[k] = (signs[:, 1:] - signs[:, :-1]).sum(axis=0) // 2
    return out


def test_criterion_crossing_oracle_equivalence():
    """10,000 random (grid, walk) instances: fast path == per-line brute, exactly."""
    rng = np.random.default_rng(2024)
    n_instances = 10_000
    walk_len = 20
    started = time.perf_counter()
    for i in range(n_instances):
        grid = random_grid(rng)
        prices, prev = random_walk(rng, grid, walk_len, tie_free=bool(i % 2))
        brute = brute_counts_for_walk(grid, prices, prev)
        for j in range(walk_len):
            s_prev = prev if j == 0 else float(prices[j - 1])
            fast = crossing_counts(grid, grid.anchor_time + j, s_prev, float(prices[j]))
            assert np.array_equal(fast, brute[:, j]), f"instance {i}, second {j}"
    elapsed = time.perf_counter() - started
    assert elapsed < 30.0, f"oracle equivalence took {elapsed:.1f}s"
    print(f"crossing oracle equivalence: PASS ({n_instances} instances in {elapsed:.1f}s)")


def test_criterion_crossing_oracle_scalar_spotchecks():
    """The scalar brute path agrees too, including on deliberate line hits."""
    rng = np.random.default_rng(2025)
    for _ in range(500):
        grid = random_grid(rng)
        prices, prev = random_walk(rng, grid, 6, tie_free=False)
        for j in range(6):
            s_prev = prev if j == 0 else float(prices[j - 1])
            fast = crossing_counts(grid, grid.anchor_time + j, s_prev, float(prices[j]))
            for k in range(grid.n_slopes):
                brute = slope_crossing_count_brute(
                    grid.starting_points, grid.anchor_time, float(grid.slopes[k]),
                    grid.anchor_time + j, s_prev, float(prices[j]),
                )
                assert fast[k] == brute
    print("crossing oracle scalar spot-checks: PASS")


def test_criterion_oscillator_zero_law():
    """Paths that cross nothing leave the oscillator at exactly zero."""
    rng = np.random.default_rng(11)
    instances = 1000
    for _ in range(instances):
        n_points = int(rng.integers(4, 40))
        points = 100.0 + np.arange(n_points) * GRID_STEP
        grid = LineGrid.from_slope_factors(0, points, LATTICE / 64.0, np.array([1.0]))
        n = 20
        wiggle = rng.integers(-2, 3, size=n).astype(np.float64) * (LATTICE / 2.0)
        prices = 100.125 + wiggle
        state = reset_for_period(grid, 6)
        for i in range(n):
            s_prev = 100.125 if i == 0 else float(prices[i - 1])
            assert state.update(i, s_prev, float(prices[i])).raw == 0.0
    print(f"zero law: PASS ({instances} instances)")


def test_criterion_oscillator_reflection_antisymmetry():
    """Mirroring the path about the grid center negates the trace exactly."""
    rng = np.random.default_rng(12)
    instances = 1000
    for _ in range(instances):
        grid = random_grid(rng, max_points=24, max_factors=3)
        center = float(grid.starting_points[0] + grid.starting_points[-1]) / 2.0
        n = 16
        prices, prev = random_walk(rng, grid, n, tie_free=True)
        state_a = reset_for_period(grid, 5)
        state_b = reset_for_period(grid, 5)
        for i in range(n):
            pa = prev if i == 0 else float(prices[i - 1])
            pb = 2.0 * center - pa
            ra = state_a.update(grid.anchor_time + i, pa, float(prices[i])).raw
            rb = state_b.update(grid.anchor_time + i, pb, float(2.0 * center - prices[i])).raw
            assert rb == -ra
    print(f"reflection antisymmetry: PASS ({instances} instances)")


def test_criterion_oscillator_telescoping():
    """Crossing counts over same-gap round trips sum to exactly zero."""
    rng = np.random.default_rng(13)
    checked = 0
    attempts = 0
    while checked < 1000 and attempts < 4000:
        attempts += 1
        grid = random_grid(rng, max_points=24, max_factors=3)
        n = 30
        prices, prev = random_walk(rng, grid, n, tie_free=True)
        brute = brute_counts_for_walk(grid, prices, prev)
        full = np.concatenate([[prev], prices])
        for k in range(grid.n_slopes):
            gaps = [grid.lines_below_one(k, float(full[j]), j - 1) for j in range(n + 1)]
            for a in range(1, n):
                hits = [b for b in range(a, n) if gaps[b] == gaps[a - 1]]
                if hits:
                    b = hits[-1]
                    assert brute[k, a - 1 : b].sum() == 0
                    checked += 1
                    break
    assert checked >= 1000
    print(f"telescoping: PASS ({checked} interval checks)")


def test_criterion_oscillator_boundedness():
    """|raw| never exceeds the number of grid starting points."""
    rng = np.random.default_rng(14)
    instances = 1000
    for _ in range(instances):
        grid = random_grid(rng, max_points=24, max_factors=3)
        n = 20
        prices, prev = random_walk(rng, grid, n)
        state = reset_for_period(grid, int(rng.integers(1, 8)))
        for i in range(n):
            s_prev = prev if i == 0 else float(prices[i - 1])
            out = state.update(grid.anchor_time + i, s_prev, float(prices[i]))
            assert abs(out.raw) <= grid.n_points
    print(f"boundedness: PASS ({instances} instances)")


def test_criterion_oscillator_window_correctness():
    """Incrementally maintained window sums equal from-scratch sums exactly."""
    rng = np.random.default_rng(15)
    instances = 1000
    for _ in range(instances):
        grid = random_grid(rng, max_points=20, max_factors=2)
        bandwidth = int(rng.integers(2, 9))
        n = 24
        prices, prev = random_walk(rng, grid, n)
        history = []
        state = reset_for_period(grid, bandwidth)
        check_at = set(rng.integers(0, n, size=4).tolist())
        for i in range(n):
            s_prev = prev if i == 0 else float(prices[i - 1])
            counts = crossing_counts(grid, grid.anchor_time + i, s_prev, float(prices[i]))
            history.append(counts)
            out = state.update(grid.anchor_time + i, s_prev, float(prices[i]))
            if i in check_at:
                scratch = np.sum(history[max(0, i - bandwidth + 1) :], axis=0)
                assert np.array_equal(state.window_sums(), scratch)
                denom = float(grid.n_slopes * bandwidth)
                assert out.raw == -float(scratch.sum()) / denom
    print(f"window correctness: PASS ({instances} instances)")


def _ramp_instance(sign, n_points, step, bandwidth, rate, warm=None):
    points = 100.0 + np.arange(n_points) * step
    grid = LineGrid.from_slope_factors(0, points, LATTICE, np.array([0.25, 0.5, 0.75]))
    n = 3 * bandwidth
    start = float(points[n_points // 2]) + step / 2.0 - sign * rate * n / 2.0
    prices = start + sign * rate * np.arange(1, n + 1)
    prev = start
    raw = day_oscillator(grid, prices, np.ones(n, dtype=bool), prev, bandwidth)
    return raw


def test_criterion_ramp_sign_and_flip_latency():
    """Ramps crossing the grid force the oscillator's sign; flips are seen
    within one window length."""
    for sign in (+1, -1):
        for rate, bandwidth in ((GRID_STEP / 4.0, 16), (GRID_STEP / 8.0, 24)):
            raw = _ramp_instance(sign, 200, GRID_STEP, bandwidth, rate)
            tail = raw[bandwidth:]
            assert np.all(np.sign(tail) == sign), (sign, rate, bandwidth)

    # V-shaped flip: down leg then up leg, detection within one bandwidth
    rng = np.random.default_rng(16)
    worst = 0
    for _ in range(100):
        bandwidth = int(rng.integers(8, 24))
        rate = GRID_STEP / float(rng.choice([2, 4]))
        n_leg = 2 * bandwidth
        points = 100.0 + np.arange(400) * GRID_STEP
        grid = LineGrid.from_slope_factors(0, points, LATTICE, np.array([0.25, 0.5]))
        apex = float(points[200]) + GRID_STEP / 2.0 + rate * n_leg
        down = apex - rate * np.arange(1, n_leg + 1)
        up = down[-1] + rate * np.arange(1, n_leg + 1)
        prices = np.concatenate([down, up])
        raw = day_oscillator(grid, prices, np.ones(prices.size, dtype=bool), apex, bandwidth)
        assert np.all(np.sign(raw[bandwidth:n_leg]) == -1)
        flip_at = n_leg
        after = np.sign(raw[flip_at:])
        first_positive = int(np.argmax(after == 1))
        assert after[first_positive] == 1
        assert first_positive <= bandwidth
        assert np.all(after[bandwidth:] == 1)
        worst = max(worst, first_positive)
    print(f"ramp sign + flip latency: PASS (worst latency {worst} s <= bandwidth)")


def test_criterion_trading_state_machine():
    """1000 random traces: single position, period-end flat, spread identity,
    threshold monotonicity, balance conservation."""
    rng = np.random.default_rng(17)
    spread = 3e-4
    frozen_spread = 1.0 / 4096.0  # dyadic so ask - bid is exact
    traces = 1000
    for i in range(traces):
        n = 150
        scaled = np.cumsum(rng.normal(0.0, 0.3, size=n))
        scaled -= scaled.mean()
        frozen = bool(i % 5 == 0)
        if frozen:
            ask = np.full(n, 1.25 + frozen_spread)
            bid = np.full(n, 1.25)
        else:
            mid = 1.10 + np.cumsum(rng.normal(0.0, 2e-4, size=n))
            ask, bid = mid + spread / 2.0, mid - spread / 2.0
        present = np.ones(n, dtype=bool)

        long_counts = []
        for in_long in (0.3, 0.5, 0.7):
            engine = TradingEngine(Thresholds.symmetric(in_long, 0.1), start_balance=7000.0)
            trades = run_period(engine, 0, scaled, ask, bid, present)
            # (a) single position <=> trades never overlap; (b) closed by end
            assert engine.position is None
            for first, second in zip(trades, trades[1:]):
                assert second.entry_time >= first.exit_time
            for trade in trades:
                assert trade.exit_time <= n - 1
            # (e) balance conservation at 1e-9 relative
            expected = 7000.0 + sum(t.profit for t in trades)
            assert engine.account.balance == pytest.approx(expected, rel=1e-9)
            # (c) every round trip on frozen quotes loses exactly one spread
            if frozen:
                for trade in trades:
                    assert trade.profit_per_share == -frozen_spread
            long_counts.append(sum(1 for t in trades if t.side == "long"))
        # (d) raising in_long never increases long entries
        assert long_counts[0] >= long_counts[1] >= long_counts[2]
    print(f"trading state machine: PASS ({traces} traces x 3 thresholds)")


def test_criterion_metrics_oracles():
    """Hand-computed Sharpe/rf/MAD fixtures at their stated tolerances."""
    months = [MonthlyReturn("2024-01", 0.01, 0.0), MonthlyReturn("2024-02", 0.03, 0.0)]
    sr_m, sr_y = sharpe(months)
    assert sr_m == pytest.approx(1.41421356237309515, abs=1e-9)
    assert sr_y == pytest.approx(math.sqrt(12.0) * 1.41421356237309515, abs=1e-9)
    assert sr_y / sr_m == pytest.approx(math.sqrt(12.0), rel=1e-15)

    with pytest.raises(DegenerateVarianceError):
        sharpe([MonthlyReturn("2024-01", 0.02, 0.0), MonthlyReturn("2024-02", 0.02, 0.0)])

    rows = [(f"2024-01-{d:02d}", 4.8) for d in range(1, 21)]
    assert risk_free_monthly(rows, ["2024-01"])["2024-01"] == 0.004

    from test_metrics import trade as make_trade

    ledger = [make_trade(duration=10, profit=2.0), make_trade(duration=20, profit=-1.0),
              make_trade(duration=120, profit=-1.0)]
    stats = trade_stats(ledger, ["2024-01-01"])
    assert stats.win_rate == pytest.approx(100.0 / 3.0, abs=1e-12)
    assert stats.duration_mean == pytest.approx(50.0, abs=1e-12)
    assert stats.duration_median == pytest.approx(20.0, abs=1e-12)
    assert stats.duration_mad == pytest.approx(36.666666666666664, abs=1e-12)
    assert stats.duration_sd == pytest.approx(60.8276253029822, abs=1e-10)
    print("metrics oracles: PASS")


def test_criterion_golden_fixture_byte_identical(tmp_path):
    """The three-day fixture reproduces the frozen ledger and report exactly,
    and the frozen ledger matches the independent brute-force derivation."""
    out = tmp_path / "run"
    code = cli_main(
        ["--config", str(GOLDEN_FIXTURE / "golden.cfg"), "--out", str(out), "--trace",
         "--plot-points", "0", "-q"]
    )
    assert code == 0
    assert (out / "trades.csv").read_bytes() == (GOLDEN_FROZEN / "trades.csv").read_bytes()
    assert (out / "report.json").read_bytes() == (GOLDEN_FROZEN / "report.json").read_bytes()

    expected, expected_balance = golden_reference.derive_ledger()
    got = json.loads((out / "report.json").read_text())
    rows = (out / "trades.csv").read_text().splitlines()[1:]
    assert len(rows) == len(expected)
    for row, want in zip(rows, expected):
        entry_t, exit_t, side, entry_p, exit_p, size, profit, pps, duration, reason = row.split(",")
        assert int(entry_t) == want["entry_time"]
        assert int(exit_t) == want["exit_time"]
        assert side == want["side"]
        assert float(entry_p) == want["entry_price"]
        assert float(exit_p) == want["exit_price"]
        assert float(size) == want["size"]
        assert float(profit) == want["profit"]
        assert float(pps) == want["profit_per_share"]
        assert int(duration) == want["duration"]
        assert reason == want["exit_reason"]
    assert got["balance"]["final"] == expected_balance

    # V day trades both sides with the 0.4/0.1 thresholds
    v_day_trades = [w for w in expected if w["entry_time"] < golden_reference.day_epoch("2024-03-06")]
    assert {w["side"] for w in v_day_trades} == {"long", "short"}
    print(f"golden fixture: PASS ({len(expected)} trades, byte-identical)")


def _write_big_day(tmp_path):
    from helpers import write_backtest_fixture

    rng = np.random.default_rng(99)
    n = 32_400 + 1
    warm = 1.0950 + 0.01 * np.abs((np.arange(n) % 1200) / 600.0 - 1.0)
    steps = rng.integers(-6, 7, size=n).astype(np.float64) * (1.0 / 16384.0)
    big = 1.1000 + np.cumsum(steps)
    config_lines = [
        "zone_start = 09:00",
        "zone_length = 32400",
        "in_long = 0.4",
        "out_long = 0.1",
        "bandwidth = 300",
        "multiplicator = 20",
        "n_starting_points = 300",
        "n_slope_factors = 9",
    ]
    days = [
        ("2024-03-04", 32400, warm, {}),
        ("2024-03-05", 32400, big, {}),
    ]
    return write_backtest_fixture(tmp_path, days, config_lines)


def test_criterion_determinism_and_performance(tmp_path):
    """Full-size day under one second; byte-identical across reruns and
    worker counts."""
    config_path = _write_big_day(tmp_path)

    config = load_config(config_path)
    started = time.perf_counter()
    report = run_backtest(config)
    elapsed = time.perf_counter() - started
    assert report.traded_days == ["2024-03-05"]
    assert elapsed < 1.0, f"full-size day took {elapsed:.2f}s"

    outs = []
    for name, jobs in (("r1", "1"), ("r2", "1"), ("r3", "4")):
        out = tmp_path / name
        code = cli_main(
            ["--config", str(config_path), "--out", str(out), "--trace", "--jobs", jobs, "-q"]
        )
        assert code == 0
        outs.append(out)
    names = ["report.json", "trades.csv", "monthly_returns.csv", "equity.csv"]
    names += [f"plotdata/{p.name}" for p in sorted((outs[0] / "plotdata").iterdir())]
    for name in names:
        first = (outs[0] / name).read_bytes()
        assert (outs[1] / name).read_bytes() == first, name
        assert (outs[2] / name).read_bytes() == first, name
    print(
        f"determinism & performance: PASS (day computed in {elapsed * 1000:.0f} ms, "
        f"{len(names)} files byte-identical across reruns and jobs)"
    )
