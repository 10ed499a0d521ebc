"""Shared builders for randomized test instances.

All random prices, slopes and grid rungs live on dyadic lattices (1/64 or
finer) so float arithmetic is exact; the fast crossing path and the
brute-force per-line path then either agree exactly or genuinely disagree.
``tie_free=True`` shifts prices half a lattice step off the rungs so no
price ever lands exactly on a line.
"""
from __future__ import annotations

import numpy as np

from tubeosc.geometry import LineGrid

LATTICE = 1.0 / 64.0
TIE_BREAK = 1.0 / 512.0
GRID_STEP = 0.25


def random_grid(rng: np.random.Generator, max_points: int = 40, max_factors: int = 4) -> LineGrid:
    n_points = int(rng.integers(2, max_points + 1))
    n_factors = int(rng.integers(1, max_factors + 1))
    first = float(rng.integers(300, 400)) * GRID_STEP
    points = first + np.arange(n_points) * GRID_STEP
    factors = rng.integers(1, 7, size=n_factors).astype(np.float64) / 4.0
    return LineGrid.from_slope_factors(
        anchor_time=int(rng.integers(0, 1000)),
        starting_points=points,
        basic_slope=LATTICE,
        slope_factors=factors,
    )


def random_walk(
    rng: np.random.Generator,
    grid: LineGrid,
    n_seconds: int,
    tie_free: bool = False,
) -> tuple[np.ndarray, float]:
    """(prices over the zone, price one second before the anchor)."""
    lo = float(grid.starting_points[0])
    hi = float(grid.starting_points[-1])
    start = (lo + hi) / 2.0
    steps = rng.integers(-10, 11, size=n_seconds + 1).astype(np.float64) * LATTICE
    path = start + np.cumsum(steps)
    if tie_free:
        path = path + TIE_BREAK
    return path[1:], float(path[0])


def write_day_ticks(path, date: str, zone_start: int, mids, spread=2e-4, cadence=1, pre_zone=True):
    """Tick CSV for one synthetic day; ``mids[i]`` is the mid at zone second i."""
    from datetime import datetime, timezone

    day_epoch = int(datetime.strptime(date, "%Y-%m-%d").replace(tzinfo=timezone.utc).timestamp())
    t0_ms = (day_epoch + zone_start) * 1000
    lines = ["timestamp,ask,bid"]
    if pre_zone:
        mid = round(float(mids[0]), 6)
        lines.append(f"{t0_ms - 30_000},{mid + spread / 2:.6f},{mid - spread / 2:.6f}")
    for i in range(0, len(mids), cadence):
        mid = round(float(mids[i]), 6)
        lines.append(f"{t0_ms + i * 1000 + 100},{mid + spread / 2:.6f},{mid - spread / 2:.6f}")
    path.write_text("\n".join(lines) + "\n")


def wiggle_day(n: int, low: float, high: float, period: int = 120) -> np.ndarray:
    """Deterministic zig-zag touching both bounds: a usable warm-up day."""
    half = (high - low) / 2.0
    mid = low + half
    saw = np.abs(((np.arange(n) % period) / period) * 2.0 - 1.0) * 2.0 - 1.0
    out = mid + half * saw
    out[0] = high
    out[1] = low
    return out


def v_day(n: int, top: float, bottom: float) -> np.ndarray:
    """Fall to the bottom at the midpoint, then recover slightly higher."""
    half = n // 2
    down = np.linspace(top, bottom, half)
    up = np.linspace(bottom, top + (top - bottom) * 0.1, n - half)
    return np.concatenate([down, up])


def write_backtest_fixture(root, days, config_lines, manifest_name="days.txt", section="synthetic"):
    """Write tick files, manifest and config; returns the config path."""
    ticks_dir = root / "ticks"
    ticks_dir.mkdir(exist_ok=True)
    manifest_rows = []
    for date, zone_start, mids, kwargs in days:
        file_path = ticks_dir / f"{date}.csv"
        write_day_ticks(file_path, date, zone_start, mids, **kwargs)
        manifest_rows.append(f"{date} ticks/{date}.csv")
    (root / manifest_name).write_text("\n".join(manifest_rows) + "\n")
    config_path = root / "backtest.cfg"
    body = "\n".join([f"[{section}]", f"manifest = {manifest_name}"] + config_lines)
    config_path.write_text(body + "\n")
    return config_path
