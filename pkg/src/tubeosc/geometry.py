"""Line grids, crossing detection, and the sliding-window crossing oscillator.

The indicator watches a fixed fan of straight lines: a uniform ladder of
starting prices anchored at the zone start, each ladder rung swept with a
family of positive and negative slopes. Every second it counts how many
lines the price crossed and in which direction, averages those counts per
slope over a trailing window, and averages across slopes with a sign flip so
that rising prices give positive values.

Two crossing computations exist on purpose: a per-line sum (the transparent
definition, kept as a test oracle) and a closed form that exploits the
uniform ladder spacing to count crossed rungs in O(1) per slope. Both use
the same tie rule, sign(0) = +1, i.e. a price exactly on a line counts as
"not above" it; with that rule the closed form is

    crossings(t) = below(t-1) - below(t),
    below(u) = #lines strictly below the price at u
             = clamp(ceil((price - slope*(u - anchor) - first_rung) / step))

and the two paths agree exactly, including when the price lands on a line.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import SequenceError


def sign_convention(x: float) -> int:
    """+1 for x >= 0, -1 otherwise: touching a line is "not above" it."""
    return 1 if x >= 0 else -1


@dataclass(frozen=True)
class Line:
    """Straight line through (anchor_time, anchor_price) with a fixed slope."""

    anchor_time: int
    anchor_price: float
    slope: float

    def value_at(self, t: float) -> float:
        return self.anchor_price + self.slope * (t - self.anchor_time)


def single_line_crossing(line: Line, t: int, s_prev: float, s_now: float) -> int:
    """Net crossing of one line between seconds t-1 and t.

    +1 when the price moved from above the line to below it, -1 for the
    opposite, 0 when it stayed on one side. Either the price or the line's
    own motion can produce the crossing.
    """
    now = sign_convention(line.value_at(t) - s_now)
    before = sign_convention(line.value_at(t - 1) - s_prev)
    return (now - before) // 2


@dataclass(frozen=True)
class LineGrid:
    """Uniform ladder of starting prices swept by sign-paired slopes.

    ``slopes`` alternate +basic*factor, -basic*factor per factor. Uniform
    rung spacing is required; it is what makes the O(1) crossing count
    possible, so irregular ladders are rejected outright.
    """

    anchor_time: int
    starting_points: np.ndarray
    slopes: np.ndarray
    grid_step: float = field(init=False)

    def __post_init__(self) -> None:
        points = np.asarray(self.starting_points, dtype=np.float64)
        slopes = np.asarray(self.slopes, dtype=np.float64)
        object.__setattr__(self, "starting_points", points)
        object.__setattr__(self, "slopes", slopes)
        if points.size < 2:
            raise ValueError("grid needs at least two starting points")
        diffs = np.diff(points)
        if np.any(diffs <= 0):
            raise ValueError("starting points must be strictly increasing")
        step = float(points[-1] - points[0]) / (points.size - 1)
        tol = 4.0 * np.finfo(np.float64).eps * max(abs(points[0]), abs(points[-1]), step)
        if np.max(np.abs(diffs - step)) > tol:
            raise ValueError("starting points must be uniformly spaced")
        object.__setattr__(self, "grid_step", step)
        if slopes.size == 0 or slopes.size % 2 != 0:
            raise ValueError("slopes must come in +/- pairs")
        pos, neg = slopes[0::2], slopes[1::2]
        if np.any(pos <= 0) or np.any(neg != -pos):
            raise ValueError("slopes must alternate +m, -m with m > 0")

    @classmethod
    def from_slope_factors(
        cls,
        anchor_time: int,
        starting_points: np.ndarray,
        basic_slope: float,
        slope_factors: np.ndarray,
    ) -> "LineGrid":
        """Build the sign-paired slope fan basic*factor, -basic*factor."""
        factors = np.asarray(slope_factors, dtype=np.float64)
        if basic_slope <= 0:
            raise ValueError("basic_slope must be > 0")
        if factors.size == 0 or np.any(factors <= 0):
            raise ValueError("slope factors must be positive")
        slopes = np.empty(2 * factors.size, dtype=np.float64)
        slopes[0::2] = basic_slope * factors
        slopes[1::2] = -basic_slope * factors
        return cls(anchor_time=anchor_time, starting_points=starting_points, slopes=slopes)

    @property
    def n_points(self) -> int:
        return int(self.starting_points.size)

    @property
    def n_slopes(self) -> int:
        return int(self.slopes.size)

    def lines_below(self, price: float, tau: float) -> np.ndarray:
        """Per-slope count of lines strictly below ``price`` at anchor offset tau."""
        x = (price - self.slopes * tau - self.starting_points[0]) / self.grid_step
        return np.clip(np.ceil(x), 0.0, float(self.n_points)).astype(np.int64)

    def lines_below_one(self, k: int, price: float, tau: float) -> int:
        x = (price - float(self.slopes[k]) * tau - float(self.starting_points[0])) / self.grid_step
        return int(min(float(self.n_points), max(0.0, math.ceil(x))))


def slope_crossing_count(grid: LineGrid, k: int, t: int, s_prev: float, s_now: float) -> int:
    """Net line crossings for slope ``k`` between seconds t-1 and t (fast path)."""
    tau = t - grid.anchor_time
    return grid.lines_below_one(k, s_prev, tau - 1) - grid.lines_below_one(k, s_now, tau)


def slope_crossing_count_brute(
    starting_points: np.ndarray,
    anchor_time: int,
    slope: float,
    t: int,
    s_prev: float,
    s_now: float,
) -> int:
    """Per-line crossing sum; works for arbitrary (non-uniform) ladders.

    Deliberately independent of the closed form above; kept as the oracle
    the fast path is tested against.
    """
    points = np.asarray(starting_points, dtype=np.float64)
    tau = t - anchor_time
    now = np.where(points + slope * tau - s_now >= 0, 1, -1)
    before = np.where(points + slope * (tau - 1) - s_prev >= 0, 1, -1)
    return int((now - before).sum() // 2)


def crossing_counts(grid: LineGrid, t: int, s_prev: float, s_now: float) -> np.ndarray:
    """All per-slope crossing counts for one second, via the fast path."""
    tau = t - grid.anchor_time
    return grid.lines_below(s_prev, tau - 1) - grid.lines_below(s_now, tau)


class OscillatorOutput(NamedTuple):
    raw: float
    scaled: float
    multiplicator: float


class OscillatorState:
    """Streaming window state: one ring buffer of crossing counts per slope.

    Counts stay integers; the divisions by window length and slope count
    happen only at read-out, so the maintained window sums are exact and a
    from-scratch recomputation matches bit for bit. Updates must arrive
    strictly one second at a time.
    """

    def __init__(self, grid: LineGrid, bandwidth: int, discount: float | None = None):
        if bandwidth < 1:
            raise ValueError("bandwidth must be >= 1")
        if discount is not None and not (0.0 < discount <= 1.0):
            raise ValueError("discount must lie in (0, 1]")
        self.grid = grid
        self.bandwidth = int(bandwidth)
        self.discount = None if discount == 1.0 else discount
        self.current_time = grid.anchor_time - 1
        self._ring = np.zeros((grid.n_slopes, self.bandwidth), dtype=np.int64)
        self._sums = np.zeros(grid.n_slopes, dtype=np.int64)
        self._pos = 0
        self._prev_counts: np.ndarray | None = None
        self._prev_price: float | None = None
        if self.discount is not None:
            self._weights = self.discount ** np.arange(self.bandwidth, dtype=np.float64)

    def update(self, t: int, s_prev: float, s_now: float, multiplicator: float = 1.0) -> OscillatorOutput:
        """Advance one second with both prices known."""
        self._check_time(t)
        tau = t - self.grid.anchor_time
        if self._prev_counts is not None and s_prev == self._prev_price:
            before = self._prev_counts
        else:
            before = self.grid.lines_below(s_prev, tau - 1)
        now = self.grid.lines_below(s_now, tau)
        self._push(before - now)
        self._prev_counts = now
        self._prev_price = s_now
        self.current_time = t
        return self._read(multiplicator)

    def update_gap(self, t: int, price: float | None = None, multiplicator: float = 1.0) -> OscillatorOutput:
        """Advance one second with no crossing information (absent data).

        Passing the price of a freshly appeared quote primes the cache so the
        next update can treat it as the previous second's price.
        """
        self._check_time(t)
        self._push(np.zeros(self.grid.n_slopes, dtype=np.int64))
        if price is None:
            self._prev_counts = None
            self._prev_price = None
        else:
            self._prev_counts = self.grid.lines_below(price, t - self.grid.anchor_time)
            self._prev_price = price
        self.current_time = t
        return self._read(multiplicator)

    def window_sums(self) -> np.ndarray:
        return self._sums.copy()

    def _check_time(self, t: int) -> None:
        if t != self.current_time + 1:
            raise SequenceError(f"expected second {self.current_time + 1}, got {t}")

    def _push(self, counts: np.ndarray) -> None:
        self._sums += counts - self._ring[:, self._pos]
        self._ring[:, self._pos] = counts
        self._pos = (self._pos + 1) % self.bandwidth
        if __debug__ and self._pos == 0:
            assert np.array_equal(self._sums, self._ring.sum(axis=1))

    def _read(self, multiplicator: float) -> OscillatorOutput:
        denom = float(self.grid.n_slopes * self.bandwidth)
        if self.discount is None:
            raw = -float(self._sums.sum()) / denom
        else:
            order = (self._pos - 1 - np.arange(self.bandwidth)) % self.bandwidth
            raw = -float((self._ring[:, order] @ self._weights).sum()) / denom
        return OscillatorOutput(raw=raw, scaled=multiplicator * raw, multiplicator=multiplicator)


def reset_for_period(grid: LineGrid, bandwidth: int, discount: float | None = None) -> OscillatorState:
    """Fresh zeroed state for a period; the first update is due at the anchor.

    Seconds before the zone contribute zero crossings, so the window behaves
    as if zero-padded during warm-up.
    """
    return OscillatorState(grid, bandwidth, discount)


def day_crossing_matrix(
    grid: LineGrid,
    prices: np.ndarray,
    present: np.ndarray,
    prev_price: float | None,
) -> np.ndarray:
    """(n_slopes, n_seconds) crossing counts for a whole zone at once.

    ``prices[i]`` is the signal price at anchor offset i; ``prev_price`` is
    the forward-filled price one second before the anchor, if any exists.
    Seconds without a known current or previous price yield zero counts.
    """
    prices = np.asarray(prices, dtype=np.float64)
    present = np.asarray(present, dtype=bool)
    n = prices.size
    counts = np.zeros((grid.n_slopes, n), dtype=np.int64)
    if not present.any():
        return counts
    first = int(np.argmax(present))
    filled = prices.copy()
    if first > 0:
        filled[:first] = prices[first]
    tau = np.arange(n, dtype=np.float64)
    s1 = float(grid.starting_points[0])
    step = grid.grid_step
    n_points = float(grid.n_points)
    for k in range(grid.n_slopes):
        slope = float(grid.slopes[k])
        x = (filled - slope * tau - s1) / step
        below = np.clip(np.ceil(x), 0.0, n_points).astype(np.int64)
        counts[k, 1:] = below[:-1] - below[1:]
        if prev_price is not None:
            x0 = (prev_price - slope * -1.0 - s1) / step
            below_prev = int(min(n_points, max(0.0, math.ceil(x0))))
            counts[k, 0] = below_prev - below[0]
    counts[:, ~present] = 0
    if first > 0 or prev_price is None:
        counts[:, first] = 0
    return counts


def day_oscillator(
    grid: LineGrid,
    prices: np.ndarray,
    present: np.ndarray,
    prev_price: float | None,
    bandwidth: int,
    discount: float | None = None,
) -> np.ndarray:
    """Raw oscillator trace over a whole zone, window semantics as streaming.

    Equals driving OscillatorState second by second: exactly for the plain
    window, to rounding for the discounted one.
    """
    counts = day_crossing_matrix(grid, prices, present, prev_price)
    denom = float(grid.n_slopes * bandwidth)
    if discount is None or discount == 1.0:
        cum = np.cumsum(counts, axis=1)
        window = cum.copy()
        window[:, bandwidth:] -= cum[:, :-bandwidth]
        return -window.sum(axis=0).astype(np.float64) / denom
    weights = discount ** np.arange(bandwidth, dtype=np.float64)
    n = counts.shape[1]
    total = np.zeros(n, dtype=np.float64)
    for k in range(counts.shape[0]):
        total += np.convolve(counts[k].astype(np.float64), weights)[:n]
    return -total / denom
