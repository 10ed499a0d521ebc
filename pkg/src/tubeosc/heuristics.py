"""Rules of thumb that turn yesterday's price action into oscillator params.

None of these are fitted: the basic slope is yesterday's range over the zone
length, slope factors fan out along a tangent schedule, and the starting
ladder brackets today's first price by a multiple of yesterday's range.
Every value can be overridden in the backtest config.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateRangeError, RangeError
from .timebase import PeriodSummary

DEFAULT_BANDWIDTH = 300
DEFAULT_N_POINTS = 300
DEFAULT_N_FACTORS = 9
DEFAULT_WIDTH_FACTOR = 2.0

# Presentation scaling paired with the bandwidth so oscillator peaks land
# near +/-0.5; thresholds are quoted on the scaled value.
_MULTIPLICATOR_FOR_BANDWIDTH = {300: 20.0, 600: 50.0}


@dataclass(frozen=True)
class OscillatorParams:
    basic_slope: float
    slope_factors: np.ndarray
    starting_points: np.ndarray
    bandwidth: int
    multiplicator: float
    discount: float | None = None

    def __post_init__(self) -> None:
        factors = np.asarray(self.slope_factors, dtype=np.float64)
        points = np.asarray(self.starting_points, dtype=np.float64)
        object.__setattr__(self, "slope_factors", factors)
        object.__setattr__(self, "starting_points", points)
        if np.any(factors <= 0):
            raise ValueError("slope factors must be positive")
        if self.bandwidth < 1:
            raise ValueError("bandwidth must be >= 1")
        if self.multiplicator <= 0:
            raise ValueError("multiplicator must be > 0")


def basic_slope_from_previous(
    summary_prev: PeriodSummary,
    zone_length: int,
    fallback: float | None = None,
) -> float:
    """Previous period's price range per second of zone length.

    A flat previous period has no range to speak of; the configured fallback
    floor is used instead, or DegenerateRangeError is raised without one.
    """
    if zone_length <= 0:
        raise ValueError("zone_length must be > 0")
    spread = summary_prev.max_price - summary_prev.min_price
    if spread <= 0.0:
        if fallback is None:
            raise DegenerateRangeError("previous period has zero price range")
        return fallback
    return spread / zone_length


def default_slope_factors(n_factors: int = DEFAULT_N_FACTORS) -> np.ndarray:
    """tan((pi/2) * k/10) for k = 1..n_factors; finite only below k = 10."""
    if n_factors < 1 or n_factors >= 10:
        raise RangeError("n_factors must be between 1 and 9")
    k = np.arange(1, n_factors + 1, dtype=np.float64)
    return np.tan(math.pi / 2.0 * k / 10.0)


def default_starting_points(
    first_price: float,
    range_prev: float,
    n_points: int = DEFAULT_N_POINTS,
    width_factor: float = DEFAULT_WIDTH_FACTOR,
    fallback_range: float | None = None,
) -> np.ndarray:
    """Uniform ladder around the period's first price.

    Spans ``(first_price - w*range, first_price + w*range]`` in n_points
    steps, where ``range`` is the previous period's price range (or the
    configured fallback when that range is zero) and ``w`` the width factor.
    """
    if n_points < 2:
        raise ValueError("n_points must be >= 2")
    if width_factor <= 0:
        raise ValueError("width_factor must be > 0")
    if range_prev <= 0.0:
        if fallback_range is None or fallback_range <= 0.0:
            raise DegenerateRangeError("previous period has zero price range")
        range_prev = fallback_range
    step = 2.0 * width_factor * range_prev / n_points
    offsets = np.arange(1, n_points + 1, dtype=np.float64) * step
    return (first_price - width_factor * range_prev) + offsets


def default_multiplicator(bandwidth: int) -> float:
    if bandwidth in _MULTIPLICATOR_FOR_BANDWIDTH:
        return _MULTIPLICATOR_FOR_BANDWIDTH[bandwidth]
    return 50.0 if bandwidth >= 600 else 20.0


def params_from_summary(
    summary_prev: PeriodSummary,
    zone_length: int,
    first_price: float,
    *,
    n_points: int = DEFAULT_N_POINTS,
    n_factors: int = DEFAULT_N_FACTORS,
    width_factor: float = DEFAULT_WIDTH_FACTOR,
    bandwidth: int = DEFAULT_BANDWIDTH,
    multiplicator: float | None = None,
    discount: float | None = None,
    basic_slope_override: float | None = None,
    fallback_slope: float | None = None,
    fallback_range: float | None = None,
) -> OscillatorParams:
    """Assemble a full parameter set for one trading day."""
    basic = (
        basic_slope_override
        if basic_slope_override is not None
        else basic_slope_from_previous(summary_prev, zone_length, fallback=fallback_slope)
    )
    points = default_starting_points(
        first_price,
        summary_prev.price_range,
        n_points=n_points,
        width_factor=width_factor,
        fallback_range=fallback_range,
    )
    return OscillatorParams(
        basic_slope=basic,
        slope_factors=default_slope_factors(n_factors),
        starting_points=points,
        bandwidth=bandwidth,
        multiplicator=multiplicator if multiplicator is not None else default_multiplicator(bandwidth),
        discount=discount,
    )
