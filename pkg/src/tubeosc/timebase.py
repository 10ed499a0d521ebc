"""Trading periods, zones of interest, and per-period price summaries.

Time is plain epoch seconds in whatever frame the data uses; no time zone
conversion happens anywhere in the package. A period (normally one day)
carries a zone of interest, the closed interval of seconds during which the
oscillator runs and trading is allowed.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import EmptyPeriodError
from .ticks import SecondSeries


@dataclass(frozen=True)
class PeriodSpec:
    """One trading period: start second, zone offset and zone length.

    The zone of interest is the closed interval
    ``[period_start + zone_offset, period_start + zone_offset + zone_length]``.
    """

    period_start: int
    zone_offset: int
    zone_length: int
    period_seconds: int = 86400

    def __post_init__(self) -> None:
        if self.zone_offset < 0:
            raise ValueError("zone_offset must be >= 0")
        if self.zone_length <= 0:
            raise ValueError("zone_length must be > 0")
        if self.zone_offset + self.zone_length > self.period_seconds:
            raise ValueError("zone must fit inside the period")


@dataclass(frozen=True)
class PeriodSummary:
    """Max/min/close of one period's zone; the pivot is derived from them.

    ``close_price`` is whatever price the last zone second carried; it is not
    forced into ``[min_price, max_price]`` so that summaries can be built
    from arbitrary inputs, but ``min_price <= max_price`` always holds.
    """

    max_price: float
    min_price: float
    close_price: float

    def __post_init__(self) -> None:
        if self.min_price > self.max_price:
            raise ValueError("min_price must not exceed max_price")

    @property
    def pivot(self) -> float:
        """(high + low + close) / 3."""
        return (self.max_price + self.min_price + self.close_price) / 3.0

    @property
    def price_range(self) -> float:
        return self.max_price - self.min_price


def zone_interval(spec: PeriodSpec) -> tuple[int, int]:
    """Closed interval of epoch seconds covered by the zone of interest."""
    start = spec.period_start + spec.zone_offset
    return start, start + spec.zone_length


def summarize_period(series: SecondSeries, price: str = "ask") -> PeriodSummary:
    """Max, min and closing price over the zone a series was built for.

    Only seconds with a known price participate. Raises EmptyPeriodError when
    the series never saw a tick.
    """
    values = series.prices(price)
    known = values[series.present]
    if known.size == 0:
        raise EmptyPeriodError("no price observed inside the zone")
    # present is monotone (False prefix then True), so the last element is
    # present whenever anything is.
    return PeriodSummary(
        max_price=float(known.max()),
        min_price=float(known.min()),
        close_price=float(values[-1]),
    )
