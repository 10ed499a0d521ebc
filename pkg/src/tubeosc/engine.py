"""Threshold trading over the scaled oscillator, with bid-ask accounting.

The state machine keeps at most one position. It enters long above the
in-long threshold (buying at ask) and short below the in-short one (selling
at bid); it leaves when the oscillator falls back inside the out band, or
unconditionally at the end of the period. Exits are evaluated before entries
within a second, and a position opened at second t is only eligible to exit
from t+1 on. Every round trip pays exactly one bid-ask spread: longs close
at bid, shorts at ask.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidQuoteError

REINVEST_100 = "reinvest_100"
FIXED_VOLUME = "fixed"


@dataclass(frozen=True)
class Thresholds:
    """Entry/exit levels on the scaled oscillator.

    The long pair sits strictly above zero with the entry above the exit;
    the short pair mirrors that below zero.
    """

    in_long: float
    out_long: float
    in_short: float
    out_short: float

    def __post_init__(self) -> None:
        if not (self.in_long > self.out_long > 0.0):
            raise ValueError("need in_long > out_long > 0")
        if not (self.in_short < self.out_short < 0.0):
            raise ValueError("need in_short < out_short < 0")

    @classmethod
    def symmetric(cls, in_long: float, out_long: float) -> "Thresholds":
        """Short thresholds as the mirror image of the long ones."""
        return cls(in_long=in_long, out_long=out_long, in_short=-in_long, out_short=-out_long)


@dataclass
class Position:
    side: str  # "long" | "short"
    entry_time: int
    entry_price: float  # ask for longs, bid for shorts
    size: float


@dataclass(frozen=True)
class TradeRecord:
    side: str
    entry_time: int
    exit_time: int
    entry_price: float
    exit_price: float
    size: float
    profit: float
    profit_per_share: float
    duration: int
    exit_reason: str  # "signal" | "period_end"


@dataclass
class AccountState:
    balance: float
    equity: list[tuple[int, float]] = field(default_factory=list)

    def settle(self, t: int, profit: float) -> None:
        self.balance += profit
        self.equity.append((t, self.balance))


class TradingEngine:
    """One engine per (instrument, day, config); feed it seconds in order."""

    def __init__(
        self,
        thresholds: Thresholds,
        *,
        start_balance: float = 10_000.0,
        volume_mode: str = REINVEST_100,
        fixed_volume: float = 1.0,
        same_second_reentry: bool = True,
    ):
        if volume_mode not in (REINVEST_100, FIXED_VOLUME):
            raise ValueError(f"unknown volume mode {volume_mode!r}")
        if volume_mode == FIXED_VOLUME and fixed_volume <= 0:
            raise ValueError("fixed_volume must be > 0")
        self.thresholds = thresholds
        self.volume_mode = volume_mode
        self.fixed_volume = fixed_volume
        self.same_second_reentry = same_second_reentry
        self.account = AccountState(balance=start_balance)
        self.position: Position | None = None
        self.trades: list[TradeRecord] = []

    def step(self, t: int, oscillator: float, ask: float, bid: float) -> TradeRecord | None:
        """Process one second; returns the trade closed at it, if any."""
        closed = None
        pos = self.position
        if pos is not None and pos.entry_time < t:
            wants_out = (pos.side == "long" and oscillator < self.thresholds.out_long) or (
                pos.side == "short" and oscillator > self.thresholds.out_short
            )
            if wants_out:
                closed = self._close(t, ask, bid, "signal")
        if self.position is None and (closed is None or self.same_second_reentry):
            if oscillator > self.thresholds.in_long:
                self._open("long", t, ask, bid)
            elif oscillator < self.thresholds.in_short:
                self._open("short", t, ask, bid)
        return closed

    def force_close_at_period_end(self, t_end: int, ask: float, bid: float) -> TradeRecord | None:
        """Close whatever is still open at the last zone second."""
        if self.position is None:
            return None
        return self._close(t_end, ask, bid, "period_end")

    def _open(self, side: str, t: int, ask: float, bid: float) -> None:
        self._check_quote(t, ask, bid)
        price = ask if side == "long" else bid
        if self.volume_mode == REINVEST_100:
            size = self.account.balance / price
        else:
            size = self.fixed_volume
        self.position = Position(side=side, entry_time=t, entry_price=price, size=size)

    def _close(self, t: int, ask: float, bid: float, reason: str) -> TradeRecord:
        self._check_quote(t, ask, bid)
        pos = self.position
        assert pos is not None
        if pos.side == "long":
            exit_price = bid
            per_share = exit_price - pos.entry_price
        else:
            exit_price = ask
            per_share = pos.entry_price - exit_price
        profit = per_share * pos.size
        self.account.settle(t, profit)
        record = TradeRecord(
            side=pos.side,
            entry_time=pos.entry_time,
            exit_time=t,
            entry_price=pos.entry_price,
            exit_price=exit_price,
            size=pos.size,
            profit=profit,
            profit_per_share=per_share,
            duration=t - pos.entry_time,
            exit_reason=reason,
        )
        self.trades.append(record)
        self.position = None
        return record

    @staticmethod
    def _check_quote(t: int, ask: float, bid: float) -> None:
        if ask < bid:
            raise InvalidQuoteError(f"ask {ask} < bid {bid} at second {t}")


def apply_execution_delay(signal_time: int, delay: int) -> int:
    """Second whose quote executes a signal raised at ``signal_time``."""
    if delay not in (0, 1):
        raise ValueError("delay must be 0 or 1 seconds")
    return signal_time + delay


def run_period(
    engine: TradingEngine,
    t_start: int,
    scaled: np.ndarray,
    ask: np.ndarray,
    bid: np.ndarray,
    present: np.ndarray,
    delay: int = 0,
) -> list[TradeRecord]:
    """Drive an engine across one zone and force-close at its end.

    With a one-second delay the decision made at second t executes on the
    quote of t+1, i.e. second i trades on the oscillator of i-delay; the
    oscillator counts as zero before the zone, and a signal raised at the
    last zone second is dropped because its execution second never comes.
    """
    if delay not in (0, 1):
        raise ValueError("delay must be 0 or 1 seconds")
    n = len(scaled)
    start_count = len(engine.trades)
    for i in range(n):
        if not present[i]:
            continue
        value = scaled[i - delay] if i >= delay else 0.0
        engine.step(t_start + i, float(value), float(ask[i]), float(bid[i]))
    if engine.position is not None:
        engine.force_close_at_period_end(t_start + n - 1, float(ask[n - 1]), float(bid[n - 1]))
    return engine.trades[start_count:]
