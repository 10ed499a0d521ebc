"""Tick ingestion and per-second resampling.

The canonical tick file is a UTF-8 CSV with one header row and columns
``timestamp,ask,bid[,askVolume,bidVolume]`` (dot-decimal). Timestamps are
either integer epoch milliseconds or ISO-8601 with millisecond precision.
Resampling assigns to each second the last quotes observed strictly before
the next second starts, mimicking a trader who reads prices once per second;
nothing from the future leaks backwards.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import IO, Iterable, NamedTuple, Sequence

import numpy as np

from .errors import EmptySeriesError, FormatError, OutOfOrderError


class TickRecord(NamedTuple):
    timestamp_ms: int
    ask: float
    bid: float


@dataclass(frozen=True)
class TickFormat:
    """How to interpret the timestamp column.

    ``auto`` treats all-digit fields as epoch milliseconds and anything else
    as ISO-8601. ``tolerance_ms`` bounds how far a timestamp may regress
    before parsing aborts; smaller regressions are clamped to the previous
    timestamp so the output stays non-decreasing.
    """

    timestamp_kind: str = "auto"  # auto | epoch_ms | iso8601
    tolerance_ms: int = 0


@dataclass
class ParsedTicks:
    ticks: list[TickRecord] = field(default_factory=list)
    skipped_rows: int = 0


def _parse_timestamp(raw: str, kind: str) -> int:
    if kind == "epoch_ms" or (kind == "auto" and raw.lstrip("-").isdigit()):
        return int(raw)
    if kind in ("iso8601", "auto"):
        text = raw.strip().replace("Z", "+00:00")
        moment = datetime.fromisoformat(text)
        if moment.tzinfo is None:
            moment = moment.replace(tzinfo=timezone.utc)
        return int(round(moment.timestamp() * 1000))
    raise ValueError(f"unknown timestamp kind {kind!r}")


def parse_ticks(source: str | Path | IO[str], fmt: TickFormat = TickFormat()) -> ParsedTicks:
    """Read a tick CSV into ordered TickRecords.

    Rows with unparsable fields or an inverted/non-positive quote are counted
    in ``skipped_rows`` and dropped. Raises FormatError when the header does
    not start with timestamp,ask,bid and OutOfOrderError when timestamps
    regress beyond the tolerance.
    """
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8", newline="") as handle:
            return parse_ticks(handle, fmt)
    return _parse_tick_rows(source, fmt)


def _parse_tick_rows(handle: IO[str], fmt: TickFormat) -> ParsedTicks:
    reader = csv.reader(handle)
    try:
        header = next(reader)
    except StopIteration:
        raise FormatError("tick file has no header row")
    names = [cell.strip().lower() for cell in header]
    if names[:3] != ["timestamp", "ask", "bid"]:
        raise FormatError(f"expected header timestamp,ask,bid..., got {','.join(header)!r}")

    result = ParsedTicks()
    last_ms: int | None = None
    for row in reader:
        if not row or all(not cell.strip() for cell in row):
            continue
        try:
            ts = _parse_timestamp(row[0], fmt.timestamp_kind)
            ask = float(row[1])
            bid = float(row[2])
        except (ValueError, IndexError):
            result.skipped_rows += 1
            continue
        if not (ask >= bid > 0.0):
            result.skipped_rows += 1
            continue
        if last_ms is not None and ts < last_ms:
            if last_ms - ts > fmt.tolerance_ms:
                raise OutOfOrderError(f"timestamp {ts} regresses {last_ms - ts} ms past {last_ms}")
            ts = last_ms
        last_ms = ts
        result.ticks.append(TickRecord(ts, ask, bid))
    return result


def parse_tick_text(text: str, fmt: TickFormat = TickFormat()) -> ParsedTicks:
    return parse_ticks(io.StringIO(text), fmt)


@dataclass
class SecondSeries:
    """Per-second ask/bid over a closed interval of seconds.

    ``present[i]`` says whether any tick has ever been observed at or before
    second ``t_start + i``; because quotes forward-fill, ``present`` is a
    (possibly empty) run of False followed by True to the end.
    """

    t_start: int
    ask: np.ndarray
    bid: np.ndarray
    present: np.ndarray

    def __post_init__(self) -> None:
        if not (len(self.ask) == len(self.bid) == len(self.present)):
            raise ValueError("ask, bid and present must have identical length")
        if np.any(self.ask[self.present] < self.bid[self.present]):
            raise ValueError("ask < bid at a present second")

    @property
    def n_seconds(self) -> int:
        return len(self.ask)

    @property
    def t_end(self) -> int:
        return self.t_start + self.n_seconds - 1

    def prices(self, kind: str = "ask") -> np.ndarray:
        if kind == "ask":
            return self.ask
        if kind == "bid":
            return self.bid
        if kind == "mid":
            return (self.ask + self.bid) / 2.0
        raise ValueError(f"unknown price kind {kind!r}")


def resample_to_seconds(ticks: Sequence[TickRecord], zone: tuple[int, int]) -> SecondSeries:
    """Last-quote-per-second series over the closed interval ``zone``.

    Second ``s`` carries the quotes of the last tick with
    ``timestamp_ms < (s + 1) * 1000``; a tick exactly on a second boundary
    therefore belongs to the new second. Seconds before the first tick ever
    observed are flagged as absent. Raises EmptySeriesError when no tick
    precedes or lies within the zone.
    """
    t_first, t_last = zone
    if t_last < t_first:
        raise ValueError("zone end precedes zone start")
    n = t_last - t_first + 1
    times = np.fromiter((t.timestamp_ms for t in ticks), dtype=np.int64, count=len(ticks))
    asks = np.fromiter((t.ask for t in ticks), dtype=np.float64, count=len(ticks))
    bids = np.fromiter((t.bid for t in ticks), dtype=np.float64, count=len(ticks))

    bounds = (np.arange(t_first, t_last + 1, dtype=np.int64) + 1) * 1000
    idx = np.searchsorted(times, bounds, side="left") - 1
    present = idx >= 0
    if not present.any():
        raise EmptySeriesError("no tick at or before any zone second")
    safe = np.maximum(idx, 0)
    ask = np.where(present, asks[safe], np.nan)
    bid = np.where(present, bids[safe], np.nan)
    return SecondSeries(t_start=t_first, ask=ask, bid=bid, present=present)


def last_quote_before(ticks: Sequence[TickRecord], second: int) -> tuple[float, float] | None:
    """Quotes of the last tick strictly before the start of ``second``."""
    cutoff = second * 1000
    result = None
    for tick in ticks:
        if tick.timestamp_ms >= cutoff:
            break
        result = (tick.ask, tick.bid)
    return result


def read_manifest(path: str | Path) -> dict[str, Path]:
    """Map ISO dates to tick file paths from lines ``YYYY-MM-DD <path>``.

    Relative paths are resolved against the manifest's own directory. Blank
    lines and ``#`` comments are ignored.
    """
    manifest_path = Path(path)
    base = manifest_path.parent
    entries: dict[str, Path] = {}
    for lineno, line in enumerate(manifest_path.read_text(encoding="utf-8").splitlines(), 1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        parts = text.split(maxsplit=1)
        if len(parts) != 2:
            raise FormatError(f"{manifest_path}:{lineno}: expected 'YYYY-MM-DD <path>'")
        date, file_part = parts
        try:
            datetime.strptime(date, "%Y-%m-%d")
        except ValueError:
            raise FormatError(f"{manifest_path}:{lineno}: bad date {date!r}")
        candidate = Path(file_part)
        entries[date] = candidate if candidate.is_absolute() else base / candidate
    return entries


def ticks_from_series(series: SecondSeries) -> Iterable[TickRecord]:
    """Re-express a second series as one tick per present second.

    Used by tests to check that resampling is idempotent.
    """
    for i in range(series.n_seconds):
        if series.present[i]:
            yield TickRecord((series.t_start + i) * 1000, float(series.ask[i]), float(series.bid[i]))
