"""Loaders for the CSV bundle a backtest run emits.

The renderer is a pure view: every number it draws comes from a CSV row (or
report.json for threshold levels); nothing is recomputed from market data.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path


class MissingTraceError(Exception):
    """The bundle has no per-day files for the requested date."""


@dataclass(frozen=True)
class PlotStyle:
    day_figsize: tuple[float, float] = (13.0, 8.0)
    summary_figsize: tuple[float, float] = (13.0, 12.0)
    downsample: int = 1000


@dataclass(frozen=True)
class DayGrid:
    anchor_time: int
    starting_points: list[float]
    slopes: list[float]


@dataclass
class PlotBundle:
    """Paths into one run's output directory plus style options."""

    bundle_dir: Path
    out_dir: Path | None = None
    style: PlotStyle = field(default_factory=PlotStyle)

    def __post_init__(self) -> None:
        self.bundle_dir = Path(self.bundle_dir)
        self.out_dir = Path(self.out_dir) if self.out_dir is not None else self.bundle_dir
        if not self.plotdata_dir.is_dir():
            raise FileNotFoundError(f"no plotdata/ directory under {self.bundle_dir}")

    @property
    def plotdata_dir(self) -> Path:
        return self.bundle_dir / "plotdata"

    def _rows(self, name: str) -> list[list[str]]:
        path = self.plotdata_dir / name
        with open(path, newline="", encoding="utf-8") as handle:
            rows = list(csv.reader(handle))
        return rows[1:]

    def _day_file(self, date: str, kind: str) -> str:
        name = f"day_{date}_{kind}.csv"
        if not (self.plotdata_dir / name).exists():
            raise MissingTraceError(f"{name} not found; run the backtest with --trace")
        return name

    def available_days(self) -> list[str]:
        days = []
        for path in sorted(self.plotdata_dir.glob("day_*_oscillator.csv")):
            days.append(path.name[len("day_") : -len("_oscillator.csv")])
        return days

    def day_price(self, date: str) -> list[tuple[int, float, float]]:
        rows = self._rows(self._day_file(date, "price"))
        return [(int(t), float(a), float(b)) for t, a, b in rows]

    def day_grid(self, date: str) -> DayGrid:
        anchor = 0
        points: list[float] = []
        slopes: list[float] = []
        for param, value in self._rows(self._day_file(date, "grid")):
            if param == "anchor_time":
                anchor = int(value)
            elif param == "starting_point":
                points.append(float(value))
            elif param == "slope":
                slopes.append(float(value))
        return DayGrid(anchor_time=anchor, starting_points=points, slopes=slopes)

    def day_oscillator(self, date: str) -> list[tuple[int, float, float, str]]:
        rows = self._rows(self._day_file(date, "oscillator"))
        return [(int(t), float(raw), float(scaled), signal) for t, raw, scaled, signal in rows]

    def day_trades(self, date: str) -> list[dict]:
        return self._trade_rows(self.plotdata_dir / self._day_file(date, "trades"))

    def all_trades(self) -> list[dict]:
        return self._trade_rows(self.bundle_dir / "trades.csv")

    @staticmethod
    def _trade_rows(path: Path) -> list[dict]:
        with open(path, newline="", encoding="utf-8") as handle:
            reader = csv.DictReader(handle)
            out = []
            for row in reader:
                out.append(
                    {
                        "entry_time": int(row["entry_time"]),
                        "exit_time": int(row["exit_time"]),
                        "side": row["side"],
                        "entry_price": float(row["entry_price"]),
                        "exit_price": float(row["exit_price"]),
                        "profit": float(row["profit"]),
                        "profit_per_share": float(row["profit_per_share"]),
                    }
                )
        return out

    def monthly_returns(self) -> list[tuple[str, float, float]]:
        return [(m, float(r), float(rf)) for m, r, rf in self._rows("monthly_returns.csv")]

    def histogram(self, name: str) -> list[tuple[float, float, int]]:
        return [(float(a), float(b), int(c)) for a, b, c in self._rows(name)]

    def hourly_profile(self) -> list[tuple[int, int, float]]:
        return [(int(h), int(c), float(p)) for h, c, p in self._rows("hourly_profile.csv")]

    def thresholds(self) -> dict | None:
        path = self.bundle_dir / "report.json"
        if not path.exists():
            return None
        config = json.loads(path.read_text(encoding="utf-8")).get("config", {})
        if "in_long" not in config:
            return None
        in_long, out_long = config["in_long"], config["out_long"]
        if config.get("symmetric", True):
            return {"in_long": in_long, "out_long": out_long, "in_short": -in_long, "out_short": -out_long}
        return {
            "in_long": in_long,
            "out_long": out_long,
            "in_short": config.get("in_short"),
            "out_short": config.get("out_short"),
        }
