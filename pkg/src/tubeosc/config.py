"""Backtest configuration: declarative key = value files plus CLI overrides.

The config file is INI-style with one section per instrument. Times accept
either plain seconds or HH:MM[:SS]; thresholds are quoted on the scaled
oscillator. CLI flags override file values; validation happens once, after
merging.
"""
from __future__ import annotations

import configparser
from dataclasses import dataclass, field, fields
from pathlib import Path

from .engine import FIXED_VOLUME, REINVEST_100, Thresholds
from .errors import ConfigError


def parse_clock(text: str) -> int:
    """'36000', '10:00' or '10:00:00' -> seconds."""
    text = text.strip()
    if ":" not in text:
        return int(text)
    parts = text.split(":")
    if len(parts) not in (2, 3):
        raise ValueError(f"bad clock value {text!r}")
    h, m = int(parts[0]), int(parts[1])
    s = int(parts[2]) if len(parts) == 3 else 0
    return h * 3600 + m * 60 + s


def parse_threshold_pair(text: str) -> tuple[float, float]:
    """'0.4/0.1' -> (in, out)."""
    parts = text.split("/")
    if len(parts) != 2:
        raise ValueError(f"expected IN/OUT, got {text!r}")
    return float(parts[0]), float(parts[1])


@dataclass
class BacktestConfig:
    instrument: str
    manifest: str
    zone_start: int
    zone_length: int
    in_long: float
    out_long: float
    symmetric: bool = True
    in_short: float | None = None
    out_short: float | None = None
    date_from: str | None = None
    date_to: str | None = None
    bandwidth: int = 300
    multiplicator: float | None = None
    discount: float | None = None
    n_starting_points: int = 300
    n_slope_factors: int = 9
    grid_width_factor: float = 2.0
    basic_slope: float | None = None
    fallback_basic_slope: float | None = None
    fallback_range: float | None = None
    delay: int = 0
    start_balance: float = 10_000.0
    volume_mode: str = REINVEST_100
    fixed_volume: float = 1.0
    risk_free_file: str | None = None
    signal_price: str = "ask"
    warmup_days: int = 1
    same_second_reentry: bool = True
    sd_mode: str = "sample"
    trace: bool = False
    plot_points: int = 1000
    jobs: int = 1
    config_dir: Path = field(default_factory=Path)

    def thresholds(self) -> Thresholds:
        if self.symmetric:
            return Thresholds.symmetric(self.in_long, self.out_long)
        if self.in_short is None or self.out_short is None:
            raise ConfigError("non-symmetric thresholds need in_short and out_short")
        return Thresholds(self.in_long, self.out_long, self.in_short, self.out_short)

    def manifest_path(self) -> Path:
        p = Path(self.manifest)
        return p if p.is_absolute() else self.config_dir / p

    def risk_free_path(self) -> Path | None:
        if self.risk_free_file is None:
            return None
        p = Path(self.risk_free_file)
        return p if p.is_absolute() else self.config_dir / p

    def validate(self) -> None:
        try:
            self.thresholds()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if self.zone_length <= 0 or self.zone_start < 0:
            raise ConfigError("zone_start must be >= 0 and zone_length > 0")
        if self.zone_start + self.zone_length > 86400:
            raise ConfigError("zone must fit inside one day")
        if self.delay not in (0, 1):
            raise ConfigError("delay must be 0 or 1")
        if self.volume_mode not in (REINVEST_100, FIXED_VOLUME):
            raise ConfigError(f"unknown volume_mode {self.volume_mode!r}")
        if self.signal_price not in ("ask", "bid", "mid"):
            raise ConfigError(f"unknown signal_price {self.signal_price!r}")
        if self.sd_mode not in ("sample", "population"):
            raise ConfigError(f"unknown sd_mode {self.sd_mode!r}")
        if self.bandwidth < 1:
            raise ConfigError("bandwidth must be >= 1")
        if self.warmup_days < 0:
            raise ConfigError("warmup_days must be >= 0")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")
        if self.date_from and self.date_to and self.date_from > self.date_to:
            raise ConfigError("date range is empty")

    def echo(self) -> dict:
        """Config as written to the report; excludes output plumbing."""
        skip = {"config_dir", "jobs"}
        out = {}
        for f in fields(self):
            if f.name in skip:
                continue
            out[f.name] = getattr(self, f.name)
        return out


_BOOL_KEYS = {"symmetric", "same_second_reentry", "trace"}
_INT_KEYS = {"bandwidth", "n_starting_points", "n_slope_factors", "delay", "warmup_days", "plot_points", "jobs"}
_FLOAT_KEYS = {
    "in_long",
    "out_long",
    "in_short",
    "out_short",
    "multiplicator",
    "discount",
    "grid_width_factor",
    "basic_slope",
    "fallback_basic_slope",
    "fallback_range",
    "start_balance",
    "fixed_volume",
}
_CLOCK_KEYS = {"zone_start", "zone_length"}
_RENAMED = {"from": "date_from", "to": "date_to"}


def load_config(path: str | Path, instrument: str | None = None) -> BacktestConfig:
    """Read one instrument section of a config file into a BacktestConfig."""
    parser = configparser.ConfigParser(interpolation=None)
    read = parser.read(path, encoding="utf-8")
    if not read:
        raise ConfigError(f"config file {path} not found")
    sections = parser.sections()
    if not sections:
        raise ConfigError("config file defines no instrument section")
    if instrument is None:
        if len(sections) > 1:
            raise ConfigError(f"config defines {sections}; pick one with --instrument")
        instrument = sections[0]
    if instrument not in sections:
        raise ConfigError(f"no section [{instrument}] in config")

    values: dict = {"instrument": instrument, "config_dir": Path(path).resolve().parent}
    known = {f.name for f in fields(BacktestConfig)}
    for raw_key, raw_value in parser.items(instrument):
        key = _RENAMED.get(raw_key, raw_key)
        if key not in known:
            raise ConfigError(f"unknown config key {raw_key!r}")
        try:
            if key in _CLOCK_KEYS:
                values[key] = parse_clock(raw_value)
            elif key in _BOOL_KEYS:
                values[key] = parser.getboolean(instrument, raw_key)
            elif key in _INT_KEYS:
                values[key] = int(raw_value)
            elif key in _FLOAT_KEYS:
                values[key] = float(raw_value)
            else:
                values[key] = raw_value
        except ValueError as exc:
            raise ConfigError(f"bad value for {raw_key!r}: {raw_value!r}") from exc

    for required in ("manifest", "zone_start", "zone_length", "in_long", "out_long"):
        if required not in values:
            raise ConfigError(f"config key {required!r} is required")
    config = BacktestConfig(**values)
    config.validate()
    return config
