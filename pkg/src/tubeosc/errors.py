"""Exception types shared across the package."""


class TubeoscError(Exception):
    """Base class for all package-specific errors."""


class FormatError(TubeoscError):
    """Tick file header or structure does not match the documented layout."""


class OutOfOrderError(TubeoscError):
    """Tick timestamps regressed by more than the configured tolerance."""


class EmptyPeriodError(TubeoscError):
    """No price exists inside the zone of interest."""


class EmptySeriesError(TubeoscError):
    """No tick precedes or lies within the requested interval."""


class SequenceError(TubeoscError):
    """Oscillator updates must be fed strictly one second at a time."""


class DegenerateRangeError(TubeoscError):
    """Previous-period price range is zero and no fallback was configured."""


class RangeError(TubeoscError):
    """Parameter outside the domain where the heuristic formula is defined."""


class InvalidQuoteError(TubeoscError):
    """Ask below bid at a second where a trade would execute."""


class DegenerateVarianceError(TubeoscError):
    """Excess returns have zero variance; the Sharpe ratio is undefined."""


class MissingDataError(TubeoscError):
    """A backtest month has no risk-free yield rows."""


class DataMissingError(TubeoscError):
    """A day listed in the manifest has no readable data file."""


class ConfigError(TubeoscError):
    """Backtest configuration is missing, malformed, or inconsistent."""


class TraceUnavailableError(TubeoscError):
    """Per-day plot data was requested but traces were not recorded."""
