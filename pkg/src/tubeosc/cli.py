"""Command line runner: config in, report/trades/plot-data out."""
from __future__ import annotations

import argparse
import logging
import sys

from .backtest import run_backtest
from .config import load_config, parse_threshold_pair
from .errors import ConfigError, TubeoscError
from .plotdata import write_outputs

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NO_DATA = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tubeosc",
        description="Backtest the line-grid crossing oscillator strategy over tick data.",
    )
    parser.add_argument("--config", required=True, help="path to the instrument config file")
    parser.add_argument("--instrument", help="config section to run (needed with several sections)")
    parser.add_argument("--from", dest="date_from", metavar="YYYY-MM-DD", help="first manifest day to run")
    parser.add_argument("--to", dest="date_to", metavar="YYYY-MM-DD", help="last manifest day to run")
    parser.add_argument("--out", default="backtest_out", help="output directory (default: backtest_out)")
    parser.add_argument("--trace", action="store_true", help="record per-second traces for day plots")
    parser.add_argument("--delay", type=int, choices=(0, 1), help="execution delay in seconds")
    parser.add_argument("--thresholds", metavar="IN/OUT", help="symmetric in/out thresholds, e.g. 0.4/0.1")
    parser.add_argument("--bandwidth", type=int, metavar="SECONDS", help="oscillator window length")
    parser.add_argument("--multiplicator", type=float, metavar="X", help="presentation scaling of the oscillator")
    parser.add_argument("--plot-points", type=int, help="plot CSV points per day (0 = full resolution)")
    parser.add_argument("--jobs", type=int, help="worker threads for per-day computation")
    parser.add_argument("-q", "--quiet", action="store_true", help="suppress warnings")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.ERROR if args.quiet else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        config = load_config(args.config, instrument=args.instrument)
        if args.date_from:
            config.date_from = args.date_from
        if args.date_to:
            config.date_to = args.date_to
        if args.trace:
            config.trace = True
        if args.delay is not None:
            config.delay = args.delay
        if args.thresholds:
            config.in_long, config.out_long = parse_threshold_pair(args.thresholds)
            config.symmetric = True
        if args.bandwidth is not None:
            config.bandwidth = args.bandwidth
        if args.multiplicator is not None:
            config.multiplicator = args.multiplicator
        if args.plot_points is not None:
            config.plot_points = args.plot_points
        if args.jobs is not None:
            config.jobs = args.jobs
        config.validate()
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        report = run_backtest(config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except TubeoscError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_DATA

    out = write_outputs(report, args.out)
    processed = len(report.traded_days) + len(report.warmup_days)
    print(
        f"{config.instrument}: {processed} days processed, {len(report.skipped_days)} skipped, "
        f"{report.stats.n_trades} trades, final balance {report.final_balance:.2f} -> {out}"
    )
    if processed == 0:
        return EXIT_NO_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
