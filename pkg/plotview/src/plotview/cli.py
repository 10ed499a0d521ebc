"""Render day and summary figures from a backtest output directory."""
from __future__ import annotations

import argparse
import sys

from .bundle import MissingTraceError, PlotBundle, PlotStyle
from .render import render_day, render_summary


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="plotview",
        description="Render figures from a tubeosc plot-data bundle.",
    )
    parser.add_argument("--bundle", required=True, help="backtest output directory (contains plotdata/)")
    parser.add_argument("--out", help="image directory (default: the bundle directory)")
    parser.add_argument("--day", action="append", metavar="YYYY-MM-DD", help="render this day (repeatable)")
    parser.add_argument("--summary", action="store_true", help="render the six-panel summary")
    parser.add_argument("--downsample", type=int, default=1000, help="points per plotted curve")
    args = parser.parse_args(argv)

    try:
        bundle = PlotBundle(args.bundle, args.out, PlotStyle(downsample=args.downsample))
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    days = args.day
    summary = args.summary
    if not days and not summary:
        days = bundle.available_days()
        summary = True

    written = []
    try:
        for date in days or []:
            written += render_day(bundle, date)
        if summary:
            written += render_summary(bundle)
    except MissingTraceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
