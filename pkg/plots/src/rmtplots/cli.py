"""Dispatcher: one subcommand per plot kind."""

import argparse
import sys

from . import distance_trend, esd_scatter, tail_curve
from .common import SchemaError

KINDS = {
    "esd-scatter": esd_scatter.render,
    "tail-curve": tail_curve.render,
    "distance-trend": distance_trend.render,
}


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="rmtplots", description="render figures from rmtkit CSV outputs")
    parser.add_argument("kind", choices=sorted(KINDS))
    parser.add_argument("--input", required=True, help="input CSV path")
    parser.add_argument("--output", required=True, help="output PNG path")
    parser.add_argument("--ymin", type=float, default=None)
    parser.add_argument("--ymax", type=float, default=None)
    try:
        args = parser.parse_args(sys.argv[1:] if argv is None else argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    limits = None
    if args.ymin is not None and args.ymax is not None:
        limits = (args.ymin, args.ymax)
    elif args.kind == "esd-scatter" and args.ymax is not None:
        limits = args.ymax
    try:
        KINDS[args.kind](args.input, args.output, limits)
    except SchemaError as exc:
        sys.stderr.write(f"rmtplots: schema error: {exc}\n")
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
