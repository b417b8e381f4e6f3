"""Command-line interface: figures --results <csv> --summary <csv> --out <dir>."""

from __future__ import annotations

import argparse
import sys

from .render import SchemaError, render_figures


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="figures",
        description="Render success-rate figures and a summary table from noisybench CSVs.",
    )
    parser.add_argument("--results", required=True, help="path to results.csv")
    parser.add_argument("--summary", help="path to summary.csv (enables the markdown table)")
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--ci", action="store_true", help="draw confidence-interval ribbons")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        paths = render_figures(args.results, args.out, summary_csv=args.summary, ci=args.ci)
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2
    for path in paths:
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
