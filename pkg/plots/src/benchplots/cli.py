"""Command line entry point: plots --csv PATH --out DIR --format png|svg."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .render import PlotJob, SchemaError, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="plots",
        description="Render benchmark CSV output as throughput-vs-threads "
                    "charts, one image per workload.",
    )
    parser.add_argument("--csv", required=True, metavar="PATH",
                        help="benchmark CSV file")
    parser.add_argument("--out", required=True, metavar="DIR",
                        help="output directory for images")
    parser.add_argument("--format", choices=["png", "svg"], default="png")
    parser.add_argument("--whiskers", action="store_true",
                        help="add min/max whiskers across repeated rows")
    args = parser.parse_args(argv)

    csv_path = Path(args.csv)
    if not csv_path.exists():
        print(f"error: no such file: {csv_path}", file=sys.stderr)
        return 2
    job = PlotJob(csv_path=csv_path, out_dir=Path(args.out), fmt=args.format,
                  whiskers=args.whiskers)
    try:
        written = render(job)
    except SchemaError as exc:
        print(f"error: {csv_path}: {exc}", file=sys.stderr)
        return 2
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
