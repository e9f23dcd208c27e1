"""Command-line entry point: ``plotkit <kind> --in <path...> --out <image>``.

Exit codes: 0 success, 2 bad arguments or schema mismatch.
"""

from __future__ import annotations

import argparse
import sys

from .render import KINDS, PlotJob, render
from .schemas import SchemaError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plotkit",
        description="Render simulation CSV/JSON artifacts to images",
    )
    parser.add_argument("kind", choices=KINDS,
                        help="what to draw from the input artifacts")
    parser.add_argument("--in", dest="inputs", nargs="+", required=True,
                        metavar="PATH",
                        help="input artifacts (CSV files, optionally one "
                             "summary.json)")
    parser.add_argument("--out", required=True, metavar="IMAGE",
                        help="output image path (.png)")
    parser.add_argument("--title", default=None)
    parser.add_argument("--dpi", type=int, default=150)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    job = PlotJob(kind=args.kind, inputs=tuple(args.inputs), output=args.out,
                  title=args.title, dpi=args.dpi)
    try:
        render(job)
    except (SchemaError, OSError) as exc:
        print(f"plotkit: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {job.output}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
