"""Command-line driver: `plots render <csv> --kind <k> --out <file>`.

Exit status 0 on success; any argument, schema, or file problem exits
nonzero with a one-line message on stderr.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .errors import PlotsError
from .figures import SCHEMAS, FigureSpec, render


class _Parser(argparse.ArgumentParser):
    """Argument parser whose usage errors map to a nonzero exit."""

    def error(self, message):
        raise PlotsError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="plots", description="Render figures from laboratory CSV tables.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    r = sub.add_parser("render", help="render one figure from one CSV table")
    r.add_argument("input_csv", help="CSV file produced by the laboratory CLI")
    r.add_argument(
        "--kind",
        required=True,
        choices=sorted(SCHEMAS),
        help="figure kind; fixes the expected CSV schema",
    )
    r.add_argument("--out", required=True, help="output image path (.png or .svg)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command != "render":
            raise PlotsError("the render subcommand is required")
        spec = FigureSpec(Path(args.input_csv), args.kind, Path(args.out))
        path = render(spec)
    except PlotsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
