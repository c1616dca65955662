"""figures <kind> --in <csv...> --out <img>: render threatsim CSVs."""

from __future__ import annotations

import argparse
import sys

from .csvio import InputError
from .render import KINDS, FigureSpec, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="figures",
        description="Render figures from threatsim CSV outputs.",
    )
    parser.add_argument("kind", choices=KINDS)
    parser.add_argument("--in", dest="inputs", nargs="+", required=True,
                        help="input CSVs (simplex: phase.csv [restpoints.csv])")
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--run", type=int, default=0,
                        help="run index for timeseries inputs")
    parser.add_argument("--cmap", default="viridis",
                        help="speed/welfare colormap (light = fast)")
    parser.add_argument("--dpi", type=int, default=150)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    spec = FigureSpec(kind=args.kind, inputs=args.inputs, output=args.out,
                      run=args.run, cmap=args.cmap, dpi=args.dpi)
    try:
        render(spec)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
