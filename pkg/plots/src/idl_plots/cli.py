"""idl-plots: render one figure from a simulation CSV.

Usage:
    idl-plots --csv <file> --kind <kind> --out <file> [--fit-window a b]
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .figures import FIGURE_KINDS, FigureSpec, SchemaError, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="idl-plots", description=__doc__)
    parser.add_argument("--csv", required=True, type=Path)
    parser.add_argument("--kind", required=True, choices=FIGURE_KINDS)
    parser.add_argument("--out", required=True, type=Path)
    parser.add_argument(
        "--fit-window", nargs=2, type=float, metavar=("T_MIN", "T_MAX"), default=None
    )
    args = parser.parse_args(argv)
    spec = FigureSpec(
        input_csv=args.csv,
        figure_kind=args.kind,
        output_path=args.out,
        fit_window=tuple(args.fit_window) if args.fit_window else None,
    )
    try:
        annotations = render(spec)
    except (SchemaError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for key, value in annotations.items():
        print(f"{key}: {value}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
