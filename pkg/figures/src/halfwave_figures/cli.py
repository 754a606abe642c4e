"""figures <kind> --in report.csv --out fig.svg [--title ...] [--style file]"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .plots import FigureKind, FigureSpec, plot
from .schemas import SchemaError

EXIT_OK = 0
EXIT_SCHEMA = 2


def _parse_style_file(path: str) -> dict:
    style = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise SchemaError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        style[key] = value
    return style


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="figures",
        description="Render figures from halfwave CSV reports (read-only inputs).",
    )
    parser.add_argument("kind", choices=[k.value for k in FigureKind],
                        help="figure kind")
    parser.add_argument("--in", dest="input_csv", required=True, help="input CSV")
    parser.add_argument("--out", dest="output", required=True, help="output image (svg or png)")
    parser.add_argument("--title", default=None)
    parser.add_argument("--xlabel", default=None)
    parser.add_argument("--ylabel", default=None)
    parser.add_argument("--style", default=None, help="optional flat key = value rcParams file")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        style = _parse_style_file(args.style) if args.style else None
        spec = FigureSpec(
            input_csv=Path(args.input_csv),
            kind=FigureKind(args.kind),
            output=Path(args.output),
            title=args.title,
            xlabel=args.xlabel,
            ylabel=args.ylabel,
            style=style,
        )
        out = plot(spec)
    except SchemaError as err:
        print(f"schema error: {err}", file=sys.stderr)
        return EXIT_SCHEMA
    print(f"wrote {out}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
