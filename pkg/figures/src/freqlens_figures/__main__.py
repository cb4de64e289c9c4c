"""python -m freqlens_figures KIND INPUT.csv OUTPUT.{svg,png} [--title ...]"""

import argparse
import sys

from .render import KINDS, FigureSpec, RenderError, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="freqlens-figures")
    parser.add_argument("kind", choices=KINDS)
    parser.add_argument("input_csv")
    parser.add_argument("output")
    parser.add_argument("--title", default="")
    parser.add_argument("--xlabel", default="")
    parser.add_argument("--ylabel", default="")
    args = parser.parse_args(argv)
    try:
        info = render(FigureSpec(input_csv=args.input_csv, kind=args.kind,
                                 output=args.output, title=args.title,
                                 xlabel=args.xlabel, ylabel=args.ylabel))
    except (RenderError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {info.output} ({info.details})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
