"""`ionize-plot <kind> --spec <json>` command line."""

from __future__ import annotations

import argparse
import sys

from .figures import KINDS, render
from .spec import FigureSpec, RenderError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ionize-plot",
        description="Render a figure from ionize sweep outputs")
    parser.add_argument("kind", choices=sorted(KINDS))
    parser.add_argument("--spec", required=True, help="figure spec JSON file")
    parser.add_argument("--output", default=None,
                        help="override the spec's output path")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = FigureSpec.load(args.spec)
        if spec.kind != args.kind:
            print(f"error: spec kind {spec.kind!r} does not match "
                  f"argument {args.kind!r}", file=sys.stderr)
            return 2
        if args.output is not None:
            spec = FigureSpec(kind=spec.kind, inputs=spec.inputs,
                              output=args.output, options=spec.options)
        out = render(spec)
    except RenderError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(out)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
