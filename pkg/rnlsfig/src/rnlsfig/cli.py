"""`rnlsfig render --kind <k> --in <paths...> --out <path>
[--annotate lower=...,upper=...]`"""

from __future__ import annotations

import argparse
import sys

from .formats import ParseError
from .render import KINDS, PlotJob, render

ANNOTATION_KEYS = ("lower", "upper", "p", "gamma1", "gamma2", "omega", "amplitude", "T")


def parse_annotations(text: str) -> dict:
    out = {}
    if not text:
        return out
    for item in text.split(","):
        if "=" not in item:
            raise ValueError(f"annotation {item!r} is not key=value")
        key, _, value = item.partition("=")
        key = key.strip()
        if key not in ANNOTATION_KEYS:
            raise ValueError(f"unknown annotation key {key!r}")
        out[key] = float(value)
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rnlsfig",
                                     description="Render plots from rnls output files")
    sub = parser.add_subparsers(dest="command", required=True)
    rp = sub.add_parser("render")
    rp.add_argument("--kind", required=True, choices=KINDS)
    rp.add_argument("--in", dest="inputs", nargs="+", required=True, metavar="PATH")
    rp.add_argument("--out", required=True)
    rp.add_argument("--annotate", default="", metavar="k=v,...")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        job = PlotJob(inputs=args.inputs, kind=args.kind, out=args.out,
                      annotations=parse_annotations(args.annotate))
        summary = render(job)
    except (ParseError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for key, value in summary.items():
        print(f"{key} = {value}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
