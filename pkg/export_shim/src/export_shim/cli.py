"""Command-line entry point: ``export-shim export --images DIR --out DIR``."""

from __future__ import annotations

import argparse
import sys

from .errors import ExportError
from .export import export_batch


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="export-shim",
        description="Export classifier activations/gradients and segmentations "
        "to RLT/PGM files plus a manifest.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    export = sub.add_parser("export", help="export every .pgm image in a directory")
    export.add_argument("--images", required=True, help="directory of input .pgm images")
    export.add_argument("--out", required=True, help="output directory for the batch")
    export.add_argument("--seed", type=int, default=0, help="model weight seed (default 0)")
    export.add_argument("--checkpoint", default=None, help="optional model checkpoint to load")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        manifest = export_batch(args.images, args.out, seed=args.seed, checkpoint=args.checkpoint)
    except ExportError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2
    print(f"exported {len(manifest['scans'])} scan(s) to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
