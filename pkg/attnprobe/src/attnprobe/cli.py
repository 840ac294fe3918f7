"""attnprobe command line: one attention report per invocation."""

from __future__ import annotations

import argparse
import sys

from .probe import CONDITIONS, ModelLoadError, probe


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="attnprobe",
        description="Extract per-token attention toward a probe token from a causal LM.",
    )
    parser.add_argument("--model", required=True,
                        help="Model id or local path (loaded with transformers).")
    parser.add_argument("--text", required=True,
                        help="Input text; pass a pre-rendered grid for the vertical condition.")
    parser.add_argument("--probe", required=True,
                        help="Label word whose attention row is extracted (e.g. negative).")
    parser.add_argument("--layer", type=int, default=-1,
                        help="Layer index, negative counts from the end (default -1).")
    parser.add_argument("--head", type=int, default=None,
                        help="Single head index; omit to average over heads.")
    parser.add_argument("--condition", choices=CONDITIONS, default="original")
    parser.add_argument("--device", default="cpu")
    parser.add_argument("--out", required=True, help="Output JSON path.")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        report = probe(
            args.model, args.text, args.probe, layer=args.layer,
            condition=args.condition, head=args.head, device=args.device,
        )
    except (ModelLoadError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    report.write(args.out)
    print(f"wrote {args.out} ({len(report.tokens)} tokens)", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
