"""Command-line surface: clean, score, report, subsample.

Exit codes: 0 success, 2 input error, 3 embedding-provider failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .corpus import load_dataset, write_dataset
from .errors import InputError, ProviderError
from .pipeline import (
    REPORT_JSON,
    CleanConfig,
    clean,
    report_render,
    score_only,
    subsample,
)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_PROVIDER = 3


def _add_embedder_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--embedder", choices=("hash", "service"), default="hash",
                        help="embedding provider (default: offline hash embedder)")
    parser.add_argument("--service-url", default=os.environ.get("CUPCLEANER_SERVICE_URL"),
                        help="embedding service base URL (default: $CUPCLEANER_SERVICE_URL)")
    parser.add_argument("--cache-dir", default=None, help="persistent embedding cache directory")
    parser.add_argument("--batch-size", type=int, default=32)
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--clamp", choices=("on", "off"), default="on",
                        help="clamp raw cosines to [0,1] before combining (default on)")


def _config_from_args(args: argparse.Namespace, split_test: bool = False) -> CleanConfig:
    return CleanConfig(
        embedder=args.embedder,
        service_url=args.service_url,
        cap=getattr(args, "cap", 0.8),
        clamp=args.clamp == "on",
        split_test=split_test,
        workers=args.workers,
        batch_size=args.batch_size,
        cache_dir=args.cache_dir,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cupcleaner",
                                     description="Score and clean comment-updating datasets.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_clean = sub.add_parser("clean", help="score, search anchor on train+valid, write split files")
    p_clean.add_argument("--train", required=True, help="train split (jsonl)")
    p_clean.add_argument("--valid", required=True, help="valid split (jsonl)")
    p_clean.add_argument("--test", default=None, help="test split (jsonl); never rewritten")
    p_clean.add_argument("--split-test", action="store_true",
                         help="also partition the test set by the train+valid anchor")
    p_clean.add_argument("--cap", type=float, default=0.8,
                         help="anchor cap; candidates above it fall back (default 0.8)")
    p_clean.add_argument("--out", default="out", help="output directory (default ./out)")
    _add_embedder_options(p_clean)

    p_score = sub.add_parser("score", help="score a dataset; write scores.csv and histogram.csv")
    p_score.add_argument("--input", required=True, help="dataset (jsonl)")
    p_score.add_argument("--out", default="out", help="output directory (default ./out)")
    _add_embedder_options(p_score)

    p_report = sub.add_parser("report", help="render a human-readable summary of report.json")
    p_report.add_argument("--in", dest="in_dir", required=True, help="directory holding report.json")

    p_sub = sub.add_parser("subsample", help="uniform per-split random subsample")
    p_sub.add_argument("--input", required=True)
    p_sub.add_argument("--rate", type=float, required=True)
    p_sub.add_argument("--seed", type=int, required=True)
    p_sub.add_argument("--output", default=None, help="default: <input>.subsample.jsonl")

    return parser


def _cmd_clean(args: argparse.Namespace) -> int:
    config = _config_from_args(args, split_test=args.split_test)
    train = load_dataset(args.train, split_override="train")
    valid = load_dataset(args.valid, split_override="valid")
    test = load_dataset(args.test, split_override="test") if args.test else None
    report = clean(train, valid, test, config=config, out_dir=args.out)
    print(report_render(report))
    print(f"outputs written to {args.out}")
    return EXIT_OK


def _cmd_score(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    dataset = load_dataset(args.input)
    info = score_only(dataset, config=config, out_dir=args.out)
    print(f"scored {info['scored']} samples ({info['unscored']} unscored)")
    t = info["timing"]
    print(f"embed {t['embed_seconds']:.2f} s, score {t['score_seconds']:.2f} s")
    return EXIT_OK


def _cmd_report(args: argparse.Namespace) -> int:
    path = Path(args.in_dir) / REPORT_JSON
    try:
        report = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed {path}: {exc}") from exc
    print(report_render(report))
    return EXIT_OK


def _cmd_subsample(args: argparse.Namespace) -> int:
    dataset = load_dataset(args.input)
    picked = subsample(dataset, args.rate, args.seed)
    output = args.output or str(Path(args.input).with_suffix(".subsample.jsonl"))
    count = write_dataset(picked, output)
    print(f"wrote {count} of {len(dataset.samples)} samples to {output}")
    return EXIT_OK


_COMMANDS = {
    "clean": _cmd_clean,
    "score": _cmd_score,
    "report": _cmd_report,
    "subsample": _cmd_subsample,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ProviderError as exc:
        print(f"error: embedding provider failure: {exc}", file=sys.stderr)
        return EXIT_PROVIDER
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
