"""CLI entry point: configure and serve.

Flags override the optional JSON config file; see config.ServiceConfig for
defaults. The hash backend serves the same deterministic vectors as the
pipeline's offline embedder and needs no model downloads.
"""

from __future__ import annotations

import argparse
import sys

from .config import ServiceConfig, load_config


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="embedsvc", description="cupcleaner embedding service")
    parser.add_argument("--config", default=None, help="JSON config file")
    parser.add_argument("--host", default=None)
    parser.add_argument("--port", type=int, default=None)
    parser.add_argument("--backend", choices=("transformer", "hash"), default=None)
    parser.add_argument("--device", default=None, help="cpu or cuda[:N]")
    parser.add_argument("--max-batch", type=int, default=None)
    parser.add_argument("--code-model", default=None, help="token-level checkpoint id")
    parser.add_argument("--sentence-model", default=None, help="sentence checkpoint id")
    parser.add_argument("--max-length", type=int, default=None,
                        help="max input length (model tokens) for both channels")
    return parser


def config_from_args(args: argparse.Namespace) -> ServiceConfig:
    config = load_config(args.config) if args.config else ServiceConfig()
    for key in ("host", "port", "backend", "device"):
        value = getattr(args, key)
        if value is not None:
            setattr(config, key, value)
    if args.max_batch is not None:
        config.max_batch = args.max_batch
    if args.code_model is not None:
        config.code.model_id = args.code_model
    if args.sentence_model is not None:
        config.sentence.model_id = args.sentence_model
    if args.max_length is not None:
        config.code.max_length = args.max_length
        config.sentence.max_length = args.max_length
    return config


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    config = config_from_args(args)

    import uvicorn

    from .app import create_app

    uvicorn.run(create_app(config), host=config.host, port=config.port)
    return 0


if __name__ == "__main__":
    sys.exit(main())
