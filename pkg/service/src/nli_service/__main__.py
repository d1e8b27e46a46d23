"""Run the service: ``python -m nli_service`` or the ``nli-service`` script."""

from __future__ import annotations

import argparse

import uvicorn

from .app import create_app
from .config import DEFAULT_MODEL, ServiceConfig


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="nli-service", description=__doc__)
    parser.add_argument("--model", default=DEFAULT_MODEL,
                        help="checkpoint identifier or local path; debug/overlap runs without weights")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8080)
    parser.add_argument("--max-batch", type=int, default=128)
    parser.add_argument("--max-sequence-pieces", type=int, default=512)
    parser.add_argument("--micro-batch", type=int, default=16)
    parser.add_argument("--max-concurrent", type=int, default=4)
    parser.add_argument("--mnli-dev-accuracy", type=float, default=None,
                        help="recorded matched-dev accuracy for /v1/info (overrides the registry)")
    args = parser.parse_args(argv)

    cfg = ServiceConfig(
        model=args.model,
        host=args.host,
        port=args.port,
        max_batch=args.max_batch,
        max_sequence_pieces=args.max_sequence_pieces,
        micro_batch=args.micro_batch,
        max_concurrent=args.max_concurrent,
        mnli_dev_accuracy=args.mnli_dev_accuracy,
    )
    uvicorn.run(create_app(cfg), host=cfg.host, port=cfg.port, log_level="info")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
