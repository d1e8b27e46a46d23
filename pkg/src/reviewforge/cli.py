"""The ``forge`` command line: run, emit, sort, stats, eval."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import corpus, evalkit, pipeline
from .entailment import BackendConfig
from .errors import ForgeError


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="forge", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="produce silver records from a review corpus")
    p_run.add_argument("--corpus", required=True, help="reviews JSONL, sorted by item_id")
    p_run.add_argument("--out", required=True, help="silver records output path")
    p_run.add_argument("--backend", choices=["remote", "lexical"], default="lexical")
    p_run.add_argument("--endpoint", help="entailment service URL (remote backend)")
    p_run.add_argument("--tau", type=float, default=None,
                       help="optional entailment probability threshold in (0,1)")
    p_run.add_argument("--min-reviews", type=int, default=pipeline.DEFAULT_MIN_REVIEWS)
    p_run.add_argument("--min-clause-len", type=int, default=4)
    p_run.add_argument("--token-budget", type=int, default=75)
    p_run.add_argument("--max-overlap", type=int, default=2)
    p_run.add_argument("--pool-size", type=int, default=None,
                       help="cap on the candidate pool before redundancy filtering")
    p_run.add_argument("--strategy", choices=["uniform", "equal", "proportional"],
                       default="uniform")
    p_run.add_argument("--k", type=int, default=160, help="source reviews per record")
    p_run.add_argument("--seed", type=int, default=0)
    p_run.add_argument("--workers", type=int, default=1)
    p_run.add_argument("--batch-size", type=int, default=32)
    p_run.add_argument("--cache", default=None, help="persistent verdict cache path")
    p_run.add_argument("--checkpoint", default=None, help="resume log path (default: OUT.ckpt)")
    p_run.add_argument("--dump-propositions", default=None,
                       help="debug JSONL of every extracted proposition")

    p_emit = sub.add_parser("emit", help="render silver records as seq2seq training examples")
    p_emit.add_argument("--silver", required=True)
    p_emit.add_argument("--corpus", required=True)
    p_emit.add_argument("--out", required=True)
    p_emit.add_argument("--separator", default="\n", help="string joining the input reviews")

    p_sort = sub.add_parser("sort", help="sort a reviews file by item_id")
    p_sort.add_argument("--in", dest="in_path", required=True)
    p_sort.add_argument("--out", required=True)

    p_stats = sub.add_parser("stats", help="print run statistics from a run directory")
    p_stats.add_argument("--run-dir", required=True)

    p_eval = sub.add_parser("eval", help="multi-reference ROUGE against a gold file")
    p_eval.add_argument("--candidates", required=True)
    p_eval.add_argument("--gold", required=True)
    p_eval.add_argument("--agg", choices=["max", "mean"], default="max")
    p_eval.add_argument("--stem", action="store_true", help="Porter-stem tokens before matching")
    p_eval.add_argument("--out", default=None, help="write the report here instead of stdout")

    return parser


def _cmd_run(args: argparse.Namespace) -> int:
    backend = BackendConfig(
        kind=args.backend,
        endpoint=args.endpoint,
        entail_threshold=args.tau,
        batch_size=args.batch_size,
        cache_path=args.cache,
    )
    cfg = pipeline.RunConfig(
        backend=backend,
        min_reviews=args.min_reviews,
        min_clause_len=args.min_clause_len,
        token_budget=args.token_budget,
        max_overlap=args.max_overlap,
        pool_size=args.pool_size,
        strategy=args.strategy,
        k=args.k,
        seed=args.seed,
        workers=args.workers,
        checkpoint_path=args.checkpoint,
    )
    stats = pipeline.run(args.corpus, args.out, cfg, dump_propositions=args.dump_propositions)
    print(json.dumps(stats.to_dict(), indent=2))
    return 0 if stats.items_failed == 0 else 2


def _cmd_emit(args: argparse.Namespace) -> int:
    records = corpus.load_silver(args.silver)
    reviews = pipeline.load_review_texts(args.corpus)
    count = pipeline.emit_training_examples(records, reviews, args.out, args.separator)
    print(f"wrote {count} training example(s) to {args.out}")
    return 0


def _cmd_sort(args: argparse.Namespace) -> int:
    count = corpus.sort_reviews(args.in_path, args.out)
    print(f"wrote {count} review(s) to {args.out}")
    return 0


def _cmd_stats(args: argparse.Namespace) -> int:
    run_dir = Path(args.run_dir)
    if not run_dir.is_dir():
        print(f"not a directory: {run_dir}", file=sys.stderr)
        return 1
    found = sorted(run_dir.glob("*.stats.json"))
    if not found:
        print(f"no *.stats.json files under {run_dir}", file=sys.stderr)
        return 1
    for path in found:
        print(f"== {path.name}")
        print(path.read_text(encoding="utf-8").rstrip())
    return 0


def _cmd_eval(args: argparse.Namespace) -> int:
    report = evalkit.evaluate_file(args.candidates, args.gold, agg=args.agg, stemmed=args.stem)
    blob = json.dumps(report, indent=2)
    if args.out:
        Path(args.out).write_text(blob + "\n", encoding="utf-8")
        print(f"wrote report to {args.out}")
    else:
        print(blob)
    return 0


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    args = _build_parser().parse_args(argv)
    handlers = {
        "run": _cmd_run,
        "emit": _cmd_emit,
        "sort": _cmd_sort,
        "stats": _cmd_stats,
        "eval": _cmd_eval,
    }
    try:
        return handlers[args.command](args)
    except ForgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
