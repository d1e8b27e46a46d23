"""End-to-end silver-data runs: extract, judge, score, select, sample, emit.

Items are processed in parallel by a thread pool but records are written in
corpus order by the single coordinator, so output bytes never depend on the
worker count. A checkpoint (completed item ids plus file offsets) makes an
interrupted run resumable: records already on disk are kept as-is, the
partial tail is truncated, and skipped items are re-scored purely from the
verdict cache, which keeps the pair-accounting identity exact without
touching the backend.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import time
from concurrent.futures import FIRST_COMPLETED, Future, ThreadPoolExecutor, wait
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

from .consensus import (
    DEFAULT_MAX_OVERLAP,
    DEFAULT_TOKEN_BUDGET,
    score_item,
    select_summary,
)
from .corpus import (
    Item,
    SelectedProposition,
    SilverRecord,
    iter_items,
    iter_reviews,
)
from .entailment import BackendConfig, EntailmentJudge
from .errors import CheckpointError, CorpusError, ForgeError
from .propositions import DEFAULT_MIN_CLAUSE_LEN, Proposition, extract_all
from .sampler import DEFAULT_SAMPLE_SIZE, SampleConfig, prop_key, remove_provenance, sample_sources
from .text import stopwords_sha256, token_count

log = logging.getLogger(__name__)

DEFAULT_MIN_REVIEWS = 50
# whitespace-token length beyond which a premise likely exceeds a remote
# model's sequence budget; counted into run stats as a truncation signal
LONG_PREMISE_TOKENS = 256


@dataclass
class RunConfig:
    backend: BackendConfig
    min_reviews: int = DEFAULT_MIN_REVIEWS
    min_clause_len: int = DEFAULT_MIN_CLAUSE_LEN
    token_budget: int = DEFAULT_TOKEN_BUDGET
    max_overlap: int = DEFAULT_MAX_OVERLAP
    pool_size: int | None = None
    strategy: str = "uniform"
    k: int = DEFAULT_SAMPLE_SIZE
    seed: int = 0
    workers: int = 1
    checkpoint_path: str | Path | None = None
    inflight: int = 1

    def fingerprint(self) -> str:
        knobs = {
            "delimiters": "conjunction,comma,period",
            "min_clause_len": self.min_clause_len,
            "backend": self.backend.identity,
            "tau": self.backend.entail_threshold,
            "token_budget": self.token_budget,
            "max_overlap": self.max_overlap,
            "pool_size": self.pool_size,
            "strategy": self.strategy,
            "k": self.k,
            "seed": self.seed,
            "stopwords_sha256": stopwords_sha256(),
        }
        blob = json.dumps(knobs, sort_keys=True).encode("utf-8")
        return hashlib.sha256(blob).hexdigest()[:32]


@dataclass
class RunStats:
    items_total: int = 0
    items_done: int = 0
    items_failed: int = 0
    pairs_judged: int = 0
    cache_hits: int = 0
    wall_time: float = 0.0
    extras: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            "items_total": self.items_total,
            "items_done": self.items_done,
            "items_failed": self.items_failed,
            "pairs_judged": self.pairs_judged,
            "cache_hits": self.cache_hits,
            "wall_time": self.wall_time,
        }
        out.update(self.extras)
        return out


@dataclass
class _ItemResult:
    item_id: str
    record: SilverRecord | None
    props: list[Proposition]
    pairs_judged: int
    cache_hits: int
    long_premises: int
    error: str | None = None


def _process_item(item: Item, cfg: RunConfig, judge: EntailmentJudge, fingerprint: str) -> _ItemResult:
    props = extract_all(item, min_clause_len=cfg.min_clause_len)
    tally = {"judged": 0, "hits": 0}
    long_premises = sum(1 for r in item.reviews if token_count(r.text) > LONG_PREMISE_TOKENS) * len(props)
    try:
        scored = score_item(item, props, judge=judge, inflight=cfg.inflight, tally=tally)
        # propositions no review supports cannot carry a consensus summary
        supported = [sp for sp in scored if sp.score > 0]
        summary = select_summary(
            supported,
            token_budget=cfg.token_budget,
            max_overlap=cfg.max_overlap,
            pool_size=cfg.pool_size,
        )
        pool = remove_provenance(item, summary)
        pool_ids = {r.review_id for r in pool}
        support_sets = {
            prop_key(sp): [rid for rid in sp.support if rid in pool_ids]
            for sp in summary.selected
        }
        source = sample_sources(
            pool,
            summary,
            support_sets,
            SampleConfig(strategy=cfg.strategy, k=cfg.k, seed=cfg.seed),
        )
    except ForgeError as exc:
        return _ItemResult(
            item_id=item.item_id,
            record=None,
            props=props,
            pairs_judged=tally["judged"],
            cache_hits=tally["hits"],
            long_premises=long_premises,
            error=f"{type(exc).__name__}: {exc}",
        )

    flags = []
    if not summary.selected:
        flags.append("empty_summary")
    if source.pool_exhausted:
        flags.append("pool_exhausted")
    record = SilverRecord(
        item_id=item.item_id,
        summary_text=summary.text,
        selected=[
            SelectedProposition(
                text=sp.proposition.text,
                score=sp.score,
                support_fraction=sp.support_fraction,
                support=tuple(sp.support),
                source_review_id=sp.proposition.source_review_id,
            )
            for sp in summary.selected
        ],
        source_review_ids=list(source.review_ids),
        config_fingerprint=fingerprint,
        flags=flags,
    )
    return _ItemResult(
        item_id=item.item_id,
        record=record,
        props=props,
        pairs_judged=tally["judged"],
        cache_hits=tally["hits"],
        long_premises=long_premises,
    )


class _Checkpoint:
    """Append-only resume log: a header line, then one line per written item."""

    def __init__(self, path: Path, fingerprint: str):
        self.path = path
        self.fingerprint = fingerprint
        self.completed: dict[str, int] = {}
        self.last_offset = 0
        self._fh = None

    def load(self) -> bool:
        """Read an existing checkpoint; True when it is resumable."""
        if not self.path.exists():
            return False
        try:
            with open(self.path, encoding="utf-8") as fh:
                lines = fh.read().splitlines()
            header = json.loads(lines[0])
            if header.get("fingerprint") != self.fingerprint:
                log.warning("checkpoint fingerprint differs; starting fresh")
                return False
            for line in lines[1:]:
                try:
                    entry = json.loads(line)
                    self.completed[entry["item_id"]] = entry["offset"]
                    self.last_offset = entry["offset"]
                except (json.JSONDecodeError, KeyError):
                    break  # torn tail from a kill
            return True
        except (json.JSONDecodeError, IndexError, OSError):
            return False

    def start(self, resume: bool) -> None:
        if resume:
            self._fh = open(self.path, "a", encoding="utf-8")
        else:
            self.completed = {}
            self.last_offset = 0
            self._fh = open(self.path, "w", encoding="utf-8")
            self._fh.write(json.dumps({"version": 1, "fingerprint": self.fingerprint}) + "\n")
            self._fh.flush()

    def mark(self, item_id: str, offset: int) -> None:
        self._fh.write(json.dumps({"item_id": item_id, "offset": offset}) + "\n")
        self._fh.flush()

    def close(self, delete: bool = False) -> None:
        if self._fh is not None:
            self._fh.close()
            self._fh = None
        if delete and self.path.exists():
            self.path.unlink()


def _ordered_parallel(fn, items: Iterator[Item], workers: int) -> Iterator[_ItemResult]:
    """Map fn over items with a pool, yielding results in input order."""
    if workers <= 1:
        for item in items:
            yield fn(item)
        return
    window = workers * 2
    with ThreadPoolExecutor(max_workers=workers) as pool:
        pending: list[Future] = []
        for item in items:
            pending.append(pool.submit(fn, item))
            if len(pending) >= window:
                wait([pending[0]], return_when=FIRST_COMPLETED)
                yield pending.pop(0).result()
        for future in pending:
            yield future.result()


def run(
    corpus_path: str | Path,
    out_path: str | Path,
    cfg: RunConfig,
    dump_propositions: str | Path | None = None,
) -> RunStats:
    """Produce one silver record per eligible, non-failed item.

    Returns run statistics; also writes them to ``<out>.stats.json``.
    """
    started = time.monotonic()
    out_path = Path(out_path)
    partial = out_path.with_name(out_path.name + ".partial")
    ckpt_path = Path(cfg.checkpoint_path) if cfg.checkpoint_path else out_path.with_name(out_path.name + ".ckpt")
    fingerprint = cfg.fingerprint()

    ckpt = _Checkpoint(ckpt_path, fingerprint)
    resume = ckpt.load() and partial.exists()
    if resume and partial.stat().st_size < ckpt.last_offset:
        raise CheckpointError(f"{partial} is shorter than the checkpoint expects")
    if resume:
        with open(partial, "r+b") as fh:
            fh.truncate(ckpt.last_offset)
    else:
        partial.write_bytes(b"")
    ckpt.start(resume)

    stats = RunStats()
    corpus_counts: dict[str, int] = {}
    failures: list[dict[str, str]] = []
    judge = EntailmentJudge(cfg.backend)
    dump_fh = open(dump_propositions, "w", encoding="utf-8") if dump_propositions else None

    try:
        items = iter_items(corpus_path, min_reviews=cfg.min_reviews, stats=corpus_counts)
        out_fh = open(partial, "ab")  # binary: tell() must be an exact byte offset
        try:
            worker = lambda item: _process_item(item, cfg, judge, fingerprint)
            for result in _ordered_parallel(worker, items, cfg.workers):
                stats.items_total += 1
                if result.error is not None:
                    stats.items_failed += 1
                    failures.append({"item_id": result.item_id, "error": result.error})
                    log.error("item %s failed: %s", result.item_id, result.error)
                    continue
                stats.items_done += 1
                stats.pairs_judged += result.pairs_judged
                stats.cache_hits += result.cache_hits
                stats.extras["long_premise_pairs"] = (
                    stats.extras.get("long_premise_pairs", 0) + result.long_premises
                )
                if dump_fh is not None:
                    for prop in result.props:
                        dump_fh.write(
                            json.dumps(
                                {
                                    "item_id": prop.source_item_id,
                                    "review_id": prop.source_review_id,
                                    "sentence_index": prop.sentence_index,
                                    "span_index": prop.span_index,
                                    "text": prop.text,
                                },
                                ensure_ascii=False,
                            )
                            + "\n"
                        )
                if result.item_id in ckpt.completed:
                    continue  # record already on disk from the interrupted run
                out_fh.write((result.record.to_json() + "\n").encode("utf-8"))
                out_fh.flush()
                ckpt.mark(result.item_id, out_fh.tell())
        finally:
            out_fh.close()
            if dump_fh is not None:
                dump_fh.close()
    finally:
        judge.close()

    os.replace(partial, out_path)
    ckpt.close(delete=True)

    stats.wall_time = time.monotonic() - started
    stats.extras["items_excluded"] = corpus_counts.get("excluded_items", 0)
    stats.extras["config_fingerprint"] = fingerprint
    stats.extras["seed"] = cfg.seed
    stats.extras["strategy"] = cfg.strategy
    stats.extras["k"] = cfg.k
    if failures:
        stats.extras["failures"] = failures
    stats_path = out_path.with_name(out_path.name + ".stats.json")
    stats_path.write_text(json.dumps(stats.to_dict(), indent=2) + "\n", encoding="utf-8")
    return stats


def emit_training_examples(
    records: list[SilverRecord],
    reviews_by_id: dict[tuple[str, str], str],
    out_path: str | Path,
    review_separator: str = "\n",
) -> int:
    """Write {"inputs", "targets"} JSONL for sequence-to-sequence training."""
    count = 0
    with open(out_path, "w", encoding="utf-8") as fh:
        for record in records:
            texts = []
            for review_id in record.source_review_ids:
                key = (record.item_id, review_id)
                if key not in reviews_by_id:
                    raise CorpusError(
                        f"item {record.item_id}: source review {review_id!r} not in corpus"
                    )
                texts.append(reviews_by_id[key])
            fh.write(
                json.dumps(
                    {"inputs": review_separator.join(texts), "targets": record.summary_text},
                    ensure_ascii=False,
                )
                + "\n"
            )
            count += 1
    return count


def load_review_texts(corpus_path: str | Path) -> dict[tuple[str, str], str]:
    """Map (item_id, review_id) to review text for ``emit_training_examples``."""
    out: dict[tuple[str, str], str] = {}
    for _, review in iter_reviews(corpus_path):
        out[(review.item_id, review.review_id)] = review.text
    return out
