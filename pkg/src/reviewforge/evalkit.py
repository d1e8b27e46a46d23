"""Multi-reference ROUGE scoring and the few-shot development split.

Tokens are lowercased and punctuation-stripped (stopwords kept). ROUGE-1/2
use clipped n-gram counts, ROUGE-L the longest common subsequence. With
several references, each of precision/recall/f1 is aggregated across
references component-wise (max by default, mean optionally), the common
convention for multi-reference ROUGE.
"""

from __future__ import annotations

import json
import random
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

from .corpus import load_gold
from .errors import EvalError
from .stemmer import stem
from .text import word_tokens

TRAIN_SIZE = 15
VAL_SIZE = 10


@dataclass(frozen=True)
class ScoreTriple:
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class RougeScore:
    r1: ScoreTriple
    r2: ScoreTriple
    rl: ScoreTriple


@dataclass(frozen=True)
class SplitSpec:
    train_ids: tuple[str, ...]
    val_ids: tuple[str, ...]
    test_ids: tuple[str, ...]
    seed: int


def _f1(precision: float, recall: float) -> float:
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def _triple(match: float, cand_total: int, ref_total: int) -> ScoreTriple:
    precision = match / cand_total if cand_total else 0.0
    recall = match / ref_total if ref_total else 0.0
    return ScoreTriple(precision=precision, recall=recall, f1=_f1(precision, recall))


def _ngrams(toks: list[str], n: int) -> Counter:
    return Counter(tuple(toks[i : i + n]) for i in range(len(toks) - n + 1))


def _ngram_triple(cand: list[str], ref: list[str], n: int) -> ScoreTriple:
    cand_counts, ref_counts = _ngrams(cand, n), _ngrams(ref, n)
    match = sum((cand_counts & ref_counts).values())
    return _triple(match, sum(cand_counts.values()), sum(ref_counts.values()))


def _lcs_len(a: list[str], b: list[str]) -> int:
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for i in range(1, len(a) + 1):
        cur = [0] * (len(b) + 1)
        ai = a[i - 1]
        for j in range(1, len(b) + 1):
            if ai == b[j - 1]:
                cur[j] = prev[j - 1] + 1
            else:
                cur[j] = max(prev[j], cur[j - 1])
        prev = cur
    return prev[len(b)]


def _tokens(text: str, stemmed: bool) -> list[str]:
    toks = word_tokens(text)
    if stemmed:
        toks = [stem(t) for t in toks]
    return toks


def rouge(
    candidate: str,
    references: list[str],
    agg: str = "max",
    stemmed: bool = False,
) -> RougeScore:
    """ROUGE-1/2/L of a candidate against one or more references."""
    if not references:
        raise EvalError("rouge needs at least one reference")
    if agg not in ("max", "mean"):
        raise EvalError(f"unknown aggregation {agg!r}")
    cand = _tokens(candidate, stemmed)
    per_ref: list[RougeScore] = []
    for reference in references:
        ref = _tokens(reference, stemmed)
        lcs = _lcs_len(cand, ref)
        per_ref.append(
            RougeScore(
                r1=_ngram_triple(cand, ref, 1),
                r2=_ngram_triple(cand, ref, 2),
                rl=_triple(lcs, len(cand), len(ref)),
            )
        )
    if len(per_ref) == 1:
        return per_ref[0]
    combine = max if agg == "max" else (lambda vals: sum(vals) / len(vals))
    parts = {}
    for metric in ("r1", "r2", "rl"):
        parts[metric] = ScoreTriple(
            precision=combine([getattr(s, metric).precision for s in per_ref]),
            recall=combine([getattr(s, metric).recall for s in per_ref]),
            f1=combine([getattr(s, metric).f1 for s in per_ref]),
        )
    return RougeScore(**parts)


def make_split(
    dev_item_ids: list[str], seed: int, test_item_ids: list[str] | None = None
) -> SplitSpec:
    """Shuffle the 25 development items into 15 train / 10 validation."""
    if len(dev_item_ids) != TRAIN_SIZE + VAL_SIZE:
        raise EvalError(f"expected {TRAIN_SIZE + VAL_SIZE} dev ids, got {len(dev_item_ids)}")
    if len(set(dev_item_ids)) != len(dev_item_ids):
        raise EvalError("dev ids must be distinct")
    shuffled = list(dev_item_ids)
    random.Random(seed).shuffle(shuffled)
    test = tuple(test_item_ids or ())
    if set(test) & set(dev_item_ids):
        raise EvalError("test ids overlap dev ids")
    return SplitSpec(
        train_ids=tuple(shuffled[:TRAIN_SIZE]),
        val_ids=tuple(shuffled[TRAIN_SIZE:]),
        test_ids=test,
        seed=seed,
    )


def _triple_dict(t: ScoreTriple) -> dict[str, float]:
    return {"precision": t.precision, "recall": t.recall, "f1": t.f1}


def _score_dict(s: RougeScore) -> dict[str, dict[str, float]]:
    return {"r1": _triple_dict(s.r1), "r2": _triple_dict(s.r2), "rl": _triple_dict(s.rl)}


def load_candidates(path: str | Path) -> dict[str, str]:
    """Candidate summaries: JSONL with item_id plus summary (or summary_text)."""
    out: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                raw = json.loads(line)
                item_id = raw["item_id"]
                summary = raw["summary"] if "summary" in raw else raw["summary_text"]
            except (json.JSONDecodeError, KeyError) as exc:
                raise EvalError(f"line {lineno}: bad candidate record: {exc}") from exc
            out[item_id] = summary
    if not out:
        raise EvalError(f"no candidates found in {path}")
    return out


def evaluate_file(
    candidates_path: str | Path,
    gold_path: str | Path,
    agg: str = "max",
    stemmed: bool = False,
) -> dict:
    """Score a candidates file against a gold file; returns the report dict."""
    candidates = load_candidates(candidates_path)
    gold = {g.item_id: g for g in load_gold(gold_path)}
    missing = sorted(set(candidates) - set(gold))
    if missing:
        raise EvalError(f"candidate item(s) missing from gold: {missing}")

    per_item = []
    sums: dict[str, dict[str, float]] = {
        m: {"precision": 0.0, "recall": 0.0, "f1": 0.0} for m in ("r1", "r2", "rl")
    }
    for item_id in sorted(candidates):
        score = rouge(candidates[item_id], gold[item_id].references, agg=agg, stemmed=stemmed)
        entry = {"item_id": item_id}
        entry.update(_score_dict(score))
        per_item.append(entry)
        for metric in ("r1", "r2", "rl"):
            for component, value in entry[metric].items():
                sums[metric][component] += value

    n = len(per_item)
    mean = {m: {c: v / n for c, v in parts.items()} for m, parts in sums.items()}
    return {
        "per_item": per_item,
        "mean": mean,
        "config": {"agg": agg, "stem": stemmed, "items": n},
    }
