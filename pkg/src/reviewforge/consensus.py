"""Consensus scoring and silver-summary assembly for one item.

The consensus score of a proposition is the number of the item's reviews
that entail it (the proposition's own source review participates like any
other). Summary selection is greedy over decreasing score with a
content-word-overlap redundancy filter and a whitespace-token budget;
selected clauses are then polished into sentence form and concatenated in
selection order. No coherence reordering is applied.
"""

from __future__ import annotations

from dataclasses import dataclass

from .corpus import Item
from .entailment import BackendConfig, EntailmentJudge, EntailmentPair
from .propositions import COORDINATING_CONJUNCTIONS, Proposition
from .text import content_words

DEFAULT_TOKEN_BUDGET = 75
DEFAULT_MAX_OVERLAP = 2


@dataclass
class ScoredProposition:
    proposition: Proposition
    score: int
    support: list[str]  # review_ids in item review order
    support_fraction: float


@dataclass
class SilverSummary:
    selected: list[ScoredProposition]
    text: str
    token_count: int


def overlap(p: str, q: str) -> int:
    """Number of distinct content words the two texts share."""
    return len(content_words(p) & content_words(q))


def score_item(
    item: Item,
    props: list[Proposition],
    backend: BackendConfig | None = None,
    judge: EntailmentJudge | None = None,
    inflight: int = 1,
    tally: dict | None = None,
) -> list[ScoredProposition]:
    """Judge all N x M (review, proposition) pairs and tally support.

    Pass either a config (a throwaway judge is built) or a shared judge.
    ``inflight`` > 1 dispatches that many entailment batches concurrently,
    which only helps with the remote backend. ``tally`` collects per-item
    judged/hit pair counts (see ``EntailmentJudge.judge_batch``).
    """
    if judge is None:
        if backend is None:
            raise ValueError("score_item needs a backend config or a judge")
        with EntailmentJudge(backend) as owned:
            return score_item(item, props, judge=owned, inflight=inflight, tally=tally)

    if not props:
        return []
    pairs = [
        EntailmentPair(premise=review.text, hypothesis=prop.text)
        for review in item.reviews
        for prop in props
    ]
    batch = judge.cfg.batch_size
    chunks = [pairs[i : i + batch] for i in range(0, len(pairs), batch)]
    if inflight > 1 and len(chunks) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=min(inflight, len(chunks))) as pool:
            results = list(pool.map(lambda c: judge.judge_batch(c, tally=tally), chunks))
    else:
        results = [judge.judge_batch(chunk, tally=tally) for chunk in chunks]
    verdicts = [v for chunk in results for v in chunk]

    n_reviews = len(item.reviews)
    scored = []
    for j, prop in enumerate(props):
        support = [
            item.reviews[i].review_id
            for i in range(n_reviews)
            if verdicts[i * len(props) + j].supported
        ]
        scored.append(
            ScoredProposition(
                proposition=prop,
                score=len(support),
                support=support,
                support_fraction=len(support) / n_reviews,
            )
        )
    return scored


def select_summary(
    scored: list[ScoredProposition],
    token_budget: int = DEFAULT_TOKEN_BUDGET,
    max_overlap: int = DEFAULT_MAX_OVERLAP,
    pool_size: int | None = None,
) -> SilverSummary:
    """Greedy redundancy-filtered selection under a whitespace-token budget.

    Candidates are visited in decreasing score; ties keep list order, which
    is extraction order (review, sentence, span) for lists produced by
    ``score_item``. A candidate overlapping any already-selected proposition
    by >= max_overlap is rejected for good; one that only busts the budget
    stays eligible for later rounds (a shorter clause may still fit).
    Selection stops when a full pass selects nothing.
    """
    ranked = sorted(range(len(scored)), key=lambda i: (-scored[i].score, i))
    if pool_size is not None:
        ranked = ranked[:pool_size]

    selected: list[ScoredProposition] = []
    selected_words: list[set[str]] = []
    tokens_used = 0
    eligible = list(ranked)
    while True:
        chosen = None
        survivors = []
        for idx in eligible:
            cand = scored[idx]
            if chosen is not None:
                survivors.append(idx)
                continue
            words = content_words(cand.proposition.text)
            if any(len(words & prev) >= max_overlap for prev in selected_words):
                continue  # overlap rejection is permanent
            cost = len(cand.proposition.text.split())
            if tokens_used + cost > token_budget:
                survivors.append(idx)
                continue
            chosen = idx
            selected.append(cand)
            selected_words.append(words)
            tokens_used += cost
        eligible = survivors
        if chosen is None:
            break

    return SilverSummary(selected=selected, text=polish(selected), token_count=tokens_used)


def polish(selected: list[ScoredProposition]) -> str:
    """Render selected clauses as sentences: strip trailing commas and
    trailing coordinating conjunctions, ensure a terminal period, uppercase
    the first character, join with single spaces."""
    sentences = []
    for sp in selected:
        toks = sp.proposition.text.split()
        while toks:
            last = toks[-1]
            if last.lower() in COORDINATING_CONJUNCTIONS:
                toks.pop()
                continue
            stripped = last.rstrip(",")
            if stripped != last:
                if stripped:
                    toks[-1] = stripped
                else:
                    toks.pop()
                continue
            break
        if not toks:
            continue
        text = " ".join(toks)
        if not text.endswith((".", "!", "?")):
            text += "."
        sentences.append(text[0].upper() + text[1:])
    return " ".join(sentences)
