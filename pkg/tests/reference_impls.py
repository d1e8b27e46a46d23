"""Independent oracles for equivalence testing.

Everything here is written directly from the contract wording, on purpose
NOT sharing code with the package (only the pinned stopword data file is
common, since it defines the content-word vocabulary itself).
"""

from __future__ import annotations

import re
from importlib import resources

_STOPWORDS = frozenset(
    w
    for w in resources.files("reviewforge")
    .joinpath("data/stopwords_en.txt")
    .read_text(encoding="utf-8")
    .splitlines()
    if w
)

_EDGE = re.compile(r"^\W+|\W+$")


def ref_content_words(text: str) -> set[str]:
    out = set()
    for tok in text.lower().split():
        tok = _EDGE.sub("", tok)
        if tok and tok not in _STOPWORDS:
            out.add(tok)
    return out


def ref_lexical_entails(premise: str, hypothesis: str) -> bool:
    hyp = ref_content_words(hypothesis)
    return bool(hyp) and hyp <= ref_content_words(premise)


def ref_scores(reviews: list[str], prop_texts: list[str]) -> list[int]:
    """Brute-force double loop over every (review, proposition) pair."""
    scores = []
    for prop in prop_texts:
        count = 0
        for review in reviews:
            if ref_lexical_entails(review, prop):
                count += 1
        scores.append(count)
    return scores


def ref_overlap(p: str, q: str) -> int:
    return len(ref_content_words(p) & ref_content_words(q))


def ref_select(
    candidates: list[tuple[str, int]], token_budget: int, max_overlap: int = 2
) -> list[int]:
    """Step-by-step greedy simulation; candidates are (text, score) in
    extraction order. Returns selected candidate indices in pick order."""
    order = sorted(range(len(candidates)), key=lambda i: (-candidates[i][1], i))
    selected: list[int] = []
    used_tokens = 0
    dropped: set[int] = set()
    while True:
        pick = None
        for i in order:
            if i in dropped or i in selected:
                continue
            text = candidates[i][0]
            if any(ref_overlap(text, candidates[j][0]) >= max_overlap for j in selected):
                dropped.add(i)
                continue
            cost = len(text.split())
            if used_tokens + cost > token_budget:
                continue
            pick = i
            break
        if pick is None:
            return selected
        selected.append(pick)
        used_tokens += len(candidates[pick][0].split())


def ref_quotas(weights: list[int], k: int) -> list[int]:
    """Largest-remainder apportionment, written from the definition."""
    total = sum(weights)
    if total == 0:
        return [0] * len(weights)
    shares = [(k * w) / total for w in weights]
    base = [int(s) for s in shares]
    short = k - sum(base)
    by_remainder = sorted(range(len(weights)), key=lambda i: (base[i] - shares[i], i))
    for i in by_remainder[:short]:
        base[i] += 1
    return base
