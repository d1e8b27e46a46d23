"""Source-side construction: provenance removal and seeded review sampling.

Removing every review a selected proposition was extracted from forces
trained models to abstract rather than copy. From the remaining pool,
``k`` reviews are drawn by one of three strategies:

  uniform       k reviews uniformly without replacement
  equal         floor(k/|S|) from each selected proposition's support set
  proportional  largest-remainder quotas proportional to support-set sizes

Reviews supporting several propositions count once; the quota that would
re-draw them draws a different review instead, and any shortfall plus the
quota remainder is backfilled uniformly from the rest of the pool. The
final id list is shuffled so quota structure leaves no positional trace.

All randomness comes from ``random.Random`` (Mersenne Twister, identical
across platforms) seeded per item with ``seed XOR blake2b64(item_id)``, so
output is reproducible for any worker count.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .consensus import SilverSummary
from .corpus import Item, Review
from .errors import SamplerError
from .text import stable_hash64

DEFAULT_SAMPLE_SIZE = 160

STRATEGIES = ("uniform", "equal", "proportional")

# key for per-proposition quota maps: (source_review_id, sentence_index, span_index)
PropKey = tuple[str, int, int]


@dataclass
class SampleConfig:
    strategy: str = "uniform"
    k: int = DEFAULT_SAMPLE_SIZE
    seed: int = 0

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.k < 1:
            raise ValueError("k must be >= 1")


@dataclass
class SourceSet:
    review_ids: list[str]
    strategy_used: str
    per_proposition_quota: dict[PropKey, int] = field(default_factory=dict)
    pool_exhausted: bool = False  # warning flag: pool had fewer than k reviews


def prop_key(summary_prop) -> PropKey:
    p = summary_prop.proposition
    return (p.source_review_id, p.sentence_index, p.span_index)


def remove_provenance(item: Item, summary: SilverSummary) -> list[Review]:
    """Drop every review that is the source of a selected proposition."""
    provenance = {sp.proposition.source_review_id for sp in summary.selected}
    return [r for r in item.reviews if r.review_id not in provenance]


def largest_remainder_quotas(weights: list[int], k: int) -> list[int]:
    """Apportion k slots proportionally to integer weights.

    Floors of the exact quotas first; leftover slots go to the largest
    fractional remainders (ties to earlier positions).
    """
    total = sum(weights)
    if total <= 0:
        return [0] * len(weights)
    exact = [k * w / total for w in weights]
    quotas = [int(e) for e in exact]
    leftover = k - sum(quotas)
    remainders = sorted(range(len(weights)), key=lambda i: (-(exact[i] - quotas[i]), i))
    for i in remainders[:leftover]:
        quotas[i] += 1
    return quotas


def sample_sources(
    pool: list[Review],
    summary: SilverSummary,
    support_sets: dict[PropKey, list[str]],
    cfg: SampleConfig,
) -> SourceSet:
    """Draw the source review ids for one silver record.

    ``pool`` must already exclude provenance reviews; ``support_sets`` maps
    each selected proposition to its supporting review ids restricted to the
    pool, in pool order.
    """
    if not pool:
        raise SamplerError("review pool is empty after provenance removal")
    rng = random.Random(cfg.seed ^ stable_hash64(pool[0].item_id))
    pool_ids = [r.review_id for r in pool]
    target = min(cfg.k, len(pool_ids))
    exhausted = len(pool_ids) < cfg.k

    props = [prop_key(sp) for sp in summary.selected]
    quotas: dict[PropKey, int] = {}

    if cfg.strategy == "uniform" or not props:
        chosen = rng.sample(pool_ids, target)
    else:
        if cfg.strategy == "equal":
            per = cfg.k // len(props)
            quotas = {p: per for p in props}
        else:  # proportional
            weights = [len(support_sets.get(p, [])) for p in props]
            for p, quota in zip(props, largest_remainder_quotas(weights, cfg.k)):
                quotas[p] = quota
        chosen_set: set[str] = set()
        chosen = []
        for p in props:
            available = [rid for rid in support_sets.get(p, []) if rid not in chosen_set]
            take = min(quotas[p], len(available), target - len(chosen))
            for rid in rng.sample(available, take):
                chosen_set.add(rid)
                chosen.append(rid)
        remaining = [rid for rid in pool_ids if rid not in chosen_set]
        backfill = target - len(chosen)
        if backfill > 0:
            chosen.extend(rng.sample(remaining, backfill))
        rng.shuffle(chosen)

    return SourceSet(
        review_ids=chosen,
        strategy_used=cfg.strategy,
        per_proposition_quota=quotas,
        pool_exhausted=exhausted,
    )
