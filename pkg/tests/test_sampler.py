import random

import pytest

from reference_impls import ref_quotas
from reviewforge.consensus import ScoredProposition, SilverSummary
from reviewforge.corpus import Item, Review
from reviewforge.errors import SamplerError
from reviewforge.propositions import Proposition
from reviewforge.sampler import (
    SampleConfig,
    largest_remainder_quotas,
    prop_key,
    remove_provenance,
    sample_sources,
)


def _item(n, item_id="h0"):
    return Item(item_id, [Review(item_id, f"r{i}", f"review text {i}") for i in range(n)])


def _summary(*source_review_ids, item_id="h0"):
    selected = []
    for i, rid in enumerate(source_review_ids):
        prop = Proposition(
            text=f"prop {i}",
            source_review_id=rid,
            source_item_id=item_id,
            sentence_index=0,
            span_index=i,
        )
        selected.append(
            ScoredProposition(proposition=prop, score=1, support=[rid], support_fraction=0.5)
        )
    return SilverSummary(selected=selected, text="", token_count=0)


def test_remove_provenance_figure_case():
    item = _item(5)
    pool = remove_provenance(item, _summary("r1", "r3"))  # props came from R2 and R4 (1-based)
    assert [r.review_id for r in pool] == ["r0", "r2", "r4"]


def test_remove_provenance_empty_summary():
    item = _item(5)
    pool = remove_provenance(item, SilverSummary(selected=[], text="", token_count=0))
    assert len(pool) == 5


def test_remove_provenance_same_review_twice():
    item = _item(5)
    pool = remove_provenance(item, _summary("r2", "r2"))
    assert [r.review_id for r in pool] == ["r0", "r1", "r3", "r4"]


def test_largest_remainder_example():
    assert largest_remainder_quotas([40, 10], 10) == [8, 2]


def test_largest_remainder_rounds_to_k():
    rng = random.Random(3)
    for _ in range(200):
        weights = [rng.randint(0, 50) for _ in range(rng.randint(1, 8))]
        k = rng.randint(1, 40)
        quotas = largest_remainder_quotas(weights, k)
        if sum(weights) > 0:
            assert sum(quotas) == k
            total = sum(weights)
            for w, q in zip(weights, quotas):
                assert abs(q - k * w / total) < 1.0
        else:
            assert quotas == [0] * len(weights)
        assert quotas == ref_quotas(weights, k)


def test_uniform_exhausts_small_pool():
    item = _item(3)
    summary = SilverSummary(selected=[], text="", token_count=0)
    out = sample_sources(item.reviews, summary, {}, SampleConfig(strategy="uniform", k=3, seed=1))
    assert sorted(out.review_ids) == ["r0", "r1", "r2"]
    assert not out.pool_exhausted


def test_pool_smaller_than_k_sets_flag():
    item = _item(3)
    summary = SilverSummary(selected=[], text="", token_count=0)
    out = sample_sources(item.reviews, summary, {}, SampleConfig(strategy="uniform", k=10, seed=1))
    assert sorted(out.review_ids) == ["r0", "r1", "r2"]
    assert out.pool_exhausted


def test_empty_pool_is_an_error():
    summary = _summary("r0")
    with pytest.raises(SamplerError):
        sample_sources([], summary, {}, SampleConfig(strategy="uniform", k=4, seed=1))


def test_equal_quota_is_floor_k_over_s():
    item = _item(30)
    summary = _summary("r0", "r1")
    pool = remove_provenance(item, summary)
    pool_ids = [r.review_id for r in pool]
    support = {
        prop_key(summary.selected[0]): pool_ids[:10],
        prop_key(summary.selected[1]): pool_ids[10:20],
    }
    out = sample_sources(pool, summary, support, SampleConfig(strategy="equal", k=10, seed=7))
    assert all(q == 5 for q in out.per_proposition_quota.values())
    assert len(out.review_ids) == 10
    assert len(set(out.review_ids)) == 10


def test_proportional_quotas_follow_support_sizes():
    item = _item(60)
    summary = _summary("r50", "r51")
    pool = remove_provenance(item, summary)
    pool_ids = [r.review_id for r in pool]
    support = {
        prop_key(summary.selected[0]): pool_ids[:40],
        prop_key(summary.selected[1]): pool_ids[40:50],
    }
    out = sample_sources(pool, summary, support, SampleConfig(strategy="proportional", k=10, seed=7))
    quotas = out.per_proposition_quota
    assert quotas[prop_key(summary.selected[0])] == 8
    assert quotas[prop_key(summary.selected[1])] == 2
    assert len(out.review_ids) == 10
    # disjoint support sets of sufficient size: representation equals quota
    drawn_a = sum(1 for rid in out.review_ids if rid in set(pool_ids[:40]))
    drawn_b = sum(1 for rid in out.review_ids if rid in set(pool_ids[40:50]))
    assert (drawn_a, drawn_b) == (8, 2)


def test_overlapping_support_sets_deduplicate_and_backfill():
    item = _item(12)
    summary = _summary("r10", "r11")
    pool = remove_provenance(item, summary)
    pool_ids = [r.review_id for r in pool]
    shared = pool_ids[:4]  # both propositions supported by the same four reviews
    support = {
        prop_key(summary.selected[0]): shared,
        prop_key(summary.selected[1]): shared,
    }
    out = sample_sources(pool, summary, support, SampleConfig(strategy="equal", k=8, seed=5))
    assert len(out.review_ids) == 8
    assert len(set(out.review_ids)) == 8


def test_provenance_never_sampled_fuzz():
    rng = random.Random(13)
    for trial in range(100):
        n = rng.randint(3, 25)
        item = _item(n, item_id=f"h{trial}")
        sources = rng.sample([f"r{i}" for i in range(n)], rng.randint(0, min(3, n - 1)))
        summary = _summary(*sources, item_id=f"h{trial}") if sources else SilverSummary([], "", 0)
        pool = remove_provenance(item, summary)
        if not pool:
            continue
        pool_ids = [r.review_id for r in pool]
        support = {
            prop_key(sp): rng.sample(pool_ids, rng.randint(0, len(pool_ids)))
            for sp in summary.selected
        }
        strategy = rng.choice(["uniform", "equal", "proportional"])
        cfg = SampleConfig(strategy=strategy, k=rng.randint(1, 30), seed=rng.randint(0, 99))
        out = sample_sources(pool, summary, support, cfg)
        assert not set(out.review_ids) & set(sources)
        assert len(out.review_ids) == min(cfg.k, len(pool_ids))
        assert len(set(out.review_ids)) == len(out.review_ids)


def test_support_preservation():
    # only the single provenance review is removed, so any proposition with
    # two or more supporters keeps at least one in the pool
    item = _item(6)
    summary = _summary("r0")
    (sp,) = summary.selected
    sp.support = ["r0", "r3"]
    pool = remove_provenance(item, summary)
    pool_ids = {r.review_id for r in pool}
    assert set(sp.support) & pool_ids


def test_fixed_seed_is_deterministic():
    item = _item(40)
    summary = _summary("r30")
    pool = remove_provenance(item, summary)
    pool_ids = [r.review_id for r in pool]
    support = {prop_key(summary.selected[0]): pool_ids[:12]}
    cfg = SampleConfig(strategy="proportional", k=15, seed=42)
    first = sample_sources(pool, summary, support, cfg)
    second = sample_sources(pool, summary, support, cfg)
    assert first.review_ids == second.review_ids

    other = sample_sources(pool, summary, support, SampleConfig(strategy="proportional", k=15, seed=43))
    assert first.review_ids != other.review_ids


def test_output_order_is_shuffled_not_quota_grouped():
    item = _item(40)
    summary = _summary("r38", "r39")
    pool = remove_provenance(item, summary)
    pool_ids = [r.review_id for r in pool]
    support = {
        prop_key(summary.selected[0]): pool_ids[:19],
        prop_key(summary.selected[1]): pool_ids[19:38],
    }
    out = sample_sources(pool, summary, support, SampleConfig(strategy="equal", k=20, seed=3))
    first_group = set(pool_ids[:19])
    # with ten draws per quota, a grouped layout would put all group-A ids first
    head = out.review_ids[:10]
    assert any(rid not in first_group for rid in head)
