"""Data model and file I/O for review corpora, gold eval sets, and silver output.

File formats (all JSON Lines, UTF-8, invalid bytes are a hard error):
  reviews:  {"item_id": str, "review_id": str, "text": str}
  gold:     {"item_id": str, "reviews": [{"review_id": str, "text": str}],
             "references": [str]}
  silver:   one record per line, see ``SilverRecord``.

Review files must be sorted (grouped) by item_id; ``iter_items`` fails fast
when the order regresses. ``forge sort`` pre-sorts unsorted input.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

from .errors import CorpusError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Review:
    item_id: str
    review_id: str
    text: str


@dataclass
class Item:
    item_id: str
    reviews: list[Review]


@dataclass
class GoldEvalItem:
    item_id: str
    reviews: list[Review]
    references: list[str]


@dataclass(frozen=True)
class SelectedProposition:
    """One summary proposition as persisted in a silver record."""

    text: str
    score: int
    support_fraction: float
    support: tuple[str, ...]
    source_review_id: str


@dataclass
class SilverRecord:
    """Final (sampled source reviews, silver summary) training pair."""

    item_id: str
    summary_text: str
    selected: list[SelectedProposition]
    source_review_ids: list[str]
    config_fingerprint: str
    flags: list[str] = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(
            {
                "item_id": self.item_id,
                "summary_text": self.summary_text,
                "selected": [
                    {
                        "text": p.text,
                        "score": p.score,
                        "support_fraction": p.support_fraction,
                        "support": list(p.support),
                        "source_review_id": p.source_review_id,
                    }
                    for p in self.selected
                ],
                "source_review_ids": list(self.source_review_ids),
                "config_fingerprint": self.config_fingerprint,
                "flags": list(self.flags),
            },
            ensure_ascii=False,
        )

    @classmethod
    def from_json(cls, line: str) -> "SilverRecord":
        raw = json.loads(line)
        return cls(
            item_id=raw["item_id"],
            summary_text=raw["summary_text"],
            selected=[
                SelectedProposition(
                    text=p["text"],
                    score=p["score"],
                    support_fraction=p["support_fraction"],
                    support=tuple(p["support"]),
                    source_review_id=p["source_review_id"],
                )
                for p in raw["selected"]
            ],
            source_review_ids=list(raw["source_review_ids"]),
            config_fingerprint=raw["config_fingerprint"],
            flags=list(raw.get("flags", [])),
        )

    def validate(self, max_overlap: int = 2, token_budget: int | None = None) -> None:
        """Re-check the summary invariants this record claims to satisfy."""
        from .consensus import overlap

        scores = [p.score for p in self.selected]
        if scores != sorted(scores, reverse=True):
            raise CorpusError(f"item {self.item_id}: selected not sorted by score")
        for p in self.selected:
            if p.score != len(p.support):
                raise CorpusError(f"item {self.item_id}: score != |support|")
            if not 0.0 <= p.support_fraction <= 1.0:
                raise CorpusError(f"item {self.item_id}: support_fraction out of range")
        for i, p in enumerate(self.selected):
            for q in self.selected[i + 1 :]:
                if overlap(p.text, q.text) >= max_overlap:
                    raise CorpusError(f"item {self.item_id}: redundancy filter violated")
        if token_budget is not None:
            total = sum(len(p.text.split()) for p in self.selected)
            if total > token_budget:
                raise CorpusError(f"item {self.item_id}: token budget exceeded")
        if len(set(self.source_review_ids)) != len(self.source_review_ids):
            raise CorpusError(f"item {self.item_id}: duplicate source review ids")
        provenance = {p.source_review_id for p in self.selected}
        leaked = provenance.intersection(self.source_review_ids)
        if leaked:
            raise CorpusError(f"item {self.item_id}: provenance leaked into sources: {sorted(leaked)}")


def _parse_review_line(line: str, lineno: int) -> Review:
    try:
        raw = json.loads(line)
    except json.JSONDecodeError as exc:
        raise CorpusError(f"line {lineno}: invalid JSON: {exc.msg}") from exc
    if not isinstance(raw, dict):
        raise CorpusError(f"line {lineno}: expected an object")
    try:
        item_id, review_id, text = raw["item_id"], raw["review_id"], raw["text"]
    except KeyError as exc:
        raise CorpusError(f"line {lineno}: missing field {exc.args[0]!r}") from exc
    if not isinstance(item_id, str) or not isinstance(review_id, str) or not isinstance(text, str):
        raise CorpusError(f"line {lineno}: item_id, review_id and text must be strings")
    if not text.strip():
        raise CorpusError(f"line {lineno}: empty review text")
    return Review(item_id=item_id, review_id=review_id, text=text)


def iter_reviews(path: str | Path) -> Iterator[tuple[int, Review]]:
    """Yield (lineno, Review) for every non-blank line, validating as it goes."""
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            yield lineno, _parse_review_line(line, lineno)


def iter_items(
    path: str | Path, min_reviews: int = 1, stats: dict | None = None
) -> Iterator[Item]:
    """Stream items from a reviews file sorted by item_id.

    Raises CorpusError on malformed lines, duplicate (item_id, review_id)
    pairs, or when item_id order regresses (input not sorted). Items with
    fewer than ``min_reviews`` reviews are skipped; the count of skipped
    items is logged when iteration finishes and reported in ``stats`` when
    a dict is passed.
    """
    current: Item | None = None
    seen_ids: set[str] = set()
    last_item_id: str | None = None
    excluded = 0

    def finish(item: Item) -> Item | None:
        nonlocal excluded
        if len(item.reviews) >= min_reviews:
            return item
        excluded += 1
        return None

    for lineno, review in iter_reviews(path):
        if current is not None and review.item_id == current.item_id:
            if review.review_id in seen_ids:
                raise CorpusError(
                    f"line {lineno}: duplicate review id {review.review_id!r} "
                    f"for item {review.item_id!r}"
                )
            seen_ids.add(review.review_id)
            current.reviews.append(review)
            continue
        if last_item_id is not None and review.item_id < last_item_id:
            raise CorpusError(
                f"line {lineno}: item_id order regressed ({review.item_id!r} after "
                f"{last_item_id!r}); run `forge sort` first"
            )
        if current is not None and review.item_id == last_item_id:
            raise CorpusError(
                f"line {lineno}: item {review.item_id!r} appears in two separate groups; "
                f"run `forge sort` first"
            )
        if current is not None:
            done = finish(current)
            if done is not None:
                yield done
        last_item_id = review.item_id
        current = Item(item_id=review.item_id, reviews=[review])
        seen_ids = {review.review_id}

    if current is not None:
        done = finish(current)
        if done is not None:
            yield done
    if stats is not None:
        stats["excluded_items"] = excluded
    if excluded:
        log.info("excluded %d item(s) below min_reviews", excluded)


def load_corpus(path: str | Path, min_reviews: int = 1) -> list[Item]:
    """Load and group a reviews file; see ``iter_items`` for validation rules."""
    items = list(iter_items(path, min_reviews=min_reviews))
    log.info("loaded %d item(s) from %s", len(items), path)
    return items


def sort_reviews(in_path: str | Path, out_path: str | Path) -> int:
    """Stable-sort a reviews file by item_id, preserving in-file review order.

    Returns the number of lines written.
    """
    rows = [(review.item_id, lineno, line_for(review)) for lineno, review in iter_reviews(in_path)]
    rows.sort(key=lambda r: (r[0], r[1]))
    with open(out_path, "w", encoding="utf-8") as fh:
        for _, _, line in rows:
            fh.write(line + "\n")
    return len(rows)


def line_for(review: Review) -> str:
    return json.dumps(
        {"item_id": review.item_id, "review_id": review.review_id, "text": review.text},
        ensure_ascii=False,
    )


def write_reviews(reviews: Iterable[Review], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for review in reviews:
            fh.write(line_for(review) + "\n")


def write_silver(
    records: Iterable[SilverRecord],
    path: str | Path,
    max_overlap: int = 2,
    token_budget: int | None = None,
) -> None:
    """Write silver records as JSON Lines; every record is validated first."""
    records = list(records)
    for record in records:
        record.validate(max_overlap=max_overlap, token_budget=token_budget)
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(record.to_json() + "\n")


def load_silver(path: str | Path) -> list[SilverRecord]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                out.append(SilverRecord.from_json(line))
            except (json.JSONDecodeError, KeyError) as exc:
                raise CorpusError(f"line {lineno}: bad silver record: {exc}") from exc
    return out


def load_gold(path: str | Path) -> list[GoldEvalItem]:
    items = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                raw = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"line {lineno}: invalid JSON: {exc.msg}") from exc
            try:
                item_id = raw["item_id"]
                reviews = [
                    Review(item_id=item_id, review_id=r["review_id"], text=r["text"])
                    for r in raw["reviews"]
                ]
                references = list(raw["references"])
            except (KeyError, TypeError) as exc:
                raise CorpusError(f"line {lineno}: bad gold record: {exc}") from exc
            if not references or any(not ref.strip() for ref in references):
                raise CorpusError(f"line {lineno}: references must be non-empty")
            items.append(GoldEvalItem(item_id=item_id, reviews=reviews, references=references))
    return items
