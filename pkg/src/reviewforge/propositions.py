"""Sentence segmentation and left-to-right clause (proposition) splitting.

Sentences split on ``.``/``!``/``?`` runs followed by whitespace and an
uppercase letter or digit, guarded by a small abbreviation list. Newlines
are hard sentence boundaries.

Propositions are a linear segmentation of the sentence token stream.
Delimiters are coordinating conjunctions, token-final commas, and
token-final periods. Scanning left to right, a split after a delimiter is
committed only when both the clause being closed and the span running to
the next delimiter (or sentence end) have at least ``min_clause_len``
tokens; otherwise the span is attached to the clause on the left. The
delimiter token always stays with the left clause. Joining a sentence's
propositions with single spaces reproduces the whitespace-normalized
sentence exactly.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .corpus import Item, Review

COORDINATING_CONJUNCTIONS = frozenset({"and", "but", "or", "nor", "so", "yet"})

DEFAULT_MIN_CLAUSE_LEN = 4

# Lowercased abbreviations (with trailing period) that never end a sentence.
# Single letters are guarded separately (initials like "John D. Smith").
_ABBREVIATIONS = frozenset(
    {
        "mr.", "mrs.", "ms.", "dr.", "prof.", "sr.", "jr.", "st.", "mt.",
        "ft.", "sq.", "vs.", "cf.", "e.g.", "i.e.", "approx.", "appt.",
        "apt.", "ave.", "blvd.", "rd.", "min.", "hr.", "hrs.", "tel.",
        "ext.", "dept.", "est.", "max.", "misc.", "oz.", "inc.", "ltd.",
        "co.", "corp.", "jan.", "feb.", "mar.", "apr.", "jun.", "jul.",
        "aug.", "sep.", "sept.", "oct.", "nov.", "dec.",
    }
)

_TERMINAL_RUN = re.compile(r"[.!?]+")


@dataclass(frozen=True)
class Sentence:
    text: str
    review_id: str
    item_id: str
    index: int


@dataclass(frozen=True)
class Proposition:
    text: str
    source_review_id: str
    source_item_id: str
    sentence_index: int
    span_index: int


def _is_abbreviation(before: str) -> bool:
    """Check whether the chunk ending just before a '.' is a guarded abbreviation."""
    word = before.split()[-1] if before.split() else ""
    word = word.lstrip("(\"'‘“[")
    if not word:
        return False
    lowered = word.lower() + "."
    if lowered in _ABBREVIATIONS:
        return True
    # single-letter initials: "John D. Smith"
    return len(word) == 1 and word.isalpha()


def _split_line(line: str) -> list[str]:
    """Split one newline-free chunk of review text into trimmed sentences."""
    sentences = []
    start = 0
    for match in _TERMINAL_RUN.finditer(line):
        end = match.end()
        if end >= len(line):
            break
        nxt = line[end]
        if not nxt.isspace():
            continue
        follow = line[end:].lstrip()
        if not follow:
            break
        first = follow[0]
        if not (first.isupper() or first.isdigit()):
            continue
        if match.group() == "." and _is_abbreviation(line[start : match.start()]):
            continue
        chunk = line[start:end].strip()
        if chunk:
            sentences.append(chunk)
        start = end
    tail = line[start:].strip()
    if tail:
        sentences.append(tail)
    return sentences


def split_sentences(review: Review) -> list[Sentence]:
    """Segment one review into sentences, numbering them in reading order."""
    chunks: list[str] = []
    for line in review.text.splitlines():
        chunks.extend(_split_line(line))
    return [
        Sentence(text=chunk, review_id=review.review_id, item_id=review.item_id, index=i)
        for i, chunk in enumerate(chunks)
    ]


def _is_delimiter(token: str) -> bool:
    return (
        token.lower() in COORDINATING_CONJUNCTIONS
        or token.endswith(",")
        or token.endswith(".")
    )


def split_propositions(
    sentence: Sentence, min_clause_len: int = DEFAULT_MIN_CLAUSE_LEN
) -> list[Proposition]:
    """Greedy left-to-right clause segmentation of one sentence."""
    toks = sentence.text.split()
    delim_positions = [i for i, tok in enumerate(toks) if _is_delimiter(tok)]

    spans: list[tuple[int, int]] = []  # token ranges [start, end) of committed clauses
    start = 0
    for pos_idx, i in enumerate(delim_positions):
        if i + 1 >= len(toks):
            break
        left_len = i + 1 - start
        next_delims = delim_positions[pos_idx + 1 :]
        right_end = (next_delims[0] + 1) if next_delims else len(toks)
        right_len = right_end - (i + 1)
        if left_len >= min_clause_len and right_len >= min_clause_len:
            spans.append((start, i + 1))
            start = i + 1
    spans.append((start, len(toks)))

    return [
        Proposition(
            text=" ".join(toks[a:b]),
            source_review_id=sentence.review_id,
            source_item_id=sentence.item_id,
            sentence_index=sentence.index,
            span_index=span_index,
        )
        for span_index, (a, b) in enumerate(spans)
        if b > a
    ]


def extract_all(item: Item, min_clause_len: int = DEFAULT_MIN_CLAUSE_LEN) -> list[Proposition]:
    """All propositions for an item, in review/sentence/span order."""
    out: list[Proposition] = []
    for review in item.reviews:
        for sentence in split_sentences(review):
            out.extend(split_propositions(sentence, min_clause_len=min_clause_len))
    return out
