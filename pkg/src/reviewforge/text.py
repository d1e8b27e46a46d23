"""Shared tokenization helpers: whitespace tokens, content words, stopwords.

The stopword list is pinned in ``data/stopwords_en.txt`` (179 entries) so
that overlap and lexical-entailment decisions are reproducible across
environments. Stored review text is never mutated; lowercasing happens only
inside these helpers.
"""

from __future__ import annotations

import hashlib
from functools import lru_cache
from importlib import resources

# Characters stripped from token edges before stopword/content checks.
# Includes the common unicode quote/dash variants seen in review text.
_EDGE_PUNCT = "!\"#$%&'()*+,-./:;<=>?@[\\]^_`{|}~‘’“”–—…"

_APOSTROPHE_MAP = str.maketrans({"’": "'", "‘": "'"})


def tokens(text: str) -> list[str]:
    """Maximal whitespace-delimited chunks."""
    return text.split()


def token_count(text: str) -> int:
    return len(text.split())


def normalize_ws(text: str) -> str:
    """Collapse all whitespace runs to single spaces and trim."""
    return " ".join(text.split())


@lru_cache(maxsize=1)
def stopwords() -> frozenset[str]:
    """The pinned English stopword list."""
    data = resources.files("reviewforge").joinpath("data/stopwords_en.txt")
    words = data.read_text(encoding="utf-8").split("\n")
    return frozenset(w for w in words if w)


@lru_cache(maxsize=1)
def stopwords_sha256() -> str:
    """Hash of the stopword file, for config fingerprints."""
    data = resources.files("reviewforge").joinpath("data/stopwords_en.txt")
    return hashlib.sha256(data.read_text(encoding="utf-8").encode("utf-8")).hexdigest()


def clean_token(token: str) -> str:
    """Lowercase and strip punctuation from both edges of one token."""
    return token.translate(_APOSTROPHE_MAP).lower().strip(_EDGE_PUNCT)


def content_words(text: str) -> set[str]:
    """Deduplicated content tokens: lowercased, edge-punctuation-stripped,
    stopwords removed. Tokens that reduce to nothing are dropped."""
    stop = stopwords()
    out = set()
    for tok in text.split():
        cleaned = clean_token(tok)
        if cleaned and cleaned not in stop:
            out.add(cleaned)
    return out


def word_tokens(text: str) -> list[str]:
    """Lowercased, punctuation-stripped tokens with stopwords KEPT.

    Used for ROUGE-style matching where function words count.
    """
    out = []
    for tok in text.split():
        cleaned = clean_token(tok)
        if cleaned:
            out.append(cleaned)
    return out


def stable_hash64(value: str) -> int:
    """Platform-independent 64-bit hash (for per-item seed derivation)."""
    digest = hashlib.blake2b(value.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")
