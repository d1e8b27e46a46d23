"""Binary support decisions for (review, proposition) pairs.

Two backends share one interface: ``remote`` speaks the HTTP wire protocol
below to an NLI inference service, ``lexical`` is a deterministic
content-word-subset oracle used for tests and desk-scale runs. Verdicts are
cached under a content hash of (premise, hypothesis, backend identity,
threshold) so repeated runs never re-judge a pair.

Wire protocol (bit-exact): POST ``/v1/entail`` with
``{"pairs": [{"premise": str, "hypothesis": str}]}`` returns 200 and
``{"results": [{"label": ..., "probs": {"entailment": f, "neutral": f,
"contradiction": f}}]}``, order-aligned with the request.
"""

from __future__ import annotations

import hashlib
import json
import logging
import threading
import time
from dataclasses import dataclass
from pathlib import Path

import requests

from .cache import LABELS, VerdictCache
from .errors import BackendProtocolError, BackendUnavailableError
from .text import content_words

log = logging.getLogger(__name__)

PROB_TOLERANCE = 1e-6
_WIRE_PROB_TOLERANCE = 1e-3

MAX_RETRIES = 3
BACKOFF_BASE_SECONDS = 0.5
REQUEST_TIMEOUT_SECONDS = 120.0


@dataclass(frozen=True)
class EntailmentPair:
    premise: str
    hypothesis: str

    def __post_init__(self):
        if not self.premise or not self.hypothesis:
            raise ValueError("premise and hypothesis must be non-empty")

    @property
    def pair_key(self) -> bytes:
        h = hashlib.blake2b(digest_size=16)
        h.update(self.premise.encode("utf-8"))
        h.update(b"\x00")
        h.update(self.hypothesis.encode("utf-8"))
        return h.digest()


@dataclass(frozen=True)
class EntailmentVerdict:
    label: str
    p_entail: float
    p_neutral: float
    p_contradict: float
    supported: bool

    def __post_init__(self):
        if self.label not in LABELS:
            raise ValueError(f"unknown label {self.label!r}")
        total = self.p_entail + self.p_neutral + self.p_contradict
        if abs(total - 1.0) > PROB_TOLERANCE:
            raise ValueError(f"probabilities sum to {total}, not 1")
        if min(self.p_entail, self.p_neutral, self.p_contradict) < 0:
            raise ValueError("probabilities must be non-negative")
        if self.supported and self.label != "entailment":
            raise ValueError("supported verdict must carry the entailment label")

    @property
    def probs(self) -> dict[str, float]:
        return {
            "entailment": self.p_entail,
            "neutral": self.p_neutral,
            "contradiction": self.p_contradict,
        }


@dataclass
class BackendConfig:
    kind: str  # "remote" | "lexical"
    endpoint: str | None = None
    entail_threshold: float | None = None
    batch_size: int = 32
    cache_path: str | Path | None = None

    def __post_init__(self):
        if self.kind not in ("remote", "lexical"):
            raise ValueError(f"unknown backend kind {self.kind!r}")
        if self.kind == "remote" and not self.endpoint:
            raise ValueError("remote backend needs an endpoint")
        if self.entail_threshold is not None and not 0.0 < self.entail_threshold < 1.0:
            raise ValueError("entail_threshold must lie in (0, 1)")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")

    @property
    def identity(self) -> str:
        return self.kind if self.kind == "lexical" else f"remote:{self.endpoint}"


def decide_supported(label: str, p_entail: float, threshold: float | None) -> bool:
    """The E(premise, hypothesis) decision rule: argmax label is entailment,
    optionally also requiring its probability to clear the threshold."""
    return label == "entailment" and (threshold is None or p_entail >= threshold)


def lexical_entails(premise: str, hypothesis: str) -> bool:
    """Deterministic support oracle: every content word of the hypothesis
    must appear among the premise's content words. A hypothesis with no
    content words supports nothing."""
    hyp = content_words(hypothesis)
    if not hyp:
        return False
    return hyp.issubset(content_words(premise))


def _lexical_verdict(pair: EntailmentPair, threshold: float | None) -> EntailmentVerdict:
    if lexical_entails(pair.premise, pair.hypothesis):
        return EntailmentVerdict(
            label="entailment",
            p_entail=1.0,
            p_neutral=0.0,
            p_contradict=0.0,
            supported=decide_supported("entailment", 1.0, threshold),
        )
    return EntailmentVerdict(
        label="neutral", p_entail=0.0, p_neutral=1.0, p_contradict=0.0, supported=False
    )


class _RemoteClient:
    """HTTP client with bounded retries and per-thread sessions."""

    def __init__(self, endpoint: str):
        endpoint = endpoint.rstrip("/")
        if not endpoint.endswith("/v1/entail"):
            endpoint = endpoint + "/v1/entail"
        self.url = endpoint
        self._local = threading.local()

    def _session(self) -> requests.Session:
        if not hasattr(self._local, "session"):
            self._local.session = requests.Session()
        return self._local.session

    def judge(self, pairs: list[EntailmentPair]) -> list[tuple[str, float, float, float]]:
        body = {"pairs": [{"premise": p.premise, "hypothesis": p.hypothesis} for p in pairs]}
        last_error: Exception | None = None
        for attempt in range(MAX_RETRIES + 1):
            if attempt:
                time.sleep(BACKOFF_BASE_SECONDS * 2 ** (attempt - 1))
            try:
                resp = self._session().post(self.url, json=body, timeout=REQUEST_TIMEOUT_SECONDS)
            except requests.RequestException as exc:
                last_error = exc
                log.warning("backend request failed (attempt %d): %s", attempt + 1, exc)
                continue
            if resp.status_code in (502, 503, 504):
                last_error = BackendUnavailableError(f"backend returned {resp.status_code}")
                log.warning("backend overloaded (attempt %d): %s", attempt + 1, resp.status_code)
                continue
            if resp.status_code != 200:
                raise BackendProtocolError(f"backend returned status {resp.status_code}: {resp.text[:200]}")
            return self._parse(resp, len(pairs))
        raise BackendUnavailableError(f"backend unreachable after {MAX_RETRIES + 1} attempts: {last_error}")

    @staticmethod
    def _parse(resp: requests.Response, expected: int) -> list[tuple[str, float, float, float]]:
        try:
            payload = resp.json()
        except json.JSONDecodeError as exc:
            raise BackendProtocolError(f"backend response is not JSON: {exc}") from exc
        results = payload.get("results")
        if not isinstance(results, list) or len(results) != expected:
            got = len(results) if isinstance(results, list) else "none"
            raise BackendProtocolError(f"backend returned {got} results for {expected} pairs")
        out = []
        for i, result in enumerate(results):
            try:
                label = result["label"]
                probs = result["probs"]
                trio = (
                    float(probs["entailment"]),
                    float(probs["neutral"]),
                    float(probs["contradiction"]),
                )
            except (TypeError, KeyError, ValueError) as exc:
                raise BackendProtocolError(f"pair {i}: malformed result: {exc!r}") from exc
            if label not in LABELS:
                raise BackendProtocolError(f"pair {i}: unknown label {label!r}")
            total = sum(trio)
            if abs(total - 1.0) > _WIRE_PROB_TOLERANCE or min(trio) < 0:
                raise BackendProtocolError(f"pair {i}: probabilities are not a simplex: {trio}")
            # services may emit float32-rounded simplexes; renormalize to the
            # tighter tolerance stored verdicts must satisfy
            out.append((label, trio[0] / total, trio[1] / total, trio[2] / total))
        return out


class EntailmentJudge:
    """Caching judge over one configured backend.

    Safe to call from many worker threads; counters and cache appends are
    lock-protected. ``pairs_judged`` counts backend judgments (cache misses),
    ``cache_hits`` counts lookups served from the cache.
    """

    def __init__(self, cfg: BackendConfig):
        self.cfg = cfg
        self.cache = VerdictCache(cfg.cache_path)
        self._remote = _RemoteClient(cfg.endpoint) if cfg.kind == "remote" else None
        self._counter_lock = threading.Lock()
        self.pairs_judged = 0
        self.cache_hits = 0

    def _cache_key(self, pair: EntailmentPair) -> bytes:
        h = hashlib.blake2b(digest_size=16)
        for part in (
            pair.premise,
            pair.hypothesis,
            self.cfg.identity,
            repr(self.cfg.entail_threshold),
        ):
            h.update(part.encode("utf-8"))
            h.update(b"\x00")
        return h.digest()

    def judge_batch(
        self, pairs: list[EntailmentPair], tally: dict | None = None
    ) -> list[EntailmentVerdict]:
        """Judge pairs, serving from the cache where possible.

        When ``tally`` is given, its "judged" and "hits" entries are
        incremented, letting callers attribute pair counts to one item.
        """
        if not pairs:
            raise ValueError("judge_batch requires at least one pair")
        verdicts: list[EntailmentVerdict | None] = [None] * len(pairs)
        missing: list[int] = []
        hits = 0
        for i, pair in enumerate(pairs):
            entry = self.cache.get(self._cache_key(pair))
            if entry is not None:
                label, pe, pn, pc, supported = entry
                verdicts[i] = EntailmentVerdict(label, pe, pn, pc, supported)
                hits += 1
            else:
                missing.append(i)

        new_entries: list[tuple[bytes, tuple]] = []
        threshold = self.cfg.entail_threshold
        for chunk_start in range(0, len(missing), self.cfg.batch_size):
            chunk = missing[chunk_start : chunk_start + self.cfg.batch_size]
            chunk_pairs = [pairs[i] for i in chunk]
            if self._remote is not None:
                raw = self._remote.judge(chunk_pairs)
                chunk_verdicts = [
                    EntailmentVerdict(label, pe, pn, pc, decide_supported(label, pe, threshold))
                    for (label, pe, pn, pc) in raw
                ]
            else:
                chunk_verdicts = [_lexical_verdict(p, threshold) for p in chunk_pairs]
            for i, verdict in zip(chunk, chunk_verdicts):
                verdicts[i] = verdict
                new_entries.append(
                    (
                        self._cache_key(pairs[i]),
                        (verdict.label, verdict.p_entail, verdict.p_neutral,
                         verdict.p_contradict, verdict.supported),
                    )
                )
        if new_entries:
            self.cache.put_many(new_entries)
        with self._counter_lock:
            self.cache_hits += hits
            self.pairs_judged += len(missing)
            if tally is not None:
                tally["judged"] = tally.get("judged", 0) + len(missing)
                tally["hits"] = tally.get("hits", 0) + hits
        return verdicts  # type: ignore[return-value]

    def close(self) -> None:
        self.cache.close()

    def __enter__(self) -> "EntailmentJudge":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def judge_batch(pairs: list[EntailmentPair], cfg: BackendConfig) -> list[EntailmentVerdict]:
    """One-shot convenience wrapper around ``EntailmentJudge``."""
    with EntailmentJudge(cfg) as judge:
        return judge.judge_batch(pairs)
