"""Model backends: a transformers cross-encoder wrapper and a deterministic
overlap-based stand-in for offline testing.

Both expose ``predict(pairs) -> list[(label, probs)]`` with three-class
probability simplexes, serialize forward passes behind a lock, and truncate
long premises head-first so premise + hypothesis fit the piece budget.
"""

from __future__ import annotations

import math
import re
import threading

DEBUG_MODEL_PREFIX = "debug/"

LABELS = ("entailment", "neutral", "contradiction")

NliResult = tuple[str, dict[str, float]]

_WORD = re.compile(r"[a-z0-9']+")


class ModelLoadError(RuntimeError):
    """The configured checkpoint could not be loaded."""


class OverlapDebugModel:
    """Deterministic three-class classifier driven by token containment.

    Not an MNLI model: it exists so the wire protocol, batching, and
    truncation machinery can run in environments without model weights.
    Fully deterministic, so identical requests yield identical probabilities.
    """

    def __init__(self, max_sequence_pieces: int = 512, micro_batch: int = 16):
        self.name = "debug/overlap"
        self.max_sequence_pieces = max_sequence_pieces
        self.micro_batch = micro_batch
        self.loaded = True
        self._lock = threading.Lock()

    def ensure_loaded(self) -> None:
        pass

    @staticmethod
    def _softmax(logits: list[float]) -> list[float]:
        peak = max(logits)
        exps = [math.exp(v - peak) for v in logits]
        total = sum(exps)
        return [v / total for v in exps]

    def _score(self, premise: str, hypothesis: str) -> NliResult:
        hyp_toks = _WORD.findall(hypothesis.lower())
        budget = max(1, self.max_sequence_pieces - len(hyp_toks))
        prem_toks = _WORD.findall(premise.lower())[:budget]  # head-preserving
        hyp, prem = set(hyp_toks), set(prem_toks)
        covered = len(hyp & prem) / len(hyp) if hyp else 0.0
        logits = [4.0 * covered - 2.0, 0.5, -0.5 - covered]
        probs = self._softmax(logits)
        label = LABELS[max(range(3), key=lambda i: probs[i])]
        return label, dict(zip(LABELS, probs))

    def predict(self, pairs: list[tuple[str, str]]) -> list[NliResult]:
        with self._lock:
            return [self._score(p, h) for p, h in pairs]


class TransformersNliModel:
    """Wraps any MNLI-finetuned cross-attention sequence classifier.

    Loading is lazy so metadata endpoints work before (or without) the
    heavyweight checkpoint download. The tokenizer truncates only the
    premise (first segment), keeping its head, so the hypothesis always
    survives intact.
    """

    def __init__(self, model_id: str, max_sequence_pieces: int = 512, micro_batch: int = 16):
        self.name = model_id
        self.max_sequence_pieces = max_sequence_pieces
        self.micro_batch = micro_batch
        self.loaded = False
        self._lock = threading.Lock()
        self._tokenizer = None
        self._model = None
        self._label_order: list[str] | None = None

    def ensure_loaded(self) -> None:
        with self._lock:
            if self.loaded:
                return
            try:
                import torch
                from transformers import AutoModelForSequenceClassification, AutoTokenizer
            except ImportError as exc:
                raise ModelLoadError(f"transformers/torch not installed: {exc}") from exc
            try:
                self._tokenizer = AutoTokenizer.from_pretrained(self.name)
                self._model = AutoModelForSequenceClassification.from_pretrained(self.name)
            except Exception as exc:
                raise ModelLoadError(f"cannot load {self.name!r}: {exc}") from exc
            self._model.eval()
            torch.set_grad_enabled(False)
            self._label_order = self._map_labels(self._model.config.id2label)
            self.loaded = True

    @staticmethod
    def _map_labels(id2label: dict[int, str]) -> list[str]:
        order = []
        for i in range(len(id2label)):
            raw = id2label[i].lower()
            if "entail" in raw:
                order.append("entailment")
            elif "neutral" in raw:
                order.append("neutral")
            elif "contra" in raw:
                order.append("contradiction")
            else:
                raise ModelLoadError(
                    f"model label {id2label[i]!r} is not a recognizable NLI class; "
                    "the checkpoint must declare entailment/neutral/contradiction labels"
                )
        if sorted(order) != sorted(LABELS):
            raise ModelLoadError(f"model labels {order} do not cover the three NLI classes")
        return order

    def predict(self, pairs: list[tuple[str, str]]) -> list[NliResult]:
        self.ensure_loaded()
        import torch

        results: list[NliResult] = []
        with self._lock:
            for start in range(0, len(pairs), self.micro_batch):
                chunk = pairs[start : start + self.micro_batch]
                encoded = self._tokenizer(
                    [p for p, _ in chunk],
                    [h for _, h in chunk],
                    truncation="only_first",
                    max_length=self.max_sequence_pieces,
                    padding=True,
                    return_tensors="pt",
                )
                logits = self._model(**encoded).logits
                probs = torch.softmax(logits, dim=-1).tolist()
                for row in probs:
                    named = dict(zip(self._label_order, row))
                    label = max(named, key=named.get)
                    results.append((label, {name: named[name] for name in LABELS}))
        return results


def load_model(model_id: str, max_sequence_pieces: int, micro_batch: int):
    if model_id.startswith(DEBUG_MODEL_PREFIX):
        if model_id != "debug/overlap":
            raise ModelLoadError(f"unknown debug model {model_id!r}")
        return OverlapDebugModel(max_sequence_pieces, micro_batch)
    return TransformersNliModel(model_id, max_sequence_pieces, micro_batch)
