"""Pydantic models for the wire protocol."""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel


class PairIn(BaseModel):
    premise: str
    hypothesis: str


class EntailRequest(BaseModel):
    pairs: list[PairIn]


class ProbsOut(BaseModel):
    entailment: float
    neutral: float
    contradiction: float


class ResultOut(BaseModel):
    label: Literal["entailment", "neutral", "contradiction"]
    probs: ProbsOut


class EntailResponse(BaseModel):
    results: list[ResultOut]


class InfoResponse(BaseModel):
    model: str
    mnli_dev_accuracy: float | None
    max_batch: int
