"""Service configuration."""

from __future__ import annotations

from dataclasses import dataclass

DEFAULT_MODEL = "roberta-large-mnli"


@dataclass
class ServiceConfig:
    model: str = DEFAULT_MODEL
    max_sequence_pieces: int = 512
    port: int = 8080
    host: str = "127.0.0.1"
    max_batch: int = 128
    micro_batch: int = 16
    # concurrent requests admitted before answering 503; 0 = drain mode
    max_concurrent: int = 4
    mnli_dev_accuracy: float | None = None  # overrides the registry value

    def __post_init__(self):
        if self.max_batch < 1:
            raise ValueError("max_batch must be >= 1")
        if self.micro_batch < 1:
            raise ValueError("micro_batch must be >= 1")
        if self.max_sequence_pieces < 8:
            raise ValueError("max_sequence_pieces must be >= 8")
        if self.max_concurrent < 0:
            raise ValueError("max_concurrent must be >= 0")
