"""Service test fixtures: offline tiny checkpoint, app factory, live server."""

from __future__ import annotations

import json
import random
import socket
import threading
import time

import pytest

from nli_service import ServiceConfig, create_app

VOCAB_WORDS = [
    "the", "a", "staff", "were", "friendly", "helpful", "pool", "rooms",
    "clean", "large", "warm", "great", "terrible", "breakfast", "beach",
    "location", "man", "is", "sleeping", "person", "asleep", "running",
    "view", "bed", "quiet", "comfortable", "lovely", "walk", "small",
]


@pytest.fixture(scope="session")
def tiny_checkpoint(tmp_path_factory):
    """A randomly initialized (seeded) cross-attention NLI classifier saved
    to disk, so the real transformers code path runs without any downloads."""
    torch = pytest.importorskip("torch")
    transformers = pytest.importorskip("transformers")

    path = tmp_path_factory.mktemp("tiny_nli_model")
    vocab = ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"] + VOCAB_WORDS
    (path / "vocab.txt").write_text("\n".join(vocab) + "\n", encoding="utf-8")
    tokenizer = transformers.BertTokenizer(vocab_file=str(path / "vocab.txt"), do_lower_case=True)

    torch.manual_seed(0)
    config = transformers.BertConfig(
        vocab_size=len(vocab),
        hidden_size=32,
        num_hidden_layers=2,
        num_attention_heads=2,
        intermediate_size=64,
        max_position_embeddings=64,
        num_labels=3,
        id2label={0: "CONTRADICTION", 1: "NEUTRAL", 2: "ENTAILMENT"},
        label2id={"CONTRADICTION": 0, "NEUTRAL": 1, "ENTAILMENT": 2},
    )
    model = transformers.BertForSequenceClassification(config)
    model.save_pretrained(path)
    tokenizer.save_pretrained(path)
    return str(path)


@pytest.fixture
def debug_app():
    return create_app(ServiceConfig(model="debug/overlap", max_batch=64))


@pytest.fixture
def debug_client(debug_app):
    from fastapi.testclient import TestClient

    return TestClient(debug_app)


def free_port() -> int:
    with socket.socket() as sock:
        sock.bind(("127.0.0.1", 0))
        return sock.getsockname()[1]


class LiveServer:
    """uvicorn in a daemon thread, for tests that need a real HTTP socket."""

    def __init__(self, app, port: int | None = None):
        import uvicorn

        self.port = port or free_port()
        config = uvicorn.Config(app, host="127.0.0.1", port=self.port, log_level="warning")
        self.server = uvicorn.Server(config)
        self.thread = threading.Thread(target=self.server.run, daemon=True)

    @property
    def endpoint(self) -> str:
        return f"http://127.0.0.1:{self.port}"

    def __enter__(self) -> "LiveServer":
        self.thread.start()
        deadline = time.time() + 15
        while not self.server.started:
            if time.time() > deadline:
                raise RuntimeError("server did not start in time")
            time.sleep(0.02)
        return self

    def __exit__(self, *exc) -> None:
        self.server.should_exit = True
        self.thread.join(timeout=10)


def write_toy_corpus(path, n_items: int = 10, seed: int = 3) -> None:
    """Reviews drawn from the model vocabulary, sorted by item_id."""
    rng = random.Random(seed)
    with open(path, "w", encoding="utf-8") as fh:
        for i in range(n_items):
            item_id = f"h{i:02d}"
            for j in range(rng.randint(6, 9)):
                words = [rng.choice(VOCAB_WORDS) for _ in range(rng.randint(6, 14))]
                text = " ".join(words) + "."
                text = text[0].upper() + text[1:]
                fh.write(
                    json.dumps({"item_id": item_id, "review_id": f"r{j}", "text": text})
                    + "\n"
                )
