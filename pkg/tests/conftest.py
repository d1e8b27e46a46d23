"""Shared fixtures: toy corpora, fuzz generators, and a fake entailment server."""

from __future__ import annotations

import json
import random
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer
from pathlib import Path

import pytest

from reviewforge.corpus import Item, Review

# vocabulary mixing stopwords and content words, ASCII only so the main and
# reference tokenizers cannot disagree on unicode edge cases
CONTENT_WORDS = [
    "room", "rooms", "pool", "staff", "clean", "large", "friendly", "breakfast",
    "location", "beach", "walk", "great", "nice", "comfortable", "quiet",
    "helpful", "view", "bed", "bathroom", "noisy", "cheap", "modern", "old",
    "spacious", "small", "warm", "cold", "lovely", "terrible", "excellent",
]
STOPWORD_TOKENS = ["the", "a", "was", "were", "and", "very", "is", "of", "to", "in"]


def random_token(rng: random.Random) -> str:
    if rng.random() < 0.4:
        return rng.choice(STOPWORD_TOKENS)
    return rng.choice(CONTENT_WORDS)


def random_sentence(rng: random.Random, min_tokens: int = 1, max_tokens: int = 18) -> str:
    n = rng.randint(min_tokens, max_tokens)
    toks = []
    for i in range(n):
        tok = random_token(rng)
        if i < n - 1:
            roll = rng.random()
            if roll < 0.08:
                tok += ","
            elif roll < 0.12:
                tok = rng.choice(["and", "but", "or"])
        toks.append(tok)
    terminal = rng.choice([".", ".", ".", "!", "?"])
    return " ".join(toks) + terminal


def random_review_text(rng: random.Random, max_sentences: int = 3, max_tokens: int = 18) -> str:
    sentences = [
        random_sentence(rng, max_tokens=max_tokens)
        for _ in range(rng.randint(1, max_sentences))
    ]
    return " ".join(s[0].upper() + s[1:] for s in sentences)


def make_item(rng: random.Random, item_id: str, n_reviews: int, max_sentences: int = 3,
              max_tokens: int = 18) -> Item:
    reviews = [
        Review(item_id=item_id, review_id=f"r{i}", text=random_review_text(rng, max_sentences, max_tokens))
        for i in range(n_reviews)
    ]
    return Item(item_id=item_id, reviews=reviews)


def write_reviews_file(path: Path, items: list[Item]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for item in items:
            for review in item.reviews:
                fh.write(
                    json.dumps(
                        {"item_id": review.item_id, "review_id": review.review_id, "text": review.text},
                        ensure_ascii=False,
                    )
                    + "\n"
                )


@pytest.fixture
def toy_corpus(tmp_path: Path) -> Path:
    """Two small items with hand-written reviews (deterministic)."""
    path = tmp_path / "reviews.jsonl"
    items = [
        Item(
            item_id="h1",
            reviews=[
                Review("h1", "r0", "The rooms were clean and large. Staff were friendly."),
                Review("h1", "r1", "Very clean rooms. The pool was warm and the staff friendly."),
                Review("h1", "r2", "Clean large rooms with a great view. Breakfast was terrible."),
                Review("h1", "r3", "Everything was clean and the rooms were large and quiet."),
                Review("h1", "r4", "Friendly staff and clean rooms made the stay lovely."),
            ],
        ),
        Item(
            item_id="h2",
            reviews=[
                Review("h2", "r0", "Great location near the beach. Rooms were small but comfortable."),
                Review("h2", "r1", "The location is great and the beach is a short walk away."),
                Review("h2", "r2", "Comfortable beds and a great location. Noisy at night."),
                Review("h2", "r3", "Small rooms. The beach was lovely and the location great."),
                Review("h2", "r4", "Great beach location with comfortable beds throughout."),
                Review("h2", "r5", "The beach is lovely and the location is great for walks."),
            ],
        ),
    ]
    write_reviews_file(path, items)
    return path


class _EntailHandler(BaseHTTPRequestHandler):
    """Configurable fake NLI service speaking the wire protocol."""

    server_version = "FakeNLI/1.0"

    def log_message(self, *args):  # keep test output clean
        pass

    def do_POST(self):
        if self.path != "/v1/entail":
            self.send_error(404)
            return
        length = int(self.headers.get("Content-Length", 0))
        raw = self.rfile.read(length)
        state = self.server.state
        state["requests"] += 1
        mode = state["mode"]
        if mode == "refuse_503" or (
            mode == "recover_503" and state["requests"] <= state.get("fail_first", 2)
        ):
            self.send_response(503)
            self.end_headers()
            return
        try:
            pairs = json.loads(raw)["pairs"]
        except (json.JSONDecodeError, KeyError):
            self.send_response(400)
            self.end_headers()
            return
        if mode == "poison" and any("poison" in p["premise"] for p in pairs):
            self.send_response(500)
            self.end_headers()
            self.wfile.write(b"poisoned")
            return
        if mode == "short":
            results = []  # wrong cardinality
        elif mode == "bad_probs":
            results = [
                {"label": "entailment", "probs": {"entailment": 0.9, "neutral": 0.9, "contradiction": 0.1}}
                for _ in pairs
            ]
        else:
            results = [self._verdict(p) for p in pairs]
        body = json.dumps({"results": results}).encode("utf-8")
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    @staticmethod
    def _verdict(pair: dict) -> dict:
        # deterministic toy rule: token containment drives entailment
        prem = set(pair["premise"].lower().split())
        hyp = set(pair["hypothesis"].lower().split())
        if hyp and hyp.issubset(prem):
            return {"label": "entailment", "probs": {"entailment": 0.9, "neutral": 0.08, "contradiction": 0.02}}
        return {"label": "neutral", "probs": {"entailment": 0.2, "neutral": 0.7, "contradiction": 0.1}}


class FakeNliServer:
    def __init__(self):
        self.httpd = HTTPServer(("127.0.0.1", 0), _EntailHandler)
        self.httpd.state = {"mode": "ok", "requests": 0}
        self.thread = threading.Thread(target=self.httpd.serve_forever, daemon=True)
        self.thread.start()

    @property
    def endpoint(self) -> str:
        host, port = self.httpd.server_address
        return f"http://{host}:{port}"

    def set_mode(self, mode: str, **extra) -> None:
        self.httpd.state.update({"mode": mode, "requests": 0, **extra})

    def stop(self) -> None:
        self.httpd.shutdown()
        self.httpd.server_close()


@pytest.fixture
def fake_nli():
    server = FakeNliServer()
    yield server
    server.stop()
