"""FastAPI application exposing /v1/entail and /v1/info.

Request handling is concurrent (sync endpoints run on the server's thread
pool) while model forward passes serialize inside the backend. Admission is
capped by a semaphore: beyond ``max_concurrent`` in-flight requests the
service answers 503 instead of queueing unboundedly.
"""

from __future__ import annotations

import threading

from fastapi import FastAPI, HTTPException, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from .backends import ModelLoadError, load_model
from .config import ServiceConfig
from .registry import known_accuracy
from .schemas import EntailRequest, EntailResponse, InfoResponse, ProbsOut, ResultOut


def create_app(cfg: ServiceConfig | None = None) -> FastAPI:
    cfg = cfg or ServiceConfig()
    model = load_model(cfg.model, cfg.max_sequence_pieces, cfg.micro_batch)
    gate = threading.BoundedSemaphore(cfg.max_concurrent) if cfg.max_concurrent > 0 else None

    app = FastAPI(title="nli-service", version="0.1.0")
    app.state.config = cfg
    app.state.model = model

    @app.exception_handler(RequestValidationError)
    def malformed_body(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": "malformed request body"})

    @app.post("/v1/entail", response_model=EntailResponse)
    def entail(request: EntailRequest) -> EntailResponse:
        if len(request.pairs) > cfg.max_batch:
            raise HTTPException(status_code=413, detail=f"batch exceeds max_batch={cfg.max_batch}")
        if not request.pairs:
            return EntailResponse(results=[])
        if gate is None or not gate.acquire(blocking=False):
            if gate is None:
                raise HTTPException(status_code=503, detail="service is draining")
            raise HTTPException(status_code=503, detail="overloaded")
        try:
            try:
                scored = model.predict([(p.premise, p.hypothesis) for p in request.pairs])
            except ModelLoadError as exc:
                raise HTTPException(status_code=503, detail=str(exc)) from exc
            return EntailResponse(
                results=[
                    ResultOut(label=label, probs=ProbsOut(**probs)) for label, probs in scored
                ]
            )
        finally:
            gate.release()

    @app.get("/v1/info", response_model=InfoResponse)
    def info() -> InfoResponse:
        accuracy = cfg.mnli_dev_accuracy
        if accuracy is None:
            accuracy = known_accuracy(cfg.model)
        return InfoResponse(model=cfg.model, mnli_dev_accuracy=accuracy, max_batch=cfg.max_batch)

    return app
