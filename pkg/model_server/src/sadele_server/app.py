"""HTTP front of the masked LM: two POST routes plus a health check.

The model loads once at startup; until then every route answers 503. Bad
requests (malformed bodies, out-of-range indices, duplicate positions) answer
400. Responses are deterministic for identical requests within one process.
"""

from __future__ import annotations

import os
from contextlib import asynccontextmanager

import uvicorn
from fastapi import FastAPI, HTTPException, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .model import MaskedLm, RequestTooLongError

MODEL_ENV = "SADELE_MODEL"
PORT_ENV = "SADELE_PORT"
DEFAULT_MODEL = "dbmdz/bert-base-turkish-cased"
DEFAULT_PORT = 8571


class MaskPredictRequest(BaseModel):
    tokens: list[str]
    mask_index: int
    top_k: int


class TokenLossRequest(BaseModel):
    tokens: list[str]
    positions: list[int]


@asynccontextmanager
async def _lifespan(app: FastAPI):
    app.state.lm = MaskedLm(app.state.model_name)
    yield


def create_app(model_name: str | None = None) -> FastAPI:
    app = FastAPI(title="sadele model server", lifespan=_lifespan)
    app.state.model_name = model_name or os.environ.get(MODEL_ENV, DEFAULT_MODEL)
    app.state.lm = None

    @app.exception_handler(RequestValidationError)
    async def malformed_body(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": exc.errors()})

    def require_model() -> MaskedLm:
        lm = app.state.lm
        if lm is None:
            raise HTTPException(status_code=503, detail="model not loaded")
        return lm

    @app.get("/v1/health")
    def health():
        if app.state.lm is None:
            return JSONResponse(status_code=503, content={"status": "loading"})
        return {"status": "ok", "model": app.state.lm.name}

    @app.post("/v1/mask-predict")
    def mask_predict(req: MaskPredictRequest):
        lm = require_model()
        if not 0 <= req.mask_index < len(req.tokens):
            raise HTTPException(status_code=400, detail="mask_index out of range")
        if req.top_k < 0:
            raise HTTPException(status_code=400, detail="top_k must be >= 0")
        try:
            candidates = lm.predict_masked(req.tokens, req.mask_index, req.top_k)
        except RequestTooLongError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return {
            "candidates": [
                {"token": token, "log_prob": log_prob} for token, log_prob in candidates
            ]
        }

    @app.post("/v1/token-loss")
    def token_loss(req: TokenLossRequest):
        lm = require_model()
        if len(set(req.positions)) != len(req.positions):
            raise HTTPException(status_code=400, detail="positions must be distinct")
        for pos in req.positions:
            if not 0 <= pos < len(req.tokens):
                raise HTTPException(status_code=400, detail=f"position {pos} out of range")
        try:
            loss = lm.masked_token_loss(req.tokens, req.positions)
        except RequestTooLongError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return {"loss": loss}

    return app


app = create_app()


def serve() -> None:
    port = int(os.environ.get(PORT_ENV, DEFAULT_PORT))
    uvicorn.run(app, host="127.0.0.1", port=port)


if __name__ == "__main__":
    serve()
