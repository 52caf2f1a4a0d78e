"""HTTP surface: three POST endpoints plus health, JSON in and out.

Every failure body has the shape {"error": "<message>"}: 400 for
requests the server refuses to act on, 500 for model failures, 502 when
the judge model would not produce a parseable reply (with the raw reply
attached for audit).
"""

from __future__ import annotations

import base64
import binascii

import numpy as np
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, ConfigDict, Field

from ideonaut_server.config import ServerConfig
from ideonaut_server.models import (
    Bundles,
    InvalidRequest,
    JudgeRetryExhausted,
    load_bundles,
)
from ideonaut_server.rubric import RUBRIC_VERSION


class EncodeBody(BaseModel):
    model_config = ConfigDict(extra="forbid")
    texts: list[str]


class DecodeBody(BaseModel):
    model_config = ConfigDict(extra="forbid")
    latent_b64: str
    instruction: str
    max_tokens: int = Field(ge=1)


class JudgeBody(BaseModel):
    model_config = ConfigDict(extra="forbid")
    idea: str
    objective: str
    rubric_version: str


def _error(status: int, message: str, **extra) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": message, **extra})


def _parse_latent(latent_b64: str, expected_dim: int) -> np.ndarray:
    try:
        raw = base64.b64decode(latent_b64, validate=True)
    except (binascii.Error, ValueError):
        raise InvalidRequest("latent_b64 is not valid base64") from None
    if len(raw) % 4 != 0 or len(raw) // 4 != expected_dim:
        raise InvalidRequest(
            f"latent has {len(raw)} bytes, decoder expects "
            f"{expected_dim} float32 values ({expected_dim * 4} bytes)"
        )
    latent = np.frombuffer(raw, dtype="<f4").astype(np.float32)
    if not np.all(np.isfinite(latent)):
        raise InvalidRequest("latent contains non-finite values")
    return latent


def create_app(config: ServerConfig, bundles: Bundles | None = None) -> FastAPI:
    """Build the application; models load once, up front."""
    if bundles is None:
        bundles = load_bundles(config)
    app = FastAPI(title="ideonaut reference model server", docs_url=None)
    app.state.bundles = bundles
    app.state.config = config

    @app.exception_handler(RequestValidationError)
    async def validation_handler(request: Request, exc: RequestValidationError):
        first = exc.errors()[0] if exc.errors() else {}
        where = ".".join(str(part) for part in first.get("loc", ()) if part != "body")
        message = first.get("msg", "invalid request body")
        return _error(400, f"{where}: {message}" if where else message)

    @app.exception_handler(InvalidRequest)
    async def invalid_request_handler(request: Request, exc: InvalidRequest):
        return _error(400, str(exc))

    @app.exception_handler(JudgeRetryExhausted)
    async def judge_failure_handler(request: Request, exc: JudgeRetryExhausted):
        return _error(502, str(exc), raw_reply=exc.raw_reply)

    @app.exception_handler(Exception)
    async def model_failure_handler(request: Request, exc: Exception):
        return _error(500, f"model failure: {exc}")

    @app.post("/v1/encode")
    def encode(body: EncodeBody):
        if not body.texts:
            raise InvalidRequest("nothing to encode")
        if any(not text.strip() for text in body.texts):
            raise InvalidRequest("texts must be non-blank strings")
        vectors = bundles.encoder.encode(body.texts)
        return {
            "dim": bundles.encoder.dim,
            "embeddings": [[float(x) for x in row] for row in vectors],
        }

    @app.post("/v1/decode")
    def decode(body: DecodeBody):
        if not body.instruction.strip():
            raise InvalidRequest("instruction is empty")
        max_new = min(body.max_tokens, config.max_tokens_cap)
        if body.latent_b64 == "":
            text = bundles.decoder.generate_plain(body.instruction, max_new)
        else:
            latent = _parse_latent(body.latent_b64, bundles.decoder.embed_dim)
            text = bundles.decoder.generate_injected(body.instruction, latent, max_new)
        return {"text": text}

    @app.post("/v1/judge")
    def judge(body: JudgeBody):
        if not body.idea.strip():
            raise InvalidRequest("idea text is empty")
        if body.rubric_version != RUBRIC_VERSION:
            raise InvalidRequest(
                f"unsupported rubric_version {body.rubric_version!r}, "
                f"server speaks {RUBRIC_VERSION!r}"
            )
        return bundles.judge.score(body.idea, body.objective)

    @app.get("/v1/health")
    @app.post("/v1/health")
    def health():
        return {
            "status": "ok",
            "dim": bundles.encoder.dim,
            "decoder_dim": bundles.decoder.embed_dim,
        }

    return app
