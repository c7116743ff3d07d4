"""The HTTP app: POST /v1/embed and GET /healthz.

Both channels must load at startup for the service to report healthy; a
load failure keeps the process serving but answering 503 with the failure
detail. Responses preserve request order and carry a per-text truncation
flag alongside the pinned ``dim``/``vectors`` fields.
"""

from __future__ import annotations

import logging

from fastapi import FastAPI
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .backends import BackendLoadError, build_backends
from .config import CHANNELS, ServiceConfig

log = logging.getLogger(__name__)


class EmbedRequest(BaseModel):
    channel: str
    texts: list[str]


def create_app(config: ServiceConfig | None = None) -> FastAPI:
    config = config or ServiceConfig()
    app = FastAPI(title="embedsvc")
    backends: dict = {}
    load_error: str | None = None

    try:
        backends.update(build_backends(config))
    except BackendLoadError as exc:
        load_error = str(exc)
        log.error("backend load failed: %s", load_error)

    app.state.config = config
    app.state.backends = backends

    @app.get("/healthz")
    def healthz():
        if load_error is not None:
            return JSONResponse(
                status_code=503, content={"status": "error", "detail": load_error}
            )
        return {
            "status": "ok",
            "channels": {name: backends[name].dim for name in CHANNELS},
        }

    @app.post("/v1/embed")
    def embed(request: EmbedRequest):
        if load_error is not None:
            return JSONResponse(
                status_code=503, content={"error": f"service unhealthy: {load_error}"}
            )
        if request.channel not in backends:
            return JSONResponse(
                status_code=400,
                content={"error": f"unknown channel {request.channel!r}; "
                                  f"expected one of {list(CHANNELS)}"},
            )
        if len(request.texts) > config.max_batch:
            return JSONResponse(
                status_code=413,
                content={"error": f"batch of {len(request.texts)} exceeds "
                                  f"max_batch={config.max_batch}"},
            )
        backend = backends[request.channel]
        vectors, truncated = backend.embed(request.texts)
        return {"dim": backend.dim, "vectors": vectors, "truncated": truncated}

    return app
