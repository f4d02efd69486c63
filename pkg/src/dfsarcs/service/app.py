"""FastAPI wiring for the verification service."""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from ..enumeration import BoundTooSmallError
from ..simulator import InsufficientDataError
from . import handlers, models

app = FastAPI(
    title="dfsarcs",
    description=(
        "Exact verification of forward/back arc equidistribution for DFS on "
        "random digraphs with geometric outdegrees: generating-function "
        "sweeps, exact distributions, brute-force oracles, and Monte Carlo."
    ),
    version="0.1.0",
)


@app.get("/healthz")
def healthz() -> dict:
    return {"status": "ok"}


@app.post("/verify", response_model=models.VerifyResponse)
def verify(req: models.VerifyRequest) -> models.VerifyResponse:
    return handlers.handle_verify(req)


@app.post("/cross-check", response_model=models.CrossCheckResponse)
def cross_check(req: models.CrossCheckRequest) -> models.CrossCheckResponse:
    return handlers.handle_cross_check(req)


@app.post("/distribution", response_model=models.DistributionResponse)
def distribution(req: models.DistributionRequest) -> models.DistributionResponse:
    try:
        return handlers.handle_distribution(req)
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc


@app.post("/simulate", response_model=models.SimulateResponse)
def simulate(req: models.SimulateRequest) -> models.SimulateResponse:
    try:
        return handlers.handle_simulate(req)
    except (ValueError, InsufficientDataError) as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc


@app.post("/oracle", response_model=models.OracleResponse)
def oracle(req: models.OracleRequest) -> models.OracleResponse:
    try:
        return handlers.handle_oracle(req)
    except (ValueError, BoundTooSmallError) as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
