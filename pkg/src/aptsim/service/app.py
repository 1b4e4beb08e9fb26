"""FastAPI application exposing the simulator over HTTP.

Run locally with ``apt-sim serve`` or ``uvicorn aptsim.service.app:app``.
All endpoints are stateless compute calls; domain errors map to 422.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from ..errors import AptSimError
from . import handlers
from .models import (
    CheckRequest,
    CheckResponse,
    HealthResponse,
    MaterialsResponse,
    NetlistRequest,
    NetlistResponse,
    OptimizeRequest,
    OptimizeResponse,
    SweepRequest,
    SweepResponse,
)


def create_app() -> FastAPI:
    app = FastAPI(
        title="aptsim",
        description=(
            "1-D acoustic power transfer through layered solids: sweeps, "
            "load optimization, solver cross-checks, netlist export."
        ),
    )

    @app.get("/health", response_model=HealthResponse)
    def get_health():
        return handlers.health()

    @app.get("/materials", response_model=MaterialsResponse)
    def get_materials():
        return handlers.list_materials()

    @app.post("/sweep", response_model=SweepResponse)
    def post_sweep(request: SweepRequest):
        return _guard(lambda: handlers.run_sweep(request.config))

    @app.post("/optimize", response_model=OptimizeResponse)
    def post_optimize(request: OptimizeRequest):
        return _guard(lambda: handlers.run_optimize(request.config))

    @app.post("/check", response_model=CheckResponse)
    def post_check(request: CheckRequest):
        return _guard(lambda: handlers.run_check(request.config))

    @app.post("/netlist", response_model=NetlistResponse)
    def post_netlist(request: NetlistRequest):
        return _guard(
            lambda: handlers.run_netlist(
                request.config,
                f_center_hz=request.f_center_hz,
                lossy_lines=request.lossy_lines,
                omit_negative_capacitance=request.omit_negative_capacitance,
            )
        )

    return app


def _guard(call):
    try:
        return call()
    except AptSimError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc


app = create_app()
