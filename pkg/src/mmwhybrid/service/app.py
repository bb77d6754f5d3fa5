"""FastAPI application exposing the simulation pipeline."""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from ..errors import ConfigError, InfeasibleScenarioError, NumericalError
from ..scenarios import PRESETS
from ..simulate import gap_report, run_scenario, summarize
from .schemas import (
    GapReportResponse,
    GapRowModel,
    PresetModel,
    RateSampleModel,
    ScenarioRequest,
    SimulateResponse,
    SummaryRowModel,
)

ERROR_CODES = {
    ConfigError: ("config-error", 400),
    InfeasibleScenarioError: ("infeasible-scenario", 422),
    NumericalError: ("numerical-failure", 500),
}


def create_app() -> FastAPI:
    app = FastAPI(
        title="mmwhybrid",
        description=(
            "Hybrid precoder design and Monte-Carlo spectral-efficiency "
            "simulation for multiuser OFDM mm-wave MIMO"
        ),
        version="0.1.0",
    )

    for exc_type, (code, status) in ERROR_CODES.items():

        def handler(request: Request, exc, code=code, status=status):
            return JSONResponse(
                status_code=status,
                content={"error": {"code": code, "message": str(exc)}},
            )

        app.add_exception_handler(exc_type, handler)

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.get("/presets", response_model=list[PresetModel])
    def presets():
        return [PresetModel.from_scenario(sc) for sc in PRESETS.values()]

    @app.post("/simulate", response_model=SimulateResponse)
    def simulate(request: ScenarioRequest):
        scenario = request.resolve()
        samples = run_scenario(scenario, threads=request.threads)
        summary = summarize(scenario.name, samples)
        return SimulateResponse(
            scenario=scenario.name,
            samples=[RateSampleModel.from_sample(s) for s in samples],
            summary=[SummaryRowModel.from_row(r) for r in summary],
        )

    @app.post("/gap-report", response_model=GapReportResponse)
    def gap(request: ScenarioRequest):
        scenario = request.resolve()
        rows = gap_report(scenario)
        return GapReportResponse(
            scenario=scenario.name, rows=[GapRowModel.from_row(r) for r in rows]
        )

    return app


app = create_app()
