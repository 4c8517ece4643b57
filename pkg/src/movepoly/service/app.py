"""FastAPI application exposing the analysis commands.

Successful responses carry the canonical report bytes, so a JSON report
fetched over HTTP is byte-identical to the one the CLI writes in-process.
Domain errors map to HTTP 400 with a machine-readable error code.
"""

from __future__ import annotations

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse

from ..errors import (DimensionMismatchError, EnumerationGuardError,
                      InfeasibleSetError, MovepolyError, ProblemFormatError,
                      SamplingDiagnosticError, SolverLimitError)
from ..reports import canonical_json
from . import handlers, schemas

app = FastAPI(title="movepoly", version="0.1.0",
              description="Projection, multiplier and regularity analysis "
                          "for parametric polyhedral sets")

ERROR_CODES = (
    (ProblemFormatError, "input"),
    (DimensionMismatchError, "input"),
    (InfeasibleSetError, "infeasible"),
    (SolverLimitError, "solver_limit"),
    (EnumerationGuardError, "guard"),
    (SamplingDiagnosticError, "sampling"),
    (MovepolyError, "error"),
)


def error_code(exc: Exception) -> str:
    for klass, code in ERROR_CODES:
        if isinstance(exc, klass):
            return code
    return "error"


@app.exception_handler(MovepolyError)
async def _domain_error(request: Request, exc: MovepolyError) -> JSONResponse:
    return JSONResponse(status_code=400,
                        content={"error": {"code": error_code(exc),
                                           "message": str(exc)}})


def _report_response(report: dict) -> Response:
    return Response(content=canonical_json(report) + "\n",
                    media_type="application/json")


@app.post("/project")
def project_endpoint(request: schemas.ProjectRequest) -> Response:
    return _report_response(handlers.handle_project(request))


@app.post("/multipliers")
def multipliers_endpoint(request: schemas.MultipliersRequest) -> Response:
    return _report_response(handlers.handle_multipliers(request))


@app.post("/check-rcrcq")
def check_rcrcq_endpoint(request: schemas.RcrcqRequest) -> Response:
    return _report_response(handlers.handle_check_rcrcq(request))


@app.post("/check-liminf")
def check_liminf_endpoint(request: schemas.LiminfRequest) -> Response:
    return _report_response(handlers.handle_check_liminf(request))


@app.post("/estimate")
def estimate_endpoint(request: schemas.EstimateRequest) -> Response:
    return _report_response(handlers.handle_estimate(request))


@app.post("/blowup")
def blowup_endpoint(request: schemas.BlowupRequest) -> Response:
    return _report_response(handlers.handle_blowup(request))


@app.get("/scenarios")
def scenarios_endpoint() -> Response:
    return _report_response(handlers.handle_scenarios())


@app.get("/healthz")
def health_endpoint() -> dict:
    return {"status": "ok"}
