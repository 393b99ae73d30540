"""HTTP evaluation service wrapping the benchmark pipeline.

Endpoints
---------
* ``GET  /health``            liveness + version
* ``POST /problems/describe`` bounds and objective catalog for (problem, dim)
* ``POST /evaluate``          run the full pipeline for one design vector

The service is stateless: every evaluation request owns a private working
directory, so concurrent clients are safe.  Pipeline errors map to a
structured ``{"error": {"category", "message"}}`` payload: ``usage`` ->
400, ``solver`` -> 502, ``parse`` -> 500.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..errors import CrashBenchError
from ..problems import (
    DEFAULT_OBJECTIVES,
    DIMENSION_RANGES,
    INTRUSION_LIMITS_MM,
    ObjectiveKind,
    ProblemId,
    SolverMode,
    bounds_for,
    create_problem,
    evaluate,
)
from .models import (
    DescribeRequest,
    DescribeResponse,
    EvaluateRequest,
    EvaluateResponse,
    HealthResponse,
)

_STATUS_OF_CATEGORY = {"usage": 400, "solver": 502, "parse": 500}

app = FastAPI(
    title="crashbench",
    version=__version__,
    description="Crashworthiness shape-optimization benchmark evaluation "
                "service",
)


@app.exception_handler(CrashBenchError)
async def _pipeline_error(_request: Request, exc: CrashBenchError):
    return JSONResponse(
        status_code=_STATUS_OF_CATEGORY.get(exc.category, 500),
        content={"error": {"category": exc.category, "message": str(exc)}},
    )


@app.get("/health", response_model=HealthResponse)
def health() -> HealthResponse:
    return HealthResponse(status="ok", service="crashbench",
                          version=__version__)


@app.post("/problems/describe", response_model=DescribeResponse)
def describe(req: DescribeRequest) -> DescribeResponse:
    problem = ProblemId(req.problem)
    lo, hi = bounds_for(problem, req.dim)
    return DescribeResponse(
        problem=int(problem),
        dim=req.dim,
        lower=lo.tolist(),
        upper=hi.tolist(),
        default_objectives=[k.value for k in DEFAULT_OBJECTIVES[problem]],
        known_objectives=[k.value for k in ObjectiveKind],
        constraint_limit_mm=INTRUSION_LIMITS_MM[problem],
        dimension_range=DIMENSION_RANGES[problem],
    )


@app.post("/evaluate", response_model=EvaluateResponse)
def evaluate_point(req: EvaluateRequest) -> EvaluateResponse:
    instance = create_problem(
        req.problem, req.dim, req.objectives,
        solver_mode=SolverMode(req.mode),
    )
    result = evaluate(
        instance, req.x,
        work_dir=req.work_dir,
        keep_workdir=req.keep_workdir,
        cores=req.cores,
        solver_path=req.solver_path,
        timeout_s=req.timeout_s,
        write_vtk=req.write_vtk,
    )
    return EvaluateResponse(
        problem=int(instance.id),
        dim=instance.d,
        objectives={k.value: v for k, v in result.raw.items()},
        feasible=result.feasible,
        intrusion_mm=result.intrusion_mm,
        mass_kg=result.mass_kg,
        x_normalized=list(result.x_normalized),
        x_physical=list(result.x_physical),
        work_dir=result.work_dir,
    )
