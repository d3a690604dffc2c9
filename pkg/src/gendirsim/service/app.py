"""FastAPI application exposing the simulation and analysis operations.

Endpoint handlers are plain functions over the schema models so the
in-process client can call them without a transport; domain errors map
to 422 responses with the offending field path in the detail.
"""

from fastapi import FastAPI, HTTPException

from .. import __version__, runner
from ..kernel import SimulationAbort
from ..param_map import (
    CoefficientValidationError,
    NonNormalizableError,
)
from ..runconfig import ConfigError, reference_case
from ..simplex import DomainError
from . import schemas

_CLIENT_ERRORS = (
    ConfigError,
    CoefficientValidationError,
    NonNormalizableError,
    DomainError,
    ValueError,
)


def _as_http(exc):
    return HTTPException(status_code=422, detail=str(exc))


def handle_simulate(req: schemas.SimulateRequest) -> schemas.SimulateResponse:
    try:
        cfg = req.to_runconfig()
        result = runner.execute_run(cfg, threads=req.threads)
    except SimulationAbort as exc:
        raise HTTPException(status_code=500, detail=str(exc)) from exc
    except _CLIENT_ERRORS as exc:
        raise _as_http(exc) from exc
    return schemas.SimulateResponse(
        summary=result.summary,
        timeseries_csv=result.csv_text,
        comparison_passed=result.comparison_passed,
    )


def handle_moments(req: schemas.MomentsRequest) -> schemas.MomentsResponse:
    try:
        block = runner.compute_moments(req.kind, **req.kwargs())
    except _CLIENT_ERRORS as exc:
        raise _as_http(exc) from exc
    return schemas.MomentsResponse(**block)


def handle_density(req: schemas.DensityRequest) -> schemas.DensityResponse:
    try:
        block = runner.evaluate_density(req.kind, req.points_list(), **req.kwargs())
    except _CLIENT_ERRORS as exc:
        raise _as_http(exc) from exc
    return schemas.DensityResponse(**block)


def handle_map(req: schemas.MapRequest) -> schemas.MapResponse:
    try:
        block = runner.map_parameters(req.direction, **req.kwargs())
    except _CLIENT_ERRORS as exc:
        raise _as_http(exc) from exc
    return schemas.MapResponse(**block)


def handle_verify_potential(
    req: schemas.VerifyPotentialRequest,
) -> schemas.VerifyPotentialResponse:
    try:
        block = runner.verify_potential(
            K=req.K, n_points=req.points, n_sets=req.sets, seed=req.seed
        )
    except _CLIENT_ERRORS as exc:
        raise _as_http(exc) from exc
    return schemas.VerifyPotentialResponse(
        K=block["K"],
        points_per_set=block["points_per_set"],
        max_residual=block["max_residual"],
        sets=block["sets"],
    )


def handle_preset(case: int) -> schemas.SimulateRequest:
    if case not in (1, 2, 3):
        raise HTTPException(status_code=422, detail="case must be 1, 2, or 3")
    cfg = reference_case(case)
    co = cfg.coefficients
    return schemas.SimulateRequest(
        process="gendir",
        K=cfg.K,
        coefficients=schemas.CoefficientsModel(
            b=list(map(float, co.b)),
            S=list(map(float, co.S)),
            kappa=list(map(float, co.kappa)),
            c=[[float(v) for v in row] for row in co.c],
        ),
        integrator=schemas.IntegratorModel(
            dt=cfg.integrator.dt,
            t_end=cfg.integrator.t_end,
            particles=cfg.integrator.particles,
            seed=cfg.integrator.seed,
            boundary_retries=cfg.integrator.boundary_retries,
            record_stride=cfg.integrator.record_stride,
        ),
        init=schemas.InitModel(kind="point", point=[0.0] * cfg.K),
        window=cfg.window,
    )


def create_app():
    app = FastAPI(title="gendirsim", version=__version__)

    @app.get("/health", response_model=schemas.HealthResponse)
    def health():
        return schemas.HealthResponse(status="ok", version=__version__)

    @app.post("/simulate", response_model=schemas.SimulateResponse)
    def simulate(req: schemas.SimulateRequest):
        return handle_simulate(req)

    @app.get("/presets/appendix-b/{case}", response_model=schemas.SimulateRequest)
    def preset(case: int):
        return handle_preset(case)

    @app.post("/moments", response_model=schemas.MomentsResponse)
    def moments(req: schemas.MomentsRequest):
        return handle_moments(req)

    @app.post("/density", response_model=schemas.DensityResponse)
    def density(req: schemas.DensityRequest):
        return handle_density(req)

    @app.post("/map", response_model=schemas.MapResponse)
    def map_(req: schemas.MapRequest):
        return handle_map(req)

    @app.post("/verify-potential", response_model=schemas.VerifyPotentialResponse)
    def verify_potential(req: schemas.VerifyPotentialRequest):
        return handle_verify_potential(req)

    return app


app = create_app()
