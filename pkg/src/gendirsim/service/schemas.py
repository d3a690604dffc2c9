"""Request/response models of the HTTP service.

Any numeric field accepts a JSON number or an exact rational string
("1/80"), mirroring the config file convention.  Models convert to the
core dataclasses via ``to_*`` methods; responses carry plain JSON built
by the runner.
"""

from typing import Any, Literal, Optional, Union

from pydantic import BaseModel, Field, field_validator

from ..runconfig import ConfigError, load_config, parse_number

Number = Union[int, float, str]


def _num(value, path="value"):
    try:
        return parse_number(value, path)
    except ConfigError as exc:
        raise ValueError(str(exc)) from exc


def _vec(values, path):
    return [_num(v, f"{path}[{i}]") for i, v in enumerate(values)]


class CoefficientsModel(BaseModel):
    b: list[Number]
    S: list[Number]
    kappa: list[Number]
    c: Optional[list[list[Number]]] = None

    def to_doc(self):
        doc = {
            "b": _vec(self.b, "b"),
            "S": _vec(self.S, "S"),
            "kappa": _vec(self.kappa, "kappa"),
        }
        if self.c is not None:
            doc["c"] = [_vec(row, f"c[{i}]") for i, row in enumerate(self.c)]
        return doc


class DistributionModel(BaseModel):
    alpha: list[Number]
    beta: list[Number]
    kappa: Optional[list[Number]] = None

    def to_doc(self):
        doc = {"alpha": _vec(self.alpha, "alpha"), "beta": _vec(self.beta, "beta")}
        if self.kappa is not None:
            doc["kappa"] = _vec(self.kappa, "kappa")
        return doc


class JacobiModel(BaseModel):
    a: Number
    c: Number
    pi: list[Number]

    def to_doc(self):
        return {"a": _num(self.a, "a"), "c": _num(self.c, "c"), "pi": _vec(self.pi, "pi")}


class IntegratorModel(BaseModel):
    dt: Number
    t_end: Number
    particles: int = Field(ge=1)
    seed: int = Field(ge=0)
    boundary_retries: int = Field(default=10, ge=0)
    record_stride: int = Field(default=1, ge=1)

    def to_doc(self):
        return {
            "dt": _num(self.dt, "dt"),
            "t_end": _num(self.t_end, "t_end"),
            "particles": self.particles,
            "seed": self.seed,
            "boundary_retries": self.boundary_retries,
            "record_stride": self.record_stride,
        }


class InitModel(BaseModel):
    kind: Literal["point", "exact-sample"] = "point"
    point: Optional[list[Number]] = None

    def to_doc(self):
        doc = {"kind": self.kind}
        if self.point is not None:
            doc["point"] = _vec(self.point, "point")
        return doc


class SimulateRequest(BaseModel):
    process: Literal["gendir", "dirichlet", "wright-fisher", "jacobi", "beta"] = (
        "gendir"
    )
    K: int = Field(ge=1)
    coefficients: Optional[CoefficientsModel] = None
    distribution: Optional[DistributionModel] = None
    omega: Optional[list[Number]] = None
    jacobi: Optional[JacobiModel] = None
    integrator: IntegratorModel
    init: Optional[InitModel] = None
    window: Optional[tuple[float, float]] = None
    threads: int = Field(default=1, ge=1)

    def to_runconfig(self):
        doc: dict[str, Any] = {
            "process": self.process,
            "K": self.K,
            "integrator": self.integrator.to_doc(),
        }
        if self.coefficients is not None:
            doc["coefficients"] = self.coefficients.to_doc()
        if self.distribution is not None:
            doc["distribution"] = self.distribution.to_doc()
        if self.omega is not None:
            doc["omega"] = _vec(self.omega, "omega")
        if self.jacobi is not None:
            doc["jacobi"] = self.jacobi.to_doc()
        if self.init is not None:
            doc["init"] = self.init.to_doc()
        if self.window is not None:
            doc["window"] = list(self.window)
        return load_config(doc)


class SimulateResponse(BaseModel):
    summary: dict[str, Any]
    timeseries_csv: str
    comparison_passed: Optional[bool] = None


class MomentsRequest(BaseModel):
    kind: Literal["gendir", "dirichlet", "beta"] = "gendir"
    alpha: Optional[list[Number]] = None
    beta: Optional[list[Number]] = None
    omega: Optional[list[Number]] = None
    alpha_scalar: Optional[Number] = None
    beta_scalar: Optional[Number] = None

    def kwargs(self):
        if self.kind == "gendir":
            if self.alpha is None or self.beta is None:
                raise ValueError("gendir moments need alpha and beta vectors")
            return {"alpha": _vec(self.alpha, "alpha"), "beta": _vec(self.beta, "beta")}
        if self.kind == "dirichlet":
            if self.omega is None:
                raise ValueError("dirichlet moments need omega")
            return {"omega": _vec(self.omega, "omega")}
        if self.alpha_scalar is None or self.beta_scalar is None:
            raise ValueError("beta moments need alpha_scalar and beta_scalar")
        return {
            "alpha": _num(self.alpha_scalar, "alpha_scalar"),
            "beta": _num(self.beta_scalar, "beta_scalar"),
        }


class MomentsResponse(BaseModel):
    kind: str
    mean: list[float]
    var: list[float]
    cov: Optional[list[list[float]]] = None
    gamma: Optional[list[float]] = None


class DensityRequest(BaseModel):
    kind: Literal["gendir", "dirichlet"] = "gendir"
    alpha: Optional[list[Number]] = None
    beta: Optional[list[Number]] = None
    omega: Optional[list[Number]] = None
    points: list[list[Number]]

    @field_validator("points")
    @classmethod
    def _non_empty(cls, v):
        if not v:
            raise ValueError("need at least one point")
        return v

    def kwargs(self):
        if self.kind == "gendir":
            if self.alpha is None or self.beta is None:
                raise ValueError("gendir density needs alpha and beta vectors")
            return {"alpha": _vec(self.alpha, "alpha"), "beta": _vec(self.beta, "beta")}
        if self.omega is None:
            raise ValueError("dirichlet density needs omega")
        return {"omega": _vec(self.omega, "omega")}

    def points_list(self):
        return [_vec(row, f"points[{i}]") for i, row in enumerate(self.points)]


class DensityResponse(BaseModel):
    kind: str
    points: list[list[float]]
    log_density: list[float]
    density: list[float]


class MapRequest(BaseModel):
    direction: Literal["sde-to-distribution", "distribution-to-sde"]
    b: Optional[list[Number]] = None
    S: Optional[list[Number]] = None
    kappa: Optional[list[Number]] = None
    c: Optional[list[list[Number]]] = None
    alpha: Optional[list[Number]] = None
    beta: Optional[list[Number]] = None

    def kwargs(self):
        out = {}
        for name in ("b", "S", "kappa", "alpha", "beta"):
            val = getattr(self, name)
            if val is not None:
                out[name] = _vec(val, name)
        if self.c is not None:
            out["c"] = [_vec(row, f"c[{i}]") for i, row in enumerate(self.c)]
        return out


class MapResponse(BaseModel):
    direction: str
    alpha: Optional[list[float]] = None
    beta: Optional[list[float]] = None
    gamma: Optional[list[float]] = None
    b: Optional[list[float]] = None
    S: Optional[list[float]] = None
    kappa: Optional[list[float]] = None
    c: Optional[list[list[float]]] = None


class VerifyPotentialRequest(BaseModel):
    K: int = Field(default=2, ge=1, le=8)
    points: int = Field(default=1000, ge=1, le=100000)
    sets: int = Field(default=20, ge=1, le=1000)
    seed: int = Field(default=7, ge=0)


class VerifyPotentialResponse(BaseModel):
    K: int
    points_per_set: int
    max_residual: float
    sets: list[dict[str, Any]]


class HealthResponse(BaseModel):
    status: str
    version: str
