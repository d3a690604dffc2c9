"""Run configuration: YAML documents with exact rational literals.

Numbers anywhere in a config may be written as YAML numerics or as
strings parsed exactly by ``fractions.Fraction`` ("1/80", "0.625"), so
rational-valued coefficient tables survive the trip into binary floats
with one correctly-rounded conversion.  The shipped presets reproduce
the three published benchmark cases.
"""

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import yaml

from .kernel import ExactSampleInit, IntegratorConfig, PointInit
from .param_map import SdeCoefficients
from .distributions import GenDirParams
from .processes import BetaSdeParams, JacobiParams, WrightFisherParams

PROCESS_KINDS = ("gendir", "dirichlet", "wright-fisher", "jacobi", "beta")

DEFAULT_PRESET_SEED = 42


class ConfigError(ValueError):
    """Invalid configuration; ``path`` names the offending field."""

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}")


def parse_number(value, path):
    """One number from YAML: int, float, or an exact rational string."""
    if isinstance(value, bool):
        raise ConfigError(path, "expected a number, got a boolean")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        try:
            return float(Fraction(value.strip()))
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(path, f"not a number or p/q rational: {value!r}") from exc
    raise ConfigError(path, f"expected a number, got {type(value).__name__}")


def parse_vector(value, path, length=None):
    if not isinstance(value, (list, tuple)):
        raise ConfigError(path, "expected a list of numbers")
    vec = np.array([parse_number(v, f"{path}[{i}]") for i, v in enumerate(value)])
    if length is not None and vec.shape[0] != length:
        raise ConfigError(path, f"expected length {length}, got {vec.shape[0]}")
    return vec


def _parse_c_matrix(value, path, K):
    if K == 1:
        if value not in (None, [], [[]]):
            raise ConfigError(path, "K = 1 has no coupling matrix; omit c")
        return np.zeros((0, 0))
    if not isinstance(value, (list, tuple)) or len(value) != K - 1:
        raise ConfigError(path, f"expected {K - 1} rows")
    c = np.zeros((K - 1, K - 1))
    for i, row in enumerate(value):
        if not isinstance(row, (list, tuple)):
            raise ConfigError(f"{path}[{i}]", "expected a list")
        if len(row) == K - 1 - i:
            row = [0.0] * i + list(row)  # row given from the diagonal on
        if len(row) != K - 1:
            raise ConfigError(
                f"{path}[{i}]", f"expected {K - 1} or {K - 1 - i} entries"
            )
        for j, v in enumerate(row):
            c[i, j] = parse_number(v, f"{path}[{i}][{j}]")
            if j < i and c[i, j] != 0:
                raise ConfigError(f"{path}[{i}][{j}]", "below-diagonal entry must be 0")
    return c


def _parse_positive_int(value, path, minimum=1):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(path, "expected an integer")
    if value < minimum:
        raise ConfigError(path, f"must be at least {minimum}")
    return value


@dataclass(frozen=True)
class RunConfig:
    """Validated description of one simulation run."""

    process: str
    K: int
    integrator: IntegratorConfig
    init: object
    coefficients: SdeCoefficients | None = None
    distribution: GenDirParams | None = None
    dist_kappa: np.ndarray | None = None
    wright_fisher: WrightFisherParams | None = None
    jacobi: JacobiParams | None = None
    beta_sde: BetaSdeParams | None = None
    window: tuple | None = None
    timeseries_path: str = "timeseries.csv"
    summary_path: str = "summary.json"


def _integrator_from(doc, path):
    if not isinstance(doc, dict):
        raise ConfigError(path, "expected a mapping")
    known = {"dt", "t_end", "particles", "seed", "record_stride", "boundary_retries"}
    for key in doc:
        if key not in known:
            raise ConfigError(f"{path}.{key}", "unknown integrator field")
    for key in ("dt", "t_end", "particles", "seed"):
        if key not in doc:
            raise ConfigError(f"{path}.{key}", "required field missing")
    try:
        return IntegratorConfig(
            dt=parse_number(doc["dt"], f"{path}.dt"),
            t_end=parse_number(doc["t_end"], f"{path}.t_end"),
            particles=_parse_positive_int(doc["particles"], f"{path}.particles"),
            seed=_parse_positive_int(doc["seed"], f"{path}.seed", minimum=0),
            boundary_retries=_parse_positive_int(
                doc.get("boundary_retries", 10), f"{path}.boundary_retries", minimum=0
            ),
            record_stride=_parse_positive_int(
                doc.get("record_stride", 1), f"{path}.record_stride"
            ),
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from exc


def _init_from(doc, path, dim):
    if doc is None:
        doc = {"kind": "point", "point": [0.0] * dim}
    if not isinstance(doc, dict) or "kind" not in doc:
        raise ConfigError(path, "expected a mapping with a 'kind' field")
    kind = doc["kind"]
    if kind == "point":
        if "point" not in doc:
            raise ConfigError(f"{path}.point", "required for kind: point")
        vec = parse_vector(doc["point"], f"{path}.point", length=dim)
        try:
            return PointInit(vec)
        except ValueError as exc:
            raise ConfigError(f"{path}.point", str(exc)) from exc
    if kind == "exact-sample":
        return ExactSampleInit()
    raise ConfigError(f"{path}.kind", f"unknown init kind {kind!r}")


def load_config(doc):
    """Build a RunConfig from a parsed YAML document (a dict)."""
    if not isinstance(doc, dict):
        raise ConfigError("<root>", "config must be a mapping")
    process = doc.get("process", "gendir")
    if process not in PROCESS_KINDS:
        raise ConfigError("process", f"unknown process {process!r}")
    if "K" not in doc:
        raise ConfigError("K", "required field missing")
    K = _parse_positive_int(doc["K"], "K")

    coeffs = None
    dist = None
    dist_kappa = None
    wf = None
    jac = None
    beta_p = None
    if process == "gendir":
        has_c = "coefficients" in doc
        has_d = "distribution" in doc
        if has_c == has_d:
            raise ConfigError(
                "<root>", "give exactly one of 'coefficients' or 'distribution'"
            )
        if has_c:
            coeffs = _coefficients_from(doc["coefficients"], "coefficients", K)
        else:
            dist, dist_kappa = _distribution_from(doc["distribution"], "distribution", K)
        dim = K
    elif process == "dirichlet":
        coeffs = _dirichlet_coeffs_from(doc, K)
        dim = K
    elif process == "wright-fisher":
        wf = _wright_fisher_from(doc, K)
        dim = K
    elif process == "jacobi":
        jac = _jacobi_from(doc, K)
        dim = K + 1  # jacobi states carry all N coordinates
    else:
        beta_p = _beta_from(doc, K)
        dim = 1

    integrator = _integrator_from(doc.get("integrator"), "integrator")
    init = _init_from(doc.get("init"), "init", dim)
    window = None
    if "window" in doc and doc["window"] is not None:
        w = parse_vector(doc["window"], "window", length=2)
        if not w[0] <= w[1]:
            raise ConfigError("window", "window start must not exceed its end")
        window = (float(w[0]), float(w[1]))
    out = doc.get("output", {}) or {}
    if not isinstance(out, dict):
        raise ConfigError("output", "expected a mapping")
    return RunConfig(
        process=process,
        K=K,
        integrator=integrator,
        init=init,
        coefficients=coeffs,
        distribution=dist,
        dist_kappa=dist_kappa,
        wright_fisher=wf,
        jacobi=jac,
        beta_sde=beta_p,
        window=window,
        timeseries_path=str(out.get("timeseries", "timeseries.csv")),
        summary_path=str(out.get("summary", "summary.json")),
    )


def _coefficients_from(doc, path, K):
    if not isinstance(doc, dict):
        raise ConfigError(path, "expected a mapping")
    for key in ("b", "S", "kappa"):
        if key not in doc:
            raise ConfigError(f"{path}.{key}", "required field missing")
    b = parse_vector(doc["b"], f"{path}.b", length=K)
    S = parse_vector(doc["S"], f"{path}.S", length=K)
    kappa = parse_vector(doc["kappa"], f"{path}.kappa", length=K)
    c = _parse_c_matrix(doc.get("c"), f"{path}.c", K)
    for i in range(K):
        if not 0 < S[i] < 1:
            raise ConfigError(f"{path}.S[{i}]", "must satisfy 0 < S < 1")
        if not b[i] > 0:
            raise ConfigError(f"{path}.b[{i}]", "must be positive")
        if not kappa[i] > 0:
            raise ConfigError(f"{path}.kappa[{i}]", "must be positive")
    try:
        return SdeCoefficients(b, S, kappa, c)
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from exc


def _distribution_from(doc, path, K):
    if not isinstance(doc, dict):
        raise ConfigError(path, "expected a mapping")
    for key in ("alpha", "beta", "kappa"):
        if key not in doc:
            raise ConfigError(f"{path}.{key}", "required field missing")
    alpha = parse_vector(doc["alpha"], f"{path}.alpha", length=K)
    beta = parse_vector(doc["beta"], f"{path}.beta", length=K)
    kappa = parse_vector(doc["kappa"], f"{path}.kappa", length=K)
    try:
        return GenDirParams(alpha, beta), kappa
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from exc


def _dirichlet_coeffs_from(doc, K):
    if "coefficients" not in doc:
        raise ConfigError("coefficients", "required for process: dirichlet")
    block = doc["coefficients"]
    if not isinstance(block, dict):
        raise ConfigError("coefficients", "expected a mapping")
    b = parse_vector(block.get("b"), "coefficients.b", length=K)
    S = parse_vector(block.get("S"), "coefficients.S", length=K)
    kappa = parse_vector(block.get("kappa"), "coefficients.kappa", length=K)
    for i in range(K):
        if not 0 < S[i] < 1:
            raise ConfigError(f"coefficients.S[{i}]", "must satisfy 0 < S < 1")
        if not b[i] > 0:
            raise ConfigError(f"coefficients.b[{i}]", "must be positive")
        if not kappa[i] > 0:
            raise ConfigError(f"coefficients.kappa[{i}]", "must be positive")
    # c is unused by the plain Dirichlet process; zeros keep the carrier valid
    return SdeCoefficients(b, S, kappa, np.zeros((K - 1, K - 1)))


def _wright_fisher_from(doc, K):
    if "omega" not in doc:
        raise ConfigError("omega", "required for process: wright-fisher")
    omega = parse_vector(doc["omega"], "omega", length=K + 1)
    try:
        return WrightFisherParams(omega)
    except ValueError as exc:
        raise ConfigError("omega", str(exc)) from exc


def _jacobi_from(doc, K):
    block = doc.get("jacobi")
    if not isinstance(block, dict):
        raise ConfigError("jacobi", "required mapping for process: jacobi")
    for key in ("a", "c", "pi"):
        if key not in block:
            raise ConfigError(f"jacobi.{key}", "required field missing")
    a = parse_number(block["a"], "jacobi.a")
    c = parse_number(block["c"], "jacobi.c")
    pi = parse_vector(block["pi"], "jacobi.pi", length=K + 1)
    try:
        return JacobiParams(a, c, pi)
    except ValueError as exc:
        raise ConfigError("jacobi", str(exc)) from exc


def _scalar(value, path):
    if isinstance(value, (list, tuple)):
        if len(value) != 1:
            raise ConfigError(path, "expected a single value")
        value = value[0]
    return parse_number(value, path)


def _beta_from(doc, K):
    if K != 1:
        raise ConfigError("K", "the beta process is univariate; K must be 1")
    block = doc.get("coefficients")
    if not isinstance(block, dict):
        raise ConfigError("coefficients", "required mapping for process: beta")
    for key in ("b", "S", "kappa"):
        if key not in block:
            raise ConfigError(f"coefficients.{key}", "required field missing")
    b = _scalar(block["b"], "coefficients.b")
    S = _scalar(block["S"], "coefficients.S")
    kappa = _scalar(block["kappa"], "coefficients.kappa")
    if not 0 < S < 1:
        raise ConfigError("coefficients.S", "must satisfy 0 < S < 1")
    try:
        return BetaSdeParams(b, S, kappa)
    except ValueError as exc:
        raise ConfigError("coefficients", str(exc)) from exc


def load_config_text(text):
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError("<root>", f"YAML parse error: {exc}") from exc
    return load_config(doc)


def load_config_file(path):
    with open(path) as fh:
        return load_config_text(fh.read())


# benchmark cases: shared (b, S, kappa) with three choices of c_11
_CASE_C11 = {1: Fraction(1, 80), 2: Fraction(-1, 80), 3: Fraction(-1, 4)}


def reference_coefficients(case):
    """Coefficient set of one published benchmark case (exact rationals)."""
    if case not in _CASE_C11:
        raise ValueError("case must be 1, 2, or 3")
    b = np.array([Fraction(1, 10), Fraction(3, 2)], dtype=object)
    S = np.array([Fraction(5, 8), Fraction(2, 5)], dtype=object)
    kappa = np.array([Fraction(1, 80), Fraction(3, 10)], dtype=object)
    c = np.array([[_CASE_C11[case]]], dtype=object)
    return SdeCoefficients(b, S, kappa, c)


def reference_case(case, *, particles=10000, seed=DEFAULT_PRESET_SEED):
    """RunConfig reproducing one benchmark case from the origin.

    The slowest relaxation rate of the shared coefficients is b_1/2 =
    1/20, so the mean of the first component approaches its asymptote
    with time constant about 20; the horizon below leaves a windowed
    transient bias under 0.3%, measured against the closed-form moments.
    """
    exact = reference_coefficients(case)
    coeffs = SdeCoefficients(
        np.asarray(exact.b, float),
        np.asarray(exact.S, float),
        np.asarray(exact.kappa, float),
        np.asarray(exact.c, float),
    )
    integrator = IntegratorConfig(
        dt=0.025, t_end=150.0, particles=particles, seed=seed
    )
    return RunConfig(
        process="gendir",
        K=2,
        integrator=integrator,
        init=PointInit(np.zeros(2)),
        coefficients=coeffs,
        window=(100.0, 150.0),
        timeseries_path=f"appendix_b_case{case}_timeseries.csv",
        summary_path=f"appendix_b_case{case}_summary.json",
    )
