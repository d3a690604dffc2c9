"""Run orchestration shared by the service endpoints and the CLI.

``execute_run`` resolves a RunConfig into a process object, integrates
the ensemble, averages the stationary window, compares against analytic
moments where a target law exists, and packages everything as a
JSON-ready summary plus CSV text.
"""

import time
from dataclasses import dataclass

import numpy as np

from . import kernel, output, param_map, processes, sampling
from .distributions import (
    DirichletParams,
    GenDirParams,
    MomentSet,
    beta_moments,
    dirichlet_log_density,
    dirichlet_moments,
    gd_log_density,
    gd_moments,
)
from .runconfig import RunConfig, reference_case
from .stats import ToleranceSpec, compare, window_average

# comparison only covers the K free components; the derived component's
# moments are linear combinations and stay in the CSV for inspection
REFERENCE_TOLERANCES = ToleranceSpec(mean_rel=0.05, var_rel=0.05, cov_rel=0.10)


@dataclass
class RunResult:
    config: RunConfig
    series: object
    final_state: object
    diagnostics: object
    summary: dict
    csv_text: str
    comparison_passed: bool | None


def _resolve_process(cfg):
    if cfg.process == "gendir":
        coeffs = cfg.coefficients
        if coeffs is None:
            coeffs = param_map.distribution_to_sde(cfg.distribution, cfg.dist_kappa)
        return kernel.GenDirProcess(coeffs)
    if cfg.process == "dirichlet":
        c = cfg.coefficients
        return processes.DirichletSdeProcess(c.b, c.S, c.kappa)
    if cfg.process == "wright-fisher":
        return processes.WrightFisherProcess(cfg.wright_fisher)
    if cfg.process == "jacobi":
        return processes.JacobiProcess(cfg.jacobi)
    if cfg.process == "beta":
        return processes.BetaSdeProcess(cfg.beta_sde)
    raise ValueError(f"unknown process kind {cfg.process!r}")


def _analytic_moments(cfg, process):
    """Target-law moments over the K free components, or None."""
    if cfg.process == "gendir":
        return gd_moments(process.params)
    if cfg.process == "dirichlet":
        return dirichlet_moments(process.params)
    if cfg.process == "wright-fisher":
        if process.dim == 1:
            return dirichlet_moments(DirichletParams(process.params.omega))
        return None  # clipped noise departs from the Dirichlet law for K > 1
    if cfg.process == "beta":
        mean, var = beta_moments(*process.params.shape_parameters())
        return MomentSet(np.array([mean]), np.array([[var]]))
    return None


def _moment_block(mean, cov, se=None, count=None, t=None):
    block = {"mean": output.to_jsonable(mean)}
    if cov is not None:
        block["cov"] = output.to_jsonable(cov)
        block["var"] = output.to_jsonable(np.diagonal(cov))
    if se is not None:
        block["se_mean"] = output.to_jsonable(se)
    if count is not None:
        block["count"] = int(count)
    if t is not None:
        block["t"] = float(t)
    return block


def execute_run(cfg, *, threads=1):
    """Integrate one configured run and assemble its artifacts."""
    t0 = time.perf_counter()
    process = _resolve_process(cfg)
    series, final_state, diagnostics = kernel.simulate(
        None, cfg.integrator, cfg.init, threads=threads, process=process
    )
    csv_text = output.timeseries_to_csv(series)

    window = cfg.window
    if window is None:
        window = (cfg.integrator.t_end / 2, cfg.integrator.t_end)
    windowed = None
    if series.records[-1].cov is not None:
        try:
            windowed = window_average(series, window[0], window[1])
        except ValueError:
            windowed = None

    analytic = _analytic_moments(cfg, process)
    comparison = None
    if analytic is not None and windowed is not None:
        Kfree = analytic.mean.shape[0]
        free_rec = type(windowed)(
            windowed.t,
            windowed.mean[:Kfree],
            windowed.cov[:Kfree, :Kfree],
            None if windowed.se is None else windowed.se[:Kfree],
            windowed.count,
        )
        comparison = compare(free_rec, analytic, REFERENCE_TOLERANCES)

    summary = {
        "process": cfg.process,
        "K": cfg.K,
        "seed": cfg.integrator.seed,
        "integrator": {
            "dt": cfg.integrator.dt,
            "t_end": cfg.integrator.t_end,
            "particles": cfg.integrator.particles,
            "record_stride": cfg.integrator.record_stride,
            "boundary_retries": cfg.integrator.boundary_retries,
        },
        "window": list(window),
        "diagnostics": diagnostics.as_dict(),
    }
    if cfg.process == "gendir":
        params = process.params
        summary["coefficients"] = {
            "b": output.to_jsonable(process.coeffs.b),
            "S": output.to_jsonable(process.coeffs.S),
            "kappa": output.to_jsonable(process.coeffs.kappa),
            "c": output.to_jsonable(process.coeffs.c),
        }
        summary["distribution"] = {
            "alpha": output.to_jsonable(params.alpha),
            "beta": output.to_jsonable(params.beta),
            "gamma": output.to_jsonable(params.gamma),
        }
    if cfg.process == "wright-fisher":
        summary["diagnostics"]["radicand_clips"] = process.radicand_clips
    if analytic is not None:
        summary["analytic_moments"] = _moment_block(analytic.mean, analytic.cov)
    if windowed is not None:
        summary["empirical_moments"] = _moment_block(
            windowed.mean, windowed.cov, windowed.se, windowed.count, windowed.t
        )
    if comparison is not None:
        summary["comparison"] = comparison.as_dict()
    summary["wall_time_s"] = time.perf_counter() - t0
    return RunResult(
        config=cfg,
        series=series,
        final_state=final_state,
        diagnostics=diagnostics,
        summary=summary,
        csv_text=csv_text,
        comparison_passed=None if comparison is None else comparison.passed,
    )


def run_reference_case(case, *, particles=10000, seed=None, threads=1):
    """Execute one shipped benchmark preset."""
    kwargs = {"particles": particles}
    if seed is not None:
        kwargs["seed"] = seed
    cfg = reference_case(case, **kwargs)
    return execute_run(cfg, threads=threads)


def compute_moments(kind, **kwargs):
    """Analytic moments for one of the target laws; returns a JSON block."""
    if kind == "gendir":
        params = GenDirParams(np.asarray(kwargs["alpha"]), np.asarray(kwargs["beta"]))
        ms = gd_moments(params)
        return {
            "kind": kind,
            "gamma": output.to_jsonable(np.asarray(params.gamma, float)),
            **_moment_block(
                np.asarray(ms.mean, float), np.asarray(ms.cov, float)
            ),
        }
    if kind == "dirichlet":
        params = DirichletParams(np.asarray(kwargs["omega"]))
        ms = dirichlet_moments(params)
        return {
            "kind": kind,
            **_moment_block(np.asarray(ms.mean, float), np.asarray(ms.cov, float)),
        }
    if kind == "beta":
        mean, var = beta_moments(float(kwargs["alpha"]), float(kwargs["beta"]))
        return {"kind": kind, "mean": [mean], "var": [var]}
    raise ValueError(f"unknown distribution kind {kind!r}")


def evaluate_density(kind, points, **kwargs):
    """Log density values at the given points (list of K-vectors)."""
    pts = np.asarray(points, float)
    if pts.ndim == 1:
        pts = pts[None, :]
    if kind == "gendir":
        params = GenDirParams(np.asarray(kwargs["alpha"]), np.asarray(kwargs["beta"]))
        vals = gd_log_density(params, pts)
    elif kind == "dirichlet":
        params = DirichletParams(np.asarray(kwargs["omega"]))
        vals = dirichlet_log_density(params, pts)
    else:
        raise ValueError(f"unknown distribution kind {kind!r}")
    vals = np.atleast_1d(vals)
    return {
        "kind": kind,
        "points": output.to_jsonable(pts),
        "log_density": output.to_jsonable(vals),
        "density": output.to_jsonable(np.exp(vals)),
    }


def map_parameters(direction, *, b=None, S=None, kappa=None, c=None,
                   alpha=None, beta=None):
    """Convert between coefficient and distribution forms."""
    if direction == "sde-to-distribution":
        coeffs = param_map.SdeCoefficients(
            np.asarray(b), np.asarray(S), np.asarray(kappa),
            None if c is None else np.asarray(c),
        )
        param_map.validate(coeffs)
        params = param_map.sde_to_distribution(coeffs)
        return {
            "direction": direction,
            "alpha": output.to_jsonable(np.asarray(params.alpha, float)),
            "beta": output.to_jsonable(np.asarray(params.beta, float)),
            "gamma": output.to_jsonable(np.asarray(params.gamma, float)),
        }
    if direction == "distribution-to-sde":
        params = GenDirParams(np.asarray(alpha), np.asarray(beta))
        coeffs = param_map.distribution_to_sde(params, np.asarray(kappa))
        return {
            "direction": direction,
            "b": output.to_jsonable(np.asarray(coeffs.b, float)),
            "S": output.to_jsonable(np.asarray(coeffs.S, float)),
            "kappa": output.to_jsonable(np.asarray(coeffs.kappa, float)),
            "c": output.to_jsonable(np.asarray(coeffs.c, float)),
        }
    raise ValueError(f"unknown direction {direction!r}")


def random_valid_coefficients(rng, K, *, lo=0.6, hi=6.0, kappa_lo=0.2, kappa_hi=2.0):
    """One random chain-consistent coefficient set.

    Generated through the inverse map from random shape parameters, which
    spans every valid set: the chains force c_ij = kappa_i (1 - gamma_j).
    """
    alpha = np.exp(rng.uniform(np.log(lo), np.log(hi), size=K))
    beta = np.exp(rng.uniform(np.log(lo), np.log(hi), size=K))
    kappa = np.exp(rng.uniform(np.log(kappa_lo), np.log(kappa_hi), size=K))
    return param_map.distribution_to_sde(GenDirParams(alpha, beta), kappa)


def verify_potential(*, K=2, n_points=1000, n_sets=20, seed=7, margin=0.05):
    """Max absolute stationarity residual over random sets and points."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    sets = []
    for s in range(n_sets):
        coeffs = random_valid_coefficients(rng, K)
        pts = sampling.sample_interior_points(
            K, n_points, seed, margin=margin, start=s * 4 * K * n_points
        )
        res = kernel.potential_residual(coeffs, pts)
        worst_here = float(np.max(np.abs(res)))
        worst = max(worst, worst_here)
        params = param_map.sde_to_distribution(coeffs)
        sets.append(
            {
                "alpha": output.to_jsonable(np.asarray(params.alpha, float)),
                "beta": output.to_jsonable(np.asarray(params.beta, float)),
                "kappa": output.to_jsonable(np.asarray(coeffs.kappa, float)),
                "max_residual": worst_here,
            }
        )
    return {
        "K": K,
        "points_per_set": n_points,
        "sets": sets,
        "max_residual": worst,
    }
