"""Run orchestration: summaries, analytic backends, and the verifier."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from gendirsim.distributions import (
    DirichletParams,
    GenDirParams,
    dirichlet_log_density,
    dirichlet_moments,
    gd_log_density,
    gd_moments,
)
from gendirsim.param_map import (
    CoefficientValidationError,
    NonNormalizableError,
    validate,
)
from gendirsim.runconfig import load_config
from gendirsim.runner import (
    compute_moments,
    evaluate_density,
    execute_run,
    map_parameters,
    random_valid_coefficients,
    run_reference_case,
    verify_potential,
)
from gendirsim.stats import window_average


def _small_doc(**integrator):
    base = {"dt": 0.02, "t_end": 2.0, "particles": 200, "seed": 5}
    base.update(integrator)
    return {
        "process": "gendir",
        "K": 2,
        "coefficients": {
            "b": [2.0, 2.5],
            "S": [0.5, 0.6],
            "kappa": [0.5, 0.5],
            "c": [[0.5]],
        },
        "integrator": base,
        "init": {"kind": "exact-sample"},
    }


def test_execute_run_summary_layout():
    cfg = load_config(_small_doc())
    result = execute_run(cfg)
    s = result.summary
    assert s["process"] == "gendir" and s["K"] == 2 and s["seed"] == 5
    assert s["integrator"]["particles"] == 200
    # default window is the second half of the horizon
    assert s["window"] == [1.0, 2.0]
    assert set(s["diagnostics"]) >= {"particle_steps", "redrawn", "clamped"}
    assert s["coefficients"]["b"] == [2.0, 2.5]
    assert_allclose(s["distribution"]["alpha"], [2.0, 3.0])
    assert "analytic_moments" in s and "empirical_moments" in s
    assert isinstance(result.comparison_passed, bool)
    assert s["comparison"]["passed"] == result.comparison_passed
    assert s["wall_time_s"] > 0
    assert result.csv_text.startswith("t,mean_1,mean_2,")
    # windowed block agrees with an average recomputed from the series
    rec = window_average(result.series, 1.0, 2.0)
    assert_allclose(s["empirical_moments"]["mean"], rec.mean, rtol=0)
    assert s["empirical_moments"]["count"] == rec.count


def test_execute_run_from_distribution_block():
    doc = _small_doc()
    del doc["coefficients"]
    doc["distribution"] = {"alpha": [5, 2], "beta": [5, 3], "kappa": [1, 1]}
    result = execute_run(load_config(doc))
    s = result.summary
    assert_allclose(s["coefficients"]["b"], [8.0, 5.0], rtol=0)
    assert_allclose(s["coefficients"]["S"], [0.625, 0.4], rtol=0)
    assert_allclose(s["coefficients"]["c"], [[1.0]], rtol=0)
    assert_allclose(s["distribution"]["alpha"], [5.0, 2.0], rtol=0)


def test_execute_run_without_target_law():
    doc = {
        "process": "jacobi",
        "K": 2,
        "jacobi": {"a": -1.5, "c": 0.4, "pi": [0.3, 0.45, 0.25]},
        "integrator": {"dt": 0.02, "t_end": 0.4, "particles": 100, "seed": 2},
        "init": {"kind": "point", "point": [0.3, 0.45, 0.25]},
    }
    result = execute_run(load_config(doc))
    assert result.comparison_passed is None
    assert "analytic_moments" not in result.summary
    assert "comparison" not in result.summary
    assert "empirical_moments" in result.summary


def test_execute_run_single_particle_explains():
    doc = _small_doc(particles=1)
    doc["init"] = {"kind": "point", "point": [0.2, 0.2]}
    with pytest.raises(ValueError, match="at least two particles"):
        execute_run(load_config(doc))


def test_run_reference_case_small():
    result = run_reference_case(1, particles=150, seed=8)
    assert result.config.integrator.particles == 150
    assert result.config.integrator.seed == 8
    assert result.summary["window"] == [100.0, 150.0]
    assert result.comparison_passed in (True, False)


def test_compute_moments_backends():
    block = compute_moments("gendir", alpha=[5, 2], beta=[5, 3])
    ms = gd_moments(GenDirParams(np.array([5.0, 2.0]), np.array([5.0, 3.0])))
    assert_allclose(block["mean"], np.asarray(ms.mean, float), rtol=0)
    assert_allclose(block["cov"], np.asarray(ms.cov, float), rtol=0)
    assert_allclose(block["var"], np.diagonal(np.asarray(ms.cov, float)), rtol=0)
    assert block["gamma"] == [0.0, 2.0]

    block = compute_moments("dirichlet", omega=[2, 2, 2])
    ms = dirichlet_moments(DirichletParams(np.array([2.0, 2.0, 2.0])))
    assert_allclose(block["mean"], np.asarray(ms.mean, float), rtol=0)

    block = compute_moments("beta", alpha=5, beta=5)
    assert_allclose(block["mean"], [0.5], rtol=0)
    assert_allclose(block["var"], [1 / 44], rtol=1e-15)

    with pytest.raises(ValueError, match="unknown distribution kind"):
        compute_moments("gamma", shape=1)


def test_evaluate_density_backends():
    params = GenDirParams(np.array([5.0, 2.0]), np.array([5.0, 3.0]))
    block = evaluate_density("gendir", [[0.3, 0.4], [0.1, 0.2]],
                             alpha=[5, 2], beta=[5, 3])
    expect = gd_log_density(params, np.array([[0.3, 0.4], [0.1, 0.2]]))
    assert_allclose(block["log_density"], expect, rtol=0)
    assert_allclose(block["density"], np.exp(expect), rtol=0)

    # a single flat point is promoted to one row
    block = evaluate_density("gendir", [0.3, 0.4], alpha=[5, 2], beta=[5, 3])
    assert np.shape(block["log_density"]) == (1,)

    block = evaluate_density("dirichlet", [[0.2, 0.3]], omega=[2, 2, 2])
    expect = dirichlet_log_density(
        DirichletParams(np.array([2.0, 2.0, 2.0])), np.array([[0.2, 0.3]])
    )
    assert_allclose(block["log_density"], np.atleast_1d(expect), rtol=0)

    with pytest.raises(ValueError, match="unknown distribution kind"):
        evaluate_density("gamma", [[0.5]], shape=1)


def test_map_parameters_directions():
    block = map_parameters(
        "sde-to-distribution",
        b=[0.1, 1.5], S=[0.625, 0.4], kappa=[0.0125, 0.3], c=[[-0.25]],
    )
    assert_allclose(block["alpha"], [5.0, 2.0], rtol=1e-14)
    assert_allclose(block["beta"], [26.0, 3.0], rtol=1e-14)
    assert_allclose(block["gamma"], [21.0, 2.0], rtol=1e-13)

    block = map_parameters(
        "distribution-to-sde", alpha=[5, 2], beta=[5, 3], kappa=[1, 1]
    )
    assert_allclose(block["b"], [8.0, 5.0], rtol=0)
    assert_allclose(block["S"], [0.625, 0.4], rtol=0)
    assert_allclose(block["c"], [[1.0]], rtol=0)

    with pytest.raises(ValueError, match="unknown direction"):
        map_parameters("sideways", b=[1], S=[0.5], kappa=[1])


def test_map_parameters_validates_chains():
    # a K = 3 column with disagreeing ratios c_ij / kappa_i
    with pytest.raises(CoefficientValidationError):
        map_parameters(
            "sde-to-distribution",
            b=[1.0, 1.0, 1.0], S=[0.5, 0.5, 0.5], kappa=[1.0, 1.0, 1.0],
            c=[[1.0, 0.5], [0.0, 0.25]],
        )
    # chains can hold while the implied beta_1 is not positive
    with pytest.raises(NonNormalizableError):
        map_parameters(
            "sde-to-distribution",
            b=[1.0, 1.0], S=[0.5, 0.5], kappa=[1.0, 1.0], c=[[5.0]],
        )


@pytest.mark.parametrize("K", [1, 2, 4])
def test_random_valid_coefficients(K):
    rng = np.random.default_rng(0)
    for _ in range(5):
        coeffs = random_valid_coefficients(rng, K)
        validate(coeffs)  # must not raise


def test_verify_potential_small():
    report = verify_potential(K=2, n_points=50, n_sets=3, seed=11)
    assert report["K"] == 2
    assert report["points_per_set"] == 50
    assert len(report["sets"]) == 3
    assert report["max_residual"] < 1e-8
    assert report["max_residual"] == max(s["max_residual"] for s in report["sets"])
