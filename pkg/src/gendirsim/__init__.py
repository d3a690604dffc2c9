"""Generalized Dirichlet diffusion toolkit.

Core pieces: simplex geometry, target densities and moments, the
coefficient/parameter correspondence, the ensemble SDE integrator with
its stationarity diagnostics, companion processes, online statistics,
and a service/CLI front end.
"""

__version__ = "0.1.0"

from .distributions import (
    DirichletParams,
    GenDirParams,
    MomentSet,
    beta_moments,
    covariance_sign_structure,
    dirichlet_log_density,
    dirichlet_moments,
    gd_density,
    gd_log_density,
    gd_moments,
)
from .kernel import (
    Diagnostics,
    EnsembleState,
    ExactSampleInit,
    GenDirProcess,
    IntegratorConfig,
    PointInit,
    diffusion_diag,
    drift,
    em_step,
    potential_gradient,
    potential_residual,
    simulate,
)
from .param_map import (
    CoefficientValidationError,
    NonNormalizableError,
    SdeCoefficients,
    dirichlet_choice,
    distribution_to_sde,
    sde_to_distribution,
    validate,
)
from .sampling import sample_gendir
from .simplex import DomainError, SingularFaceError, full_point, remainders

__all__ = [
    "__version__",
    "DirichletParams",
    "GenDirParams",
    "MomentSet",
    "beta_moments",
    "covariance_sign_structure",
    "dirichlet_log_density",
    "dirichlet_moments",
    "gd_density",
    "gd_log_density",
    "gd_moments",
    "Diagnostics",
    "EnsembleState",
    "ExactSampleInit",
    "GenDirProcess",
    "IntegratorConfig",
    "PointInit",
    "diffusion_diag",
    "drift",
    "em_step",
    "potential_gradient",
    "potential_residual",
    "simulate",
    "CoefficientValidationError",
    "NonNormalizableError",
    "SdeCoefficients",
    "dirichlet_choice",
    "distribution_to_sde",
    "sde_to_distribution",
    "validate",
    "sample_gendir",
    "DomainError",
    "SingularFaceError",
    "full_point",
    "remainders",
]
