"""Companion diffusions sharing simplex or interval state spaces.

These serve as cross-checks for the generalized Dirichlet kernel: the
plain Dirichlet SDE (same invariant family when the coupling matrix takes
the special choice c_ij = kappa_i), the multivariate Wright-Fisher and
Jacobi processes, and the univariate beta SDE that all of them reduce to
when K = 1.  Each evaluator has a thin wrapper class implementing the
ensemble stepping interface of the integrator.
"""

import threading
from dataclasses import dataclass

import numpy as np

from .distributions import DirichletParams, GenDirParams
from .kernel import project_ensemble
from .param_map import ChainViolation, CoefficientValidationError


@dataclass(frozen=True, eq=False)
class WrightFisherParams:
    """Concentration vector omega; omega = sum(omega_i) relaxes the mean."""

    omega: np.ndarray

    def __post_init__(self):
        w = np.atleast_1d(np.asarray(self.omega, float))
        if w.ndim != 1 or w.shape[0] < 2:
            raise ValueError("omega must be a vector of at least two entries")
        if not np.isfinite(w).all() or np.any(w <= 0):
            raise ValueError("omega entries must be positive and finite")
        object.__setattr__(self, "omega", w)

    @property
    def N(self):
        return self.omega.shape[0]


@dataclass(frozen=True, eq=False)
class JacobiParams:
    """Mean-reversion rate a < 0, noise scale c > 0, target weights pi."""

    a: float
    c: float
    pi: np.ndarray

    def __post_init__(self):
        pi = np.atleast_1d(np.asarray(self.pi, float))
        if not self.a < 0:
            raise ValueError("a must be negative")
        if not self.c > 0:
            raise ValueError("c must be positive")
        if pi.ndim != 1 or pi.shape[0] < 2 or np.any(pi <= 0):
            raise ValueError("pi must be a vector of positive weights")
        if abs(pi.sum() - 1.0) > 1e-12:
            raise ValueError("pi must sum to one")
        object.__setattr__(self, "pi", pi)

    @property
    def N(self):
        return self.pi.shape[0]


@dataclass(frozen=True)
class BetaSdeParams:
    """Univariate coefficients: relaxation b, target S, noise scale kappa."""

    b: float
    S: float
    kappa: float

    def __post_init__(self):
        if not self.b > 0:
            raise ValueError("b must be positive")
        if not 0 < self.S < 1:
            raise ValueError("S must lie strictly between 0 and 1")
        if not self.kappa > 0:
            raise ValueError("kappa must be positive")

    def shape_parameters(self):
        """Beta law shapes (alpha, beta) of the invariant."""
        return self.b * self.S / self.kappa, self.b * (1 - self.S) / self.kappa


def dirichlet_sde_drift_diff(b, S, kappa, y):
    """Drift and diagonal diffusion of the plain Dirichlet SDE.

    drift_i = (b_i/2)[S_i Y_N - (1-S_i) Y_i],  B_ii = kappa_i Y_i Y_N,
    with Y_N the final remainder.
    """
    b = np.asarray(b, float)
    S = np.asarray(S, float)
    kappa = np.asarray(kappa, float)
    y = np.asarray(y, float)
    yN = 1 - np.sum(y, axis=-1, keepdims=True)
    drift = 0.5 * b * (S * yN - (1 - S) * y)
    diff = kappa * y * yN
    return drift, np.maximum(diff, 0.0)


def dirichlet_omega(b, S, kappa, *, tol=1e-10):
    """Concentration vector of the Dirichlet SDE's invariant.

    Requires the balance chain b_i (1-S_i)/kappa_i to agree across i; the
    common value is the last concentration omega_N.
    """
    b = np.atleast_1d(np.asarray(b, float))
    S = np.atleast_1d(np.asarray(S, float))
    kappa = np.atleast_1d(np.asarray(kappa, float))
    balance = b * (1 - S) / kappa
    scale = np.abs(balance).max()
    if scale > 0 and (balance.max() - balance.min()) / scale > tol:
        raise CoefficientValidationError(
            [
                ChainViolation(
                    "relaxation-balance-chain",
                    (),
                    f"values b_i(1-S_i)/kappa_i disagree: {balance.tolist()}",
                )
            ]
        )
    omega = np.append(b * S / kappa, balance[0])
    return DirichletParams(omega)


def _wright_fisher_parts(params, y):
    w = params.omega
    K = w.shape[0] - 1
    y = np.asarray(y, float)
    if y.shape[-1] != K:
        raise ValueError("point dimension must be len(omega) - 1")
    total = w.sum()
    drift = 0.5 * (w[:K] - total * y)
    rad = y[..., :, None] * (np.eye(K) - y[..., None, :])
    diag_rad = np.diagonal(rad, axis1=-2, axis2=-1)
    clips = int(np.count_nonzero(diag_rad < 0))
    g = np.sqrt(np.maximum(rad, 0.0))
    return drift, g, clips


def wright_fisher_drift_diff(params, y):
    """Drift and K x K noise factor matrix of the Wright-Fisher process.

    Component i couples to its own row of independent Wiener increments:
    dY_i = drift_i dt + sum_j g_ij dW_ij with g_ij the entrywise root of
    Y_i (delta_ij - Y_j).  Off the diagonal that radicand is negative at
    any interior point, so the literal entrywise rule zeroes those
    entries; on the diagonal it only dips below zero by round-off at the
    boundary.  Negative radicands are clipped at zero either way.
    """
    drift, g, _ = _wright_fisher_parts(params, y)
    return drift, g


def jacobi_drift_diff(params, y):
    """Drift and N x (N-1) noise factor matrix of the Jacobi process.

    The state carries all N coordinates.  Column j of the factor matrix
    multiplies dW_j:  g_ij = delta_ij sqrt(c Y_i) - Y_i sqrt(c Y_j), the
    first term present only for i <= N-1.  Column sums vanish wherever
    the coordinates sum to one, so the unit sum is conserved pathwise.
    """
    pi = params.pi
    N = pi.shape[0]
    y = np.asarray(y, float)
    if y.shape[-1] != N:
        raise ValueError("point dimension must equal len(pi)")
    drift = params.a * (y - pi)
    root = np.sqrt(params.c * np.maximum(y, 0.0))
    g = -y[..., :, None] * root[..., None, : N - 1]
    idx = np.arange(N - 1)
    g[..., idx, idx] += root[..., : N - 1]
    return drift, g


def beta_sde_drift_diff(params, y):
    """Drift and squared noise of the univariate beta SDE."""
    y = np.asarray(y, float)
    drift = 0.5 * params.b * (params.S - y)
    diff = params.kappa * y * (1 - y)
    return drift, np.maximum(diff, 0.0)


class _SimplexEnsembleMixin:
    """Shared admissibility, projection, and recording for free coordinates."""

    def admissible(self, y):
        rem = 1 - np.cumsum(y, axis=-1)
        ok = np.isfinite(y).all(axis=-1)
        ok &= (y >= 0).all(axis=-1)
        ok &= rem[..., -1] >= 0
        return ok

    def clamp(self, y):
        return project_ensemble(y)

    def full_state(self, y):
        return np.concatenate([y, 1 - np.sum(y, axis=-1, keepdims=True)], axis=-1)


class DirichletSdeProcess(_SimplexEnsembleMixin):
    """Plain Dirichlet SDE on K free coordinates with diagonal noise."""

    diagonal_noise = True

    def __init__(self, b, S, kappa):
        self.params = dirichlet_omega(b, S, kappa)
        self.b = np.atleast_1d(np.asarray(b, float))
        self.S = np.atleast_1d(np.asarray(S, float))
        self.kappa = np.atleast_1d(np.asarray(kappa, float))
        self.dim = self.b.shape[0]
        self.noise_dim = self.dim

    def drift_and_noise(self, y):
        return dirichlet_sde_drift_diff(self.b, self.S, self.kappa, y)

    def initial_sample_params(self):
        return self.params.as_gendir()


class WrightFisherProcess(_SimplexEnsembleMixin):
    """Wright-Fisher ensemble driver; noise rows act on a K x K field."""

    diagonal_noise = False

    def __init__(self, params):
        self.params = params
        self.dim = params.N - 1
        self.noise_dim = self.dim * self.dim
        self.radicand_clips = 0
        self._lock = threading.Lock()

    def drift_and_noise(self, y):
        drift, g, clips = _wright_fisher_parts(self.params, y)
        if clips:
            with self._lock:
                self.radicand_clips += clips
        n = y.shape[0]
        K = self.dim
        # expand rows into a block-diagonal map onto the K*K Wiener field
        noise = np.zeros((n, K, K * K))
        for i in range(K):
            noise[:, i, i * K : (i + 1) * K] = g[:, i, :]
        return drift, noise

    def initial_sample_params(self):
        return DirichletParams(self.params.omega).as_gendir()


class JacobiProcess:
    """Jacobi ensemble driver on all N coordinates; N-1 Wiener components."""

    diagonal_noise = False

    def __init__(self, params):
        self.params = params
        self.dim = params.N
        self.noise_dim = params.N - 1

    def drift_and_noise(self, y):
        return jacobi_drift_diff(self.params, y)

    def admissible(self, y):
        ok = np.isfinite(y).all(axis=-1)
        ok &= (y >= 0).all(axis=-1)
        return ok

    def clamp(self, y):
        y = np.nan_to_num(np.asarray(y, float), nan=0.0, posinf=1.0, neginf=0.0)
        y = np.maximum(y, 0.0)
        total = np.sum(y, axis=-1, keepdims=True)
        total = np.where(total <= 0, 1.0, total)
        return y / total

    def full_state(self, y):
        return y


class BetaSdeProcess(_SimplexEnsembleMixin):
    """Univariate beta SDE driver (one free coordinate)."""

    diagonal_noise = True

    def __init__(self, params):
        self.params = params
        self.dim = 1
        self.noise_dim = 1

    def drift_and_noise(self, y):
        drift, diff = beta_sde_drift_diff(self.params, y[..., 0])
        return drift[..., None], diff[..., None]

    def initial_sample_params(self):
        alpha, beta = self.params.shape_parameters()
        return GenDirParams(np.array([alpha]), np.array([beta]))
