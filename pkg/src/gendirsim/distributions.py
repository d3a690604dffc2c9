"""Densities and low-order moments of the target distributions.

The generalized Dirichlet family on K free coordinates has 2K shape
parameters (alpha_i, beta_i > 0) and density proportional to

    prod_i  y_i^(alpha_i - 1) * R_i^(gamma_i),

where R_i are the running remainders and the remainder exponents are

    gamma_i = beta_i - alpha_{i+1} - beta_{i+1}   (i < K),
    gamma_K = beta_K - 1.

With gamma_1 = ... = gamma_{K-1} = 0 the family collapses to the ordinary
Dirichlet on K+1 components.  All routines accept object arrays of exact
rationals and propagate them unchanged where no transcendental function is
involved (moments, sign structure); densities always evaluate in floats.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, xlogy

from .simplex import full_point, remainders


def _param_vector(x, name):
    x = np.asarray(x)
    if x.ndim != 1 or x.size < 1:
        raise ValueError(f"{name} must be a 1-d vector with at least one entry")
    if x.dtype != object:
        # integer input must not truncate downstream moment arithmetic
        x = np.asarray(x, float)
        if not np.isfinite(x).all():
            raise ValueError(f"{name} must be finite")
    if np.any(x <= 0):
        raise ValueError(f"{name} must be strictly positive")
    return x


@dataclass(frozen=True, eq=False)
class GenDirParams:
    """Shape parameters (alpha, beta) of a generalized Dirichlet law."""

    alpha: np.ndarray
    beta: np.ndarray

    def __post_init__(self):
        a = _param_vector(self.alpha, "alpha")
        b = _param_vector(self.beta, "beta")
        if a.shape != b.shape:
            raise ValueError("alpha and beta must have equal length")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)

    @property
    def K(self):
        return self.alpha.shape[0]

    @property
    def gamma(self):
        """Remainder exponents gamma_i implied by (alpha, beta)."""
        a, b = self.alpha, self.beta
        g = np.empty_like(b)
        g[:-1] = b[:-1] - a[1:] - b[1:]
        g[-1] = b[-1] - 1
        return g


@dataclass(frozen=True, eq=False)
class DirichletParams:
    """Concentration vector omega of an ordinary Dirichlet law on N parts."""

    omega: np.ndarray

    def __post_init__(self):
        w = _param_vector(self.omega, "omega")
        if w.shape[0] < 2:
            raise ValueError("omega needs at least two components")
        object.__setattr__(self, "omega", w)

    @property
    def N(self):
        return self.omega.shape[0]

    def as_gendir(self):
        """Equivalent generalized Dirichlet parameters (all gamma_i = 0, i < K)."""
        w = self.omega
        alpha = w[:-1].copy()
        beta = np.empty_like(alpha)
        # back-substitution of gamma_i = 0: beta_i = alpha_{i+1} + beta_{i+1}
        acc = w[-1]
        for i in range(alpha.shape[0] - 1, -1, -1):
            beta[i] = acc
            acc = acc + alpha[i]
        return GenDirParams(alpha, beta)


@dataclass(frozen=True, eq=False)
class MomentSet:
    """First and second moments: mean vector and covariance matrix."""

    mean: np.ndarray
    cov: np.ndarray

    @property
    def var(self):
        return np.diagonal(self.cov).copy()


def gd_log_density(params, y):
    """Log density of the generalized Dirichlet law at points y.

    Boundary conventions follow the limit of the density: a zero base with
    positive exponent gives -inf, with negative exponent +inf, and a zero
    exponent contributes nothing regardless of the base.

    Parameters
    ----------
    params : GenDirParams
    y : array_like, shape (..., K)

    Returns
    -------
    ndarray or scalar, shape (...)
    """
    a = np.asarray(params.alpha, float)
    b = np.asarray(params.beta, float)
    y = np.asarray(y, float)
    if y.shape[-1] != a.shape[0]:
        raise ValueError("point dimension does not match parameter length")
    rem = remainders(y)
    g = np.empty_like(b)
    g[:-1] = b[:-1] - a[1:] - b[1:]
    g[-1] = b[-1] - 1
    const = np.sum(gammaln(a + b) - gammaln(a) - gammaln(b))
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = xlogy(a - 1, y) + xlogy(g, rem)
    return const + np.sum(terms, axis=-1)


def gd_density(params, y):
    """Density of the generalized Dirichlet law (exp of gd_log_density)."""
    return np.exp(gd_log_density(params, y))


def dirichlet_log_density(params, y):
    """Log density of the ordinary Dirichlet law at free coordinates y."""
    w = np.asarray(params.omega, float)
    y = np.asarray(y, float)
    if y.shape[-1] != w.shape[0] - 1:
        raise ValueError("point dimension must be one less than len(omega)")
    full = full_point(y)
    const = gammaln(w.sum()) - np.sum(gammaln(w))
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = xlogy(w - 1, full)
    return const + np.sum(terms, axis=-1)


def _shifted_cumprod(x):
    """[1, x_1, x_1 x_2, ...]: products of the strictly preceding entries."""
    out = np.empty_like(x)
    out[0] = x[0] / x[0] if x.dtype == object else 1.0
    if x.shape[0] > 1:
        out[1:] = np.cumprod(x[:-1])
    return out


def gd_moments(params):
    """Mean vector and covariance matrix of the generalized Dirichlet law.

    Exact for object (rational) parameter arrays.  The covariance uses the
    ordered closed form for i < j mirrored onto the lower triangle.
    """
    a, b = params.alpha, params.beta
    K = a.shape[0]
    ratio = a / (a + b)
    stick = _shifted_cumprod(b / (a + b))          # prod_{j<i} beta_j/(alpha_j+beta_j)
    mean = ratio * stick
    M = _shifted_cumprod((b + 1) / (a + b + 1))    # prod_{k<i} (beta_k+1)/(alpha_k+beta_k+1)
    var = mean * ((a + 1) / (a + b + 1) * M - mean)
    bracket = a / (a + b + 1) * M - mean           # common factor of cov_ij over j > i
    cov = np.empty((K, K), dtype=a.dtype)
    for i in range(K):
        cov[i, i] = var[i]
        for j in range(i + 1, K):
            cov[i, j] = mean[j] * bracket[i]
            cov[j, i] = cov[i, j]
    return MomentSet(mean, cov)


def dirichlet_moments(params):
    """Mean and covariance of the K free coordinates under Dirichlet(omega)."""
    w = params.omega
    K = w.shape[0] - 1
    total = w.sum()
    mean = w[:K] / total
    denom = total * total * (total + 1)
    cov = np.empty((K, K), dtype=w.dtype)
    for i in range(K):
        for j in range(K):
            if i == j:
                cov[i, j] = w[i] * (total - w[i]) / denom
            else:
                cov[i, j] = -w[i] * w[j] / denom
    return MomentSet(mean, cov)


def beta_moments(alpha, beta):
    """Mean and variance of a beta law with shape parameters (alpha, beta)."""
    if alpha <= 0 or beta <= 0:
        raise ValueError("beta shape parameters must be positive")
    s = alpha + beta
    mean = alpha / s
    var = alpha * beta / (s * s * (s + 1))
    return mean, var


def covariance_sign_structure(params):
    """Signs of the off-diagonal covariances, organized by leading index.

    Returns a (K, K) integer matrix with entries in {-1, 0, +1}; the
    diagonal is +1.  For i < j the sign of cov_ij depends on i alone, so
    each super-diagonal row is constant, and the first row is never
    positive.
    """
    a, b = params.alpha, params.beta
    K = a.shape[0]
    moments = gd_moments(params)
    M = _shifted_cumprod((b + 1) / (a + b + 1))
    bracket = a / (a + b + 1) * M - moments.mean
    signs = np.zeros((K, K), dtype=int)
    for i in range(K):
        signs[i, i] = 1
        s = 0 if bracket[i] == 0 else (1 if bracket[i] > 0 else -1)
        for j in range(i + 1, K):
            signs[i, j] = s
            signs[j, i] = s
    if signs[0, 1:].max(initial=-1) > 0:
        raise RuntimeError("leading-row covariance sign must not be positive")
    return signs
