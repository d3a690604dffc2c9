"""Two-way map between SDE coefficients and distribution parameters.

A coefficient set (b, S, kappa, c) with b_i, kappa_i > 0, 0 < S_i < 1 and
an upper-triangular (K-1) x (K-1) matrix c drives the generalized
Dirichlet process.  A stationary generalized Dirichlet law exists iff two
consistency chains hold:

  * column chain:   c_1j / kappa_1 = ... = c_jj / kappa_j   for each j < K,
    the common value being 1 - gamma_j;
  * balance chain:  b_1 (1-S_1) / kappa_1 = ... = b_K (1-S_K) / kappa_K,
    the common value being 1 + gamma_K;

together with alpha_i = b_i S_i / kappa_i and beta recovered from the
gamma ladder by back-substitution.  The forward map coefficient -> law is
many-to-one (kappa rescales away); the inverse takes an explicit kappa.
"""

from dataclasses import dataclass

import numpy as np

from .distributions import GenDirParams

# relative slack for the consistency chains of a coefficient set
EPS_MAP = 1e-10


@dataclass(frozen=True, eq=False)
class SdeCoefficients:
    """Coefficient set (b, S, kappa, c) of the generalized process."""

    b: np.ndarray
    S: np.ndarray
    kappa: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        b = np.atleast_1d(np.asarray(self.b))
        S = np.atleast_1d(np.asarray(self.S))
        kappa = np.atleast_1d(np.asarray(self.kappa))
        K = b.shape[0]
        if S.shape != (K,) or kappa.shape != (K,):
            raise ValueError("b, S, kappa must share one length K")
        c = np.zeros((0, 0)) if self.c is None else np.asarray(self.c)
        if K == 1 and c.size == 0:
            c = c.reshape(0, 0)
        if c.shape != (K - 1, K - 1):
            raise ValueError("c must be a (K-1, K-1) matrix")
        arrays = {"b": b, "S": S, "kappa": kappa, "c": c}
        for name, arr in arrays.items():
            if arr.dtype != object:
                # integer input must not truncate downstream arithmetic
                arrays[name] = arr = np.asarray(arr, float)
                if arr.size and not np.isfinite(arr).all():
                    raise ValueError(f"{name} must be finite")
        b, S, kappa, c = arrays["b"], arrays["S"], arrays["kappa"], arrays["c"]
        for i in range(1, K - 1):
            for j in range(i):
                if c[i, j] != 0:
                    raise ValueError("c must vanish below the diagonal")
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "S", S)
        object.__setattr__(self, "kappa", kappa)
        object.__setattr__(self, "c", c)

    @property
    def K(self):
        return self.b.shape[0]


@dataclass(frozen=True)
class ChainViolation:
    """One violated constraint with enough context to report it."""

    constraint: str
    index: tuple
    detail: str


class CoefficientValidationError(ValueError):
    """Coefficient set admits no generalized Dirichlet invariant."""

    def __init__(self, violations):
        self.violations = list(violations)
        lines = [f"{v.constraint} at {v.index}: {v.detail}" for v in self.violations]
        super().__init__("invalid coefficient set: " + "; ".join(lines))


class NonNormalizableError(ValueError):
    """Implied shape parameters are not all positive."""


def _rel_spread(values):
    vals = [float(v) for v in values]
    scale = max(abs(v) for v in vals)
    if scale == 0:
        return 0.0
    return (max(vals) - min(vals)) / scale


def validate(coeffs, *, tol=EPS_MAP):
    """Check positivity bounds and both consistency chains.

    Returns the coefficient set unchanged when valid; otherwise raises
    CoefficientValidationError carrying every violation found.
    """
    b, S, kappa, c = coeffs.b, coeffs.S, coeffs.kappa, coeffs.c
    K = coeffs.K
    bad = []
    for i in range(K):
        if not b[i] > 0:
            bad.append(ChainViolation("positive-b", (i + 1,), f"b={b[i]}"))
        if not kappa[i] > 0:
            bad.append(ChainViolation("positive-kappa", (i + 1,), f"kappa={kappa[i]}"))
        if not (0 < S[i] < 1):
            bad.append(ChainViolation("open-unit-S", (i + 1,), f"S={S[i]}"))
    if bad:
        raise CoefficientValidationError(bad)
    for j in range(K - 1):
        ratios = [c[i, j] / kappa[i] for i in range(j + 1)]
        if _rel_spread(ratios) > tol:
            bad.append(
                ChainViolation(
                    "c-over-kappa-chain",
                    (j + 1,),
                    f"column ratios c_ij/kappa_i disagree: {ratios}",
                )
            )
    balance = [b[i] * (1 - S[i]) / kappa[i] for i in range(K)]
    if _rel_spread(balance) > tol:
        bad.append(
            ChainViolation(
                "relaxation-balance-chain",
                (),
                f"values b_i(1-S_i)/kappa_i disagree: {balance}",
            )
        )
    if bad:
        raise CoefficientValidationError(bad)
    return coeffs


def sde_to_distribution(coeffs):
    """Distribution parameters implied by a valid coefficient set.

    Precondition: ``validate(coeffs)`` passes.  Uses the first row of each
    chain; raises NonNormalizableError when any implied shape parameter
    fails to be positive.
    """
    b, S, kappa, c = coeffs.b, coeffs.S, coeffs.kappa, coeffs.c
    K = coeffs.K
    alpha = b * S / kappa
    gamma = np.empty_like(alpha)
    for j in range(K - 1):
        gamma[j] = 1 - c[j, j] / kappa[j]
    gamma[K - 1] = b[0] * (1 - S[0]) / kappa[0] - 1
    beta = np.empty_like(alpha)
    beta[K - 1] = gamma[K - 1] + 1
    for i in range(K - 2, -1, -1):
        beta[i] = gamma[i] + alpha[i + 1] + beta[i + 1]
    if np.any(alpha <= 0) or np.any(beta <= 0):
        raise NonNormalizableError(
            f"implied shapes must be positive: alpha={alpha}, beta={beta}"
        )
    return GenDirParams(alpha, beta)


def distribution_to_sde(params, kappa):
    """Coefficient set reproducing a given law at a chosen kappa scale."""
    kappa = np.atleast_1d(np.asarray(kappa))
    a, beta = params.alpha, params.beta
    K = params.K
    if kappa.shape != (K,):
        raise ValueError("kappa must have length K")
    if np.any(kappa <= 0):
        raise ValueError("kappa must be strictly positive")
    bK = beta[K - 1]
    b = kappa * (a + bK)
    S = a / (a + bK)
    gamma = params.gamma
    c = np.zeros((K - 1, K - 1), dtype=b.dtype)
    for j in range(K - 1):
        for i in range(j + 1):
            c[i, j] = kappa[i] * (1 - gamma[j])
    return SdeCoefficients(b, S, kappa, c)


def dirichlet_choice(coeffs):
    """Replace c by the choice c_ij = kappa_i that zeroes gamma_1..gamma_{K-1}.

    The returned set shares the invariant law family with the ordinary
    Dirichlet process built from the same (b, S, kappa).
    """
    b, S, kappa = coeffs.b, coeffs.S, coeffs.kappa
    K = coeffs.K
    c = np.zeros((K - 1, K - 1), dtype=kappa.dtype)
    for j in range(K - 1):
        for i in range(j + 1):
            c[i, j] = kappa[i]
    return SdeCoefficients(b, S, kappa, c)
