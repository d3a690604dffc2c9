"""Geometry of the unit simplex in remainder coordinates.

A point with K free coordinates y = (y_1, ..., y_K) lives on the simplex
{y_i >= 0, sum y_i <= 1}.  The running remainders

    R_i = 1 - (y_1 + ... + y_i),    i = 1, ..., K,

are non-increasing, and the last one R_K is the implied coordinate of the
(K+1)-dimensional composition.  The scaling factors

    U_i = prod_{m=i}^{K-1} 1 / R_m,    U_K = 1,

multiply the drift and diffusion of the generalized Dirichlet process and
diverge on the faces R_m = 0 with m < K.
"""

import numpy as np

# absolute slack separating genuine boundary violations from round-off
EPS_GEO = 1e-12


class DomainError(ValueError):
    """Point lies outside the admissible simplex."""


class SingularFaceError(DomainError):
    """An intermediate remainder vanishes, so 1/R_m scalings are undefined."""


def _as_points(y):
    y = np.asarray(y)
    if y.ndim < 1 or y.shape[-1] < 1:
        raise DomainError("need at least one coordinate along the last axis")
    return y


def remainders(y, *, check=True, eps=EPS_GEO):
    """Running remainders R_i = 1 - sum_{k<=i} y_k along the last axis.

    Parameters
    ----------
    y : array_like, shape (..., K)
        Free simplex coordinates.  Object arrays (e.g. Fractions) pass
        through exactly.
    check : bool
        If True, raise DomainError when any coordinate or remainder is
        below -eps, and floor float values in (-eps, 0) at zero.  If
        False, return the raw running subtraction unchanged.

    Returns
    -------
    ndarray, shape (..., K)
    """
    y = _as_points(y)
    rem = 1 - np.cumsum(y, axis=-1)
    if check:
        if y.dtype != object and not np.isfinite(np.asarray(y, float)).all():
            raise DomainError("coordinates must be finite")
        if np.any(y < -eps):
            raise DomainError("negative coordinate beyond tolerance")
        if np.any(rem < -eps):
            raise DomainError("coordinates sum beyond one")
        if y.dtype != object:
            rem = np.where(rem < 0, 0.0, rem)
    return rem


def scaling_factors(rem, *, check=True, eps=EPS_GEO):
    """Backward products U_i = prod_{m=i}^{K-1} 1/R_m from the remainders.

    U_K = 1 always (empty product).  With ``check`` the intermediate
    remainders R_1..R_{K-1} must exceed ``eps`` or SingularFaceError is
    raised; unchecked, vanishing remainders yield inf factors.
    """
    rem = _as_points(rem)
    K = rem.shape[-1]
    U = np.ones_like(rem)
    if K == 1:
        return U
    inner = rem[..., : K - 1]
    if check and np.any(inner <= eps):
        raise SingularFaceError("intermediate remainder at or below tolerance")
    with np.errstate(divide="ignore"):
        inv = 1 / inner
    U[..., : K - 1] = np.cumprod(inv[..., ::-1], axis=-1)[..., ::-1]
    return U


def validate_points(y, *, eps=EPS_GEO):
    """Raise DomainError unless all points satisfy the simplex constraints."""
    remainders(y, check=True, eps=eps)


def full_point(y, *, check=True, eps=EPS_GEO):
    """Append the final remainder, giving the (K+1)-component composition."""
    y = _as_points(y)
    rem = remainders(y, check=check, eps=eps)
    last = rem[..., -1:]
    if check and y.dtype != object:
        y = np.where(y < 0, 0.0, y)
    return np.concatenate([y, last], axis=-1)
