"""Exact samplers on the simplex driven by counter-addressed uniforms.

The generalized Dirichlet law factorizes over the stick-breaking
construction: independent fractions V_i ~ Beta(alpha_i, beta_i) applied
to the running remainder give Y_i = V_i prod_{k<i} (1 - V_k).  Each
fraction consumes exactly one uniform through the inverse beta CDF, so
sample number n always reads the same counter words.
"""

import numpy as np
from scipy.special import betaincinv

from .rng import STREAM_INIT, STREAM_PROBE, CounterRng


def sample_gendir(params, n, seed, *, stream=STREAM_INIT, start=0):
    """Draw n points from a generalized Dirichlet law.

    Parameters
    ----------
    params : GenDirParams
    n : int
    seed : int
    stream, start : stream id and absolute uniform offset of the draw.

    Returns
    -------
    ndarray, shape (n, K)
    """
    if n < 0:
        raise ValueError("sample count must be non-negative")
    a = np.asarray(params.alpha, float)
    b = np.asarray(params.beta, float)
    K = a.shape[0]
    rng = CounterRng(seed)
    u = rng.uniforms(stream, start, n * K).reshape(n, K)
    y = np.empty((n, K))
    prod = np.ones(n)
    for i in range(K):
        v = betaincinv(a[i], b[i], u[:, i])
        y[:, i] = v * prod
        prod = prod * (1.0 - v)
    return y


def sample_dirichlet(params, n, seed, *, stream=STREAM_INIT, start=0):
    """Draw n free-coordinate points from Dirichlet(omega)."""
    return sample_gendir(params.as_gendir(), n, seed, stream=stream, start=start)


def sample_interior_points(K, n, seed, *, margin=0.0, stream=STREAM_PROBE, start=0):
    """n points of the open simplex, uniformly distributed, margin-filtered.

    Points come from the flat Dirichlet via stick breaking; candidates
    whose coordinates or remainders fall within ``margin`` of a face are
    discarded and replaced deterministically from further down the
    stream.
    """
    if not 0 <= margin < 1.0 / (2 * K + 2):
        raise ValueError("margin must be small and non-negative")
    rng = CounterRng(seed)
    shapes_b = np.arange(K, 0, -1, dtype=float)  # Beta(1, K+1-i) fractions
    out = np.empty((n, K))
    have = 0
    pos = start
    while have < n:
        batch = max(2 * (n - have), 64)
        u = rng.uniforms(stream, pos, batch * K).reshape(batch, K)
        pos += batch * K
        y = np.empty((batch, K))
        prod = np.ones(batch)
        for i in range(K):
            v = betaincinv(1.0, shapes_b[i], u[:, i])
            y[:, i] = v * prod
            prod = prod * (1.0 - v)
        rem = 1 - np.cumsum(y, axis=-1)
        keep = (y > margin).all(axis=-1) & (rem > margin).all(axis=-1)
        got = y[keep]
        take = min(n - have, got.shape[0])
        out[have : have + take] = got[:take]
        have += take
    return out
