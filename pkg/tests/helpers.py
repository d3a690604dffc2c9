"""Seeded factories shared by the test modules."""

import numpy as np

from gendirsim.distributions import GenDirParams


def random_gendir_params(rng, K, lo=0.6, hi=6.0):
    """Log-uniform shape parameters, bounded away from 0."""
    alpha = np.exp(rng.uniform(np.log(lo), np.log(hi), K))
    beta = np.exp(rng.uniform(np.log(lo), np.log(hi), K))
    return GenDirParams(alpha, beta)


def random_interior_points(rng, K, n, margin=0.02):
    """Interior simplex points from numpy's own Dirichlet sampler.

    Independent of the package samplers on purpose, so tests probing the
    kernel do not share code with the thing under test.
    """
    out = np.empty((n, K))
    have = 0
    while have < n:
        cand = rng.dirichlet(np.ones(K + 1), size=2 * (n - have) + 16)[:, :K]
        rem = 1 - np.cumsum(cand, axis=-1)
        keep = (cand > margin).all(axis=-1) & (rem > margin).all(axis=-1)
        got = cand[keep]
        take = min(n - have, got.shape[0])
        out[have : have + take] = got[:take]
        have += take
    return out
