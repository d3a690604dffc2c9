"""Counter-addressed random streams for reproducible parallel ensembles.

Every variate is drawn at an absolute position inside a named stream of a
keyed counter-based generator, so any partitioning of the work across
threads reads identical values.  Gaussians come from the inverse normal
CDF applied to 53-bit uniforms; unlike rejection samplers this consumes
exactly one counter word per variate, which keeps positions addressable.
"""

import numpy as np
from numpy.random import Philox
from scipy.special import ndtri

# stream ids (second key word); one stream per independent purpose
STREAM_WIENER = 0
STREAM_RETRY = 1
STREAM_INIT = 2
STREAM_PROBE = 3

_WORDS_PER_BLOCK = 4
_MAX_SEED = 2**64


class CounterRng:
    """Stateless view of a keyed counter generator.

    Parameters
    ----------
    seed : int
        64-bit key; the same seed always reproduces every stream.
    """

    def __init__(self, seed):
        seed = int(seed)
        if not 0 <= seed < _MAX_SEED:
            raise ValueError("seed must fit in an unsigned 64-bit integer")
        self.seed = seed

    def raw(self, stream, start, count):
        """``count`` raw 64-bit words at absolute offset ``start``."""
        if count < 0 or start < 0:
            raise ValueError("start and count must be non-negative")
        if count == 0:
            return np.empty(0, dtype=np.uint64)
        block, offset = divmod(int(start), _WORDS_PER_BLOCK)
        bg = Philox(
            key=np.array([self.seed, int(stream)], dtype=np.uint64),
            counter=np.array([block, 0, 0, 0], dtype=np.uint64),
        )
        words = bg.random_raw(offset + int(count))
        return words[offset:]

    def uniforms(self, stream, start, count):
        """Doubles in (0, 1): 53-bit mantissas shifted off zero."""
        words = self.raw(stream, start, count)
        return (words >> np.uint64(11)) * 2.0**-53 + 2.0**-54

    def normals(self, stream, start, count):
        """Standard normals via the inverse CDF of the uniforms."""
        return ndtri(self.uniforms(stream, start, count))
