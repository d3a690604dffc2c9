"""Streaming ensemble moments with partition-independent reductions.

Accumulators follow the numerically stable one-pass update and merge by
the pairwise combination rule.  ``ensemble_moments`` always splits the
input rows into fixed 4096-row chunks and merges them along a fixed
binary tree, so the floating-point result depends only on the row order,
never on how callers distributed the rows across workers.
"""

from dataclasses import dataclass, field

import numpy as np

# fixed reduction block; must not depend on worker count or array length
_CHUNK = 4096


@dataclass
class OnlineMoments:
    """One-pass accumulator for mean vector and central comoment matrix."""

    mean: np.ndarray
    comoment: np.ndarray
    count: int = 0

    @classmethod
    def zeros(cls, dim):
        return cls(np.zeros(dim), np.zeros((dim, dim)), 0)

    def accumulate(self, x):
        """Fold in one observation (1-d vector)."""
        x = np.asarray(x, float)
        self.count += 1
        delta = x - self.mean
        self.mean = self.mean + delta / self.count
        self.comoment = self.comoment + np.outer(delta, x - self.mean)
        return self

    def merge(self, other):
        """Combined accumulator of two disjoint sample sets."""
        if self.count == 0:
            return OnlineMoments(other.mean.copy(), other.comoment.copy(), other.count)
        if other.count == 0:
            return OnlineMoments(self.mean.copy(), self.comoment.copy(), self.count)
        n = self.count + other.count
        delta = other.mean - self.mean
        mean = self.mean + delta * (other.count / n)
        comoment = (
            self.comoment
            + other.comoment
            + np.outer(delta, delta) * (self.count * other.count / n)
        )
        return OnlineMoments(mean, comoment, n)


def _chunk_stats(rows):
    m = rows.mean(axis=0)
    centered = rows - m
    # einsum keeps the contraction single-threaded and order-fixed
    com = np.einsum("ni,nj->ij", centered, centered)
    return OnlineMoments(m, com, rows.shape[0])


def ensemble_moments(samples):
    """Accumulator for a full (n, dim) sample block.

    Chunking and the merge tree are functions of the row index alone, so
    the result is bitwise reproducible for a given row order.
    """
    samples = np.asarray(samples, float)
    if samples.ndim != 2:
        raise ValueError("samples must be a 2-d array (rows are observations)")
    n = samples.shape[0]
    if n == 0:
        return OnlineMoments.zeros(samples.shape[1])
    stats = [
        _chunk_stats(samples[lo : min(lo + _CHUNK, n)]) for lo in range(0, n, _CHUNK)
    ]
    while len(stats) > 1:
        merged = []
        for i in range(0, len(stats) - 1, 2):
            merged.append(stats[i].merge(stats[i + 1]))
        if len(stats) % 2:
            merged.append(stats[-1])
        stats = merged
    return stats[0]


@dataclass(frozen=True, eq=False)
class MomentRecord:
    """Finalized moments of one ensemble snapshot."""

    t: float
    mean: np.ndarray
    cov: np.ndarray | None
    se: np.ndarray | None
    count: int

    @property
    def var(self):
        return None if self.cov is None else np.diagonal(self.cov).copy()


def finalize(acc, t=0.0, *, sample=False):
    """Turn an accumulator into a MomentRecord.

    Covariance is population-normalized (1/n); pass ``sample=True`` for
    the 1/(n-1) variant.  A single observation yields means only.
    """
    if acc.count == 0:
        raise ValueError("cannot finalize an empty accumulator")
    if acc.count == 1:
        return MomentRecord(float(t), acc.mean.copy(), None, None, 1)
    denom = acc.count - 1 if sample else acc.count
    cov = acc.comoment / denom
    var = np.maximum(np.diagonal(cov), 0.0)
    se = np.sqrt(var / acc.count)
    return MomentRecord(float(t), acc.mean.copy(), cov, se, acc.count)


@dataclass
class MomentTimeSeries:
    """Ordered snapshots of ensemble moments along a run."""

    records: list = field(default_factory=list)

    def append(self, record):
        if self.records and record.t <= self.records[-1].t:
            raise ValueError("record times must be strictly increasing")
        self.records.append(record)

    def __len__(self):
        return len(self.records)

    @property
    def dim(self):
        if not self.records:
            raise ValueError("empty time series")
        return self.records[0].mean.shape[0]

    def times(self):
        return np.array([r.t for r in self.records])


def window_average(series, t_from, t_to, *, slack=1e-9):
    """Arithmetic average of all records with t in [t_from, t_to].

    Record times are multiples of the step size, so the window edges get a
    small slack against representation error.  Raises ValueError when the
    window is empty or degenerate.
    """
    if not t_to >= t_from:
        raise ValueError("need t_to >= t_from")
    picked = [r for r in series.records if t_from - slack <= r.t <= t_to + slack]
    if not picked:
        raise ValueError("no records inside the averaging window")
    counts = {r.count for r in picked}
    if len(counts) != 1:
        raise ValueError("window mixes records with different ensemble sizes")
    mean = np.mean([r.mean for r in picked], axis=0)
    cov = None
    se = None
    if all(r.cov is not None for r in picked):
        cov = np.mean([r.cov for r in picked], axis=0)
        se = np.mean([r.se for r in picked], axis=0)
    t_mid = float(np.mean([r.t for r in picked]))
    return MomentRecord(t_mid, mean, cov, se, counts.pop())


@dataclass(frozen=True)
class ToleranceSpec:
    """Relative tolerances for mean, variance, and covariance entries."""

    mean_rel: float = 0.05
    var_rel: float = 0.05
    cov_rel: float = 0.10


@dataclass(frozen=True)
class ComparisonEntry:
    name: str
    analytic: float
    empirical: float
    rel_dev: float
    se_multiple: float | None
    passed: bool


@dataclass(frozen=True)
class ComparisonReport:
    entries: tuple
    passed: bool

    def failures(self):
        return [e for e in self.entries if not e.passed]

    def as_dict(self):
        return {
            "passed": bool(self.passed),
            "entries": [
                {
                    "name": e.name,
                    "analytic": e.analytic,
                    "empirical": e.empirical,
                    "rel_dev": e.rel_dev,
                    "se_multiple": e.se_multiple,
                    "passed": bool(e.passed),
                }
                for e in self.entries
            ],
        }


def _entry(name, analytic, empirical, tol, se=None):
    analytic = float(analytic)
    empirical = float(empirical)
    scale = abs(analytic)
    dev = abs(empirical - analytic)
    rel = dev / scale if scale > 0 else (0.0 if dev == 0 else np.inf)
    se_mult = None if se is None or se == 0 else dev / se
    return ComparisonEntry(name, analytic, empirical, rel, se_mult, rel <= tol)


def compare(record, analytic, tol=ToleranceSpec()):
    """Relative comparison of an empirical record against analytic moments.

    Covers every mean, variance, and ordered covariance entry (i < j).
    The record must carry a covariance (at least two observations).
    """
    K = analytic.mean.shape[0]
    if record.mean.shape[0] != K:
        raise ValueError("record and analytic moments have different dimension")
    if record.cov is None:
        raise ValueError("record carries no covariance to compare")
    entries = []
    avar = np.diagonal(analytic.cov)
    for i in range(K):
        se = None if record.se is None else float(record.se[i])
        entries.append(
            _entry(f"mean_{i + 1}", analytic.mean[i], record.mean[i], tol.mean_rel, se)
        )
    for i in range(K):
        entries.append(
            _entry(f"var_{i + 1}", avar[i], record.cov[i, i], tol.var_rel)
        )
    for i in range(K):
        for j in range(i + 1, K):
            entries.append(
                _entry(
                    f"cov_{i + 1}_{j + 1}",
                    analytic.cov[i, j],
                    record.cov[i, j],
                    tol.cov_rel,
                )
            )
    entries = tuple(entries)
    return ComparisonReport(entries, all(e.passed for e in entries))
