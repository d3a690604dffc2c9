"""Drift, diffusion, stationarity diagnostics, and the ensemble integrator.

The generalized Dirichlet process on K free coordinates reads

    dY_i = (U_i/2) { b_i [S_i R_K - (1-S_i) Y_i]
                     + Y_i R_K sum_{j=i}^{K-1} c_ij / R_j } dt
           + sqrt(kappa_i Y_i R_K U_i) dW_i,

with running remainders R_j and scaling factors U_i from the simplex
module.  Noise is diagonal: K independent Wiener increments.

The integrator is Euler-Maruyama over a particle ensemble with a
boundary policy of bounded redraws from a reserved Wiener stream followed
by projection back into the closed simplex.  All Wiener increments are
addressed by (step, particle, component), so results are independent of
the number of worker threads.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import simplex
from .param_map import sde_to_distribution, validate
from .rng import STREAM_INIT, STREAM_RETRY, STREAM_WIENER, CounterRng
from .sampling import sample_gendir
from .stats import MomentTimeSeries, ensemble_moments, finalize

# margin kept between clamped states and the singular faces R_j = 0, j < K
EPS_BND = 1e-12


class SimulationAbort(RuntimeError):
    """Ensemble produced non-finite values that survived the boundary policy."""


def project_ensemble(y, *, inner_margin=0.0):
    """Greedy projection of free coordinates into the closed simplex.

    Coordinates are floored at zero, then capped in order so that every
    intermediate remainder keeps at least ``inner_margin`` and the final
    remainder stays non-negative.  Non-finite inputs are squashed first.
    """
    y = np.nan_to_num(np.asarray(y, float), nan=0.0, posinf=1.0, neginf=0.0)
    y = np.maximum(y, 0.0)
    K = y.shape[-1]
    out = np.empty_like(y)
    used = np.zeros(y.shape[:-1])
    for i in range(K):
        margin = inner_margin if i < K - 1 else 0.0
        cap = np.maximum(1.0 - margin - used, 0.0)
        out[..., i] = np.minimum(y[..., i], cap)
        used = used + out[..., i]
    return out


def _float_parts(coeffs):
    return (
        np.asarray(coeffs.b, float),
        np.asarray(coeffs.S, float),
        np.asarray(coeffs.kappa, float),
        np.asarray(coeffs.c, float),
    )


def _geometry(y, check):
    """Remainders and scaling factors with a shared singular-face check."""
    rem = simplex.remainders(y, check=check)
    K = y.shape[-1]
    if check and K > 1 and np.any(rem[..., : K - 1] <= simplex.EPS_GEO):
        raise simplex.SingularFaceError(
            "point touches a singular face R_j = 0 with j < K"
        )
    U = simplex.scaling_factors(rem, check=False)
    return rem, U


def drift(coeffs, y, *, check=True):
    """Drift vector at points y, shape (..., K).

    On faces where Y_i = 0 or R_K = 0 the coupling term is taken as its
    limit, zero, even though individual 1/R_j factors may diverge.
    """
    b, S, kappa, c = _float_parts(coeffs)
    y = np.asarray(y, float)
    K = y.shape[-1]
    if K != coeffs.K:
        raise ValueError("point dimension does not match coefficient length")
    rem, U = _geometry(y, check)
    remK = rem[..., -1:]
    with np.errstate(divide="ignore", invalid="ignore"):
        base = b * (S * remK - (1 - S) * y)
        if K > 1:
            inv = 1.0 / rem[..., : K - 1]
            csum = np.zeros_like(y)
            for j in range(K - 1):
                csum[..., : j + 1] += c[: j + 1, j] * inv[..., j : j + 1]
            coupling = y * remK * csum
            coupling = np.where((y == 0) | (remK == 0), 0.0, coupling)
        else:
            coupling = 0.0
        a = 0.5 * U * (base + coupling)
    return a


def diffusion_diag(coeffs, y, *, check=True):
    """Diagonal of the diffusion matrix, B_ii = kappa_i Y_i R_K U_i.

    Vanishes in the limit whenever Y_i = 0 or R_K = 0, also on points
    where some U_i diverges.
    """
    _, _, kappa, _ = _float_parts(coeffs)
    y = np.asarray(y, float)
    if y.shape[-1] != coeffs.K:
        raise ValueError("point dimension does not match coefficient length")
    rem, U = _geometry(y, check)
    remK = rem[..., -1:]
    with np.errstate(invalid="ignore"):
        B = kappa * y * remK * U
        B = np.where((y == 0) | (remK == 0), 0.0, B)
    return np.maximum(B, 0.0)


def diffusion_diag_derivative(coeffs, y, *, check=True):
    """Own-coordinate derivatives d B_ii / d Y_i at interior points."""
    _, _, kappa, _ = _float_parts(coeffs)
    y = np.asarray(y, float)
    K = y.shape[-1]
    rem, U = _geometry(y, check)
    remK = rem[..., -1:]
    if K > 1:
        inv = 1.0 / rem[..., : K - 1]
        tail = np.zeros_like(y)
        # tail_i = sum_{m=i}^{K-2} 1/R_m (zero for the last component)
        tail[..., : K - 1] = np.cumsum(inv[..., ::-1], axis=-1)[..., ::-1]
    else:
        tail = np.zeros_like(y)
    return kappa * U * (remK - y) + kappa * y * remK * U * tail


def potential_gradient(params, y, *, check=True):
    """Gradient of the log stationary density at interior points.

    Component j:  (alpha_j - 1)/Y_j - sum_{i>=j} gamma_i / R_i.
    """
    alpha = np.asarray(params.alpha, float)
    gamma = np.asarray(params.gamma, float)
    y = np.asarray(y, float)
    if y.shape[-1] != params.K:
        raise ValueError("point dimension does not match parameter length")
    rem = simplex.remainders(y, check=check)
    if check and (np.any(y <= simplex.EPS_GEO) or np.any(rem <= simplex.EPS_GEO)):
        raise simplex.DomainError("gradient requires strictly interior points")
    tail = np.cumsum((gamma / rem)[..., ::-1], axis=-1)[..., ::-1]
    return (alpha - 1) / y - tail


def potential_residual(coeffs, y, params=None, *, check=True):
    """Stationarity defect of the kernel against a target law.

    Component j:  d(log density)/dY_j - (2 a_j - d B_jj/dY_j) / B_jj.

    With ``params`` omitted the target is the law implied by the
    coefficients themselves and the residual vanishes identically for any
    valid set; passing explicit parameters probes whether a (possibly
    corrupted) kernel still balances that law.
    """
    if params is None:
        params = sde_to_distribution(coeffs)
    grad = potential_gradient(params, y, check=check)
    a = drift(coeffs, y, check=check)
    B = diffusion_diag(coeffs, y, check=check)
    dB = diffusion_diag_derivative(coeffs, y, check=check)
    return grad - (2 * a - dB) / B


@dataclass(frozen=True)
class IntegratorConfig:
    """Time grid, ensemble size, and boundary policy of one run."""

    dt: float
    t_end: float
    particles: int
    seed: int
    boundary_retries: int = 10
    record_stride: int = 1

    def __post_init__(self):
        if not self.dt >= 0:
            raise ValueError("dt must be non-negative")
        if not self.t_end >= 0:
            raise ValueError("t_end must be non-negative")
        if self.dt == 0 and self.t_end > 0:
            raise ValueError("t_end > 0 requires a positive dt")
        if self.particles < 1:
            raise ValueError("need at least one particle")
        if self.boundary_retries < 0:
            raise ValueError("boundary_retries must be non-negative")
        if self.record_stride < 1:
            raise ValueError("record_stride must be at least one")
        CounterRng(self.seed)

    @property
    def n_steps(self):
        if self.dt == 0:
            return 0
        return int(round(self.t_end / self.dt))


@dataclass(frozen=True)
class EnsembleState:
    """Particle positions at one time, plus the step they belong to."""

    y: np.ndarray
    t: float
    step_index: int


@dataclass
class Diagnostics:
    """Counters describing how hard the boundary policy had to work."""

    particle_steps: int = 0
    redrawn: int = 0
    redraw_rounds: int = 0
    clamped: int = 0
    max_unit_sum_error: float = 0.0
    out_of_bounds: int = 0

    @property
    def clamped_fraction(self):
        if self.particle_steps == 0:
            return 0.0
        return self.clamped / self.particle_steps

    def as_dict(self):
        return {
            "particle_steps": self.particle_steps,
            "redrawn": self.redrawn,
            "redraw_rounds": self.redraw_rounds,
            "clamped": self.clamped,
            "clamped_fraction": self.clamped_fraction,
            "max_unit_sum_error": self.max_unit_sum_error,
            "out_of_bounds": self.out_of_bounds,
        }


@dataclass(frozen=True)
class PointInit:
    """Start every particle from one fixed point."""

    y: np.ndarray

    def __post_init__(self):
        y = np.asarray(self.y, float)
        simplex.validate_points(y)
        object.__setattr__(self, "y", y)


@dataclass(frozen=True)
class ExactSampleInit:
    """Draw the initial ensemble from a target law (default: the invariant)."""

    params: object = None


class GenDirProcess:
    """Generalized Dirichlet kernel bound to one validated coefficient set."""

    diagonal_noise = True

    def __init__(self, coeffs):
        validate(coeffs)
        self.coeffs = coeffs
        self.params = sde_to_distribution(coeffs)
        self.dim = coeffs.K
        self.noise_dim = coeffs.K
        self._b, self._S, self._kappa, self._c = _float_parts(coeffs)

    def drift_and_noise(self, y):
        return (
            drift(self.coeffs, y, check=False),
            diffusion_diag(self.coeffs, y, check=False),
        )

    def admissible(self, y):
        """Closed-simplex membership, exact signs, no tolerance."""
        rem = 1 - np.cumsum(y, axis=-1)
        ok = np.isfinite(y).all(axis=-1)
        ok &= (y >= 0).all(axis=-1)
        ok &= (rem >= 0).all(axis=-1)
        return ok

    def clamp(self, y):
        """Project into the simplex keeping EPS_BND off the singular faces."""
        return project_ensemble(y, inner_margin=EPS_BND)

    def full_state(self, y):
        """Composition including the dependent last component."""
        return np.concatenate([y, 1 - np.sum(y, axis=-1, keepdims=True)], axis=-1)

    def initial_sample_params(self):
        return self.params


class EnsembleStepper:
    """Euler-Maruyama stepper with counter-addressed Wiener increments."""

    def __init__(self, process, config, *, threads=1, diagnostics=None):
        self.process = process
        self.config = config
        self.threads = max(1, int(threads))
        self.diagnostics = diagnostics if diagnostics is not None else Diagnostics()
        self.rng = CounterRng(config.seed)
        self._sqrt_dt = math.sqrt(config.dt)

    def _normals(self, stream, word_start, n, m):
        z = self.rng.normals(stream, word_start, n * m)
        return z.reshape(n, m) * self._sqrt_dt

    def _apply_noise(self, base, noise, dW):
        if self.process.diagonal_noise:
            return base + np.sqrt(noise) * dW
        return base + np.einsum("pij,pj->pi", noise, dW)

    def _step_slice(self, y, lo, step_index):
        cfg = self.config
        proc = self.process
        n = y.shape[0]
        m = proc.noise_dim
        particles = cfg.particles
        a, noise = proc.drift_and_noise(y)
        with np.errstate(invalid="ignore", over="ignore"):
            base = y + a * cfg.dt
            dW = self._normals(
                STREAM_WIENER, (step_index * particles + lo) * m, n, m
            )
            prop = self._apply_noise(base, noise, dW)
            ok = proc.admissible(prop)
            bad = ~ok
            n_bad = int(bad.sum())
            if n_bad:
                self.diagnostics.redrawn += n_bad
                retries = cfg.boundary_retries
                for r in range(retries):
                    if not bad.any():
                        break
                    self.diagnostics.redraw_rounds += 1
                    word = ((step_index * retries + r) * particles + lo) * m
                    dW_r = self._normals(STREAM_RETRY, word, n, m)
                    idx = np.nonzero(bad)[0]
                    redone = self._apply_noise(base[idx], noise[idx], dW_r[idx])
                    prop[idx] = redone
                    bad[idx] = ~proc.admissible(redone)
                if bad.any():
                    idx = np.nonzero(bad)[0]
                    prop[idx] = proc.clamp(prop[idx])
                    self.diagnostics.clamped += int(bad.sum())
        return prop

    def step(self, state):
        """Advance the whole ensemble by one time step."""
        cfg = self.config
        y = state.y
        P = y.shape[0]
        self.diagnostics.particle_steps += P
        if self.threads == 1 or P < 2 * self.threads:
            new_y = self._step_slice(y, 0, state.step_index)
        else:
            chunk = -(-P // self.threads)
            bounds = [(lo, min(lo + chunk, P)) for lo in range(0, P, chunk)]
            new_y = np.empty_like(y)
            with ThreadPoolExecutor(max_workers=self.threads) as pool:
                futures = [
                    (lo, hi, pool.submit(self._step_slice, y[lo:hi], lo, state.step_index))
                    for lo, hi in bounds
                ]
                for lo, hi, fut in futures:
                    new_y[lo:hi] = fut.result()
        t_next = (state.step_index + 1) * cfg.dt
        return EnsembleState(new_y, t_next, state.step_index + 1)


def em_step(coeffs, state, config, *, threads=1):
    """One Euler-Maruyama step of the generalized Dirichlet ensemble.

    Uses the same absolute Wiener addressing as ``simulate``, so stepping
    manually from the same state reproduces the full run.
    """
    process = GenDirProcess(coeffs)
    stepper = EnsembleStepper(process, config, threads=threads)
    if config.dt == 0:
        return EnsembleState(state.y.copy(), state.t, state.step_index)
    return stepper.step(state)


def _initial_ensemble(process, config, init):
    P = config.particles
    if isinstance(init, PointInit):
        y0 = np.asarray(init.y, float)
        if y0.shape != (process.dim,):
            raise ValueError("initial point dimension does not match the process")
        return np.tile(y0, (P, 1))
    if isinstance(init, ExactSampleInit):
        params = init.params
        if params is None:
            getter = getattr(process, "initial_sample_params", None)
            params = getter() if getter is not None else None
        if params is None:
            raise ValueError("process has no default law to sample the ensemble from")
        return sample_gendir(params, P, config.seed, stream=STREAM_INIT)
    raise TypeError("init must be PointInit or ExactSampleInit")


def _record(series, process, state, diagnostics):
    full = process.full_state(state.y)
    if not np.isfinite(full).all():
        raise SimulationAbort(f"non-finite ensemble values at t={state.t}")
    err = float(np.max(np.abs(full.sum(axis=-1) - 1.0)))
    if err > diagnostics.max_unit_sum_error:
        diagnostics.max_unit_sum_error = err
    diagnostics.out_of_bounds += int(((full < 0) | (full > 1)).sum())
    series.append(finalize(ensemble_moments(full), t=state.t))


def simulate(coeffs, config, init, *, threads=1, process=None):
    """Integrate an ensemble and record moment snapshots.

    Parameters
    ----------
    coeffs : SdeCoefficients or None
        Generalized Dirichlet coefficients; ignored when ``process`` is
        given explicitly.
    config : IntegratorConfig
    init : PointInit or ExactSampleInit
    threads : int
        Worker threads; the result is independent of this value.
    process : optional
        Alternative process object with the same stepping interface.

    Returns
    -------
    (MomentTimeSeries, EnsembleState, Diagnostics)
    """
    if process is None:
        process = GenDirProcess(coeffs)
    diagnostics = Diagnostics()
    stepper = EnsembleStepper(
        process, config, threads=threads, diagnostics=diagnostics
    )
    y0 = _initial_ensemble(process, config, init)
    state = EnsembleState(y0, 0.0, 0)
    series = MomentTimeSeries()
    _record(series, process, state, diagnostics)
    n_steps = config.n_steps
    for _ in range(n_steps):
        state = stepper.step(state)
        if (
            state.step_index % config.record_stride == 0
            or state.step_index == n_steps
        ):
            _record(series, process, state, diagnostics)
    return series, state, diagnostics
