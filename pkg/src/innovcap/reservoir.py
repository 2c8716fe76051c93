"""Reference reservoirs: a series RLC circuit and a Duffing oscillator read out in I/Q.

Both simulators are pure functions of (configuration, input, seed). Trial
ensembles share one input waveform and draw independent noise with per-trial
seeds ``seed + 1, ..., seed + K``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numba
import numpy as np
import scipy.linalg
import scipy.signal

from . import spectral
from .errors import DivergedTrajectory, InvalidInput, UnstableSystem

DIVERGENCE_LIMIT = 1e6


# ---------------------------------------------------------------------------
# data types


@dataclass(frozen=True)
class LinearStateSpace:
    """``dx = (A x + B_s u) dt + B_n dW``, readout ``X = C x``."""

    A: np.ndarray
    B_s: np.ndarray
    B_n: np.ndarray
    C: np.ndarray

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        n = A.shape[0]
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B_s", np.asarray(self.B_s, dtype=float).reshape(n))
        object.__setattr__(self, "B_n", np.asarray(self.B_n, dtype=float).reshape(n))
        object.__setattr__(self, "C", np.atleast_2d(np.asarray(self.C, dtype=float)))
        if A.shape != (n, n) or self.C.shape[1] != n:
            raise InvalidInput("inconsistent state-space dimensions")
        if np.max(np.linalg.eigvals(A).real) >= 0:
            raise UnstableSystem("drift matrix is not Hurwitz")

    @property
    def n_states(self) -> int:
        return self.A.shape[0]

    @property
    def d(self) -> int:
        return self.C.shape[0]

    @property
    def slowest_rate(self) -> float:
        """``|Re lambda|`` of the slowest mode."""
        return float(-np.max(np.linalg.eigvals(self.A).real))


@dataclass(frozen=True)
class RlcConfig:
    """Series RLC circuit; thermal noise intensity is ``gamma * T``.

    ``readout="voltage"`` reads the capacitor voltage ``q / C_cap`` (d=1);
    ``readout="state"`` reads ``(q / C_cap, i)`` (d=2).
    """

    R: float = 2.0
    L_ind: float = 1.0
    C_cap: float = 1.0
    alpha_s: float = 1.0
    alpha_n: float = 1.0
    gamma: float = 1.0
    T: float = 1.0
    readout: str = "voltage"

    def __post_init__(self):
        for name in ("R", "L_ind", "C_cap"):
            if not getattr(self, name) > 0:
                raise InvalidInput(f"{name} must be positive")
        for name in ("alpha_s", "alpha_n", "gamma", "T"):
            if getattr(self, name) < 0:
                raise InvalidInput(f"{name} must be nonnegative")
        if self.readout not in ("voltage", "state"):
            raise InvalidInput(f"unknown readout {self.readout!r}")

    @property
    def noise_intensity(self) -> float:
        return self.gamma * self.T


@dataclass(frozen=True)
class DuffingConfig:
    """Damped Duffing oscillator driven on a carrier, integrated on a raw grid.

    The input sequence ``u`` is held for ``hold`` raw steps per sample, so one
    readout sample is produced per input sample. ``burn_in`` counts input
    samples discarded from the start.
    """

    delta: float = 0.1
    alpha: float = 1.21
    beta: float = 0.0
    omega: float = 1.0
    Omega_lpf: float = 0.1
    alpha_s: float = 0.1
    alpha_n: float = 0.05
    T: float = 1.0
    dt: float = 2 * math.pi / 40
    hold: int = 40
    burn_in: int = 20

    def __post_init__(self):
        if not (self.delta > 0 and self.omega > 0 and self.dt > 0 and self.Omega_lpf > 0):
            raise InvalidInput("delta, omega, dt and Omega_lpf must be positive")
        if self.T < 0:
            raise InvalidInput("temperature must be nonnegative")
        if self.Omega_lpf > self.omega / 10 * (1 + 1e-12):
            raise InvalidInput("low-pass cutoff must satisfy Omega_lpf <= omega / 10")
        if self.dt > 2 * math.pi / (40 * self.omega) * (1 + 1e-12):
            raise InvalidInput("dt must resolve the carrier: dt <= 2 pi / (40 omega)")
        if self.hold < 1 or self.burn_in < 0:
            raise InvalidInput("hold must be >= 1 and burn_in >= 0")

    @property
    def sample_interval(self) -> float:
        return self.hold * self.dt


@dataclass
class ReadoutSeries:
    """``n x d`` readout samples.

    ``t0`` is the index of the first row on the input's time axis, so row ``k``
    is paired with input sample ``t0 + k``.
    """

    data: np.ndarray
    dt_sample: float
    t0: int = 0
    centered: bool = False

    def __post_init__(self):
        data = np.asarray(self.data, dtype=float)
        if data.ndim == 1:
            data = data[:, None]
        if not np.all(np.isfinite(data)):
            raise InvalidInput("readout series must be finite")
        self.data = data

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def d(self) -> int:
        return self.data.shape[1]

    @property
    def times(self) -> np.ndarray:
        return (self.t0 + np.arange(self.n)) * self.dt_sample

    def center(self) -> "ReadoutSeries":
        if self.centered:
            return self
        return ReadoutSeries(self.data - self.data.mean(axis=0), self.dt_sample, self.t0, True)


@dataclass
class TrialEnsemble:
    """``K`` readouts generated from one input waveform with independent noise."""

    input: np.ndarray
    trials: list[ReadoutSeries]
    seeds: list[int] = field(default_factory=list)

    def __post_init__(self):
        shapes = {(tr.n, tr.d, tr.dt_sample, tr.t0) for tr in self.trials}
        if len(shapes) > 1:
            raise InvalidInput("ragged trial ensemble")

    @property
    def K(self) -> int:
        return len(self.trials)

    def stacked(self) -> np.ndarray:
        return np.stack([tr.data for tr in self.trials])


# ---------------------------------------------------------------------------
# linear systems


def rlc_state_space(cfg: RlcConfig) -> LinearStateSpace:
    """State ``(q, i)``; input and thermal source enter the inductor equation."""
    R, L, Cc = cfg.R, cfg.L_ind, cfg.C_cap
    A = np.array([[0.0, 1.0], [-1.0 / (L * Cc), -R / L]])
    B_s = np.array([0.0, cfg.alpha_s / L])
    B_n = np.array([0.0, cfg.alpha_n / L])
    C = np.array([[1.0 / Cc, 0.0]]) if cfg.readout == "voltage" else np.array([[1.0 / Cc, 0.0], [0.0, 1.0]])
    return LinearStateSpace(A, B_s, B_n, C)


def discretize(ss: LinearStateSpace, dt: float, noise_intensity: float):
    """Exact zero-order-hold discretization.

    Returns ``(Phi, Gamma, Qd)``: state transition, input gain and the noise
    covariance accumulated over one step (Van Loan block exponential).
    """
    if not dt > 0:
        raise InvalidInput("dt must be positive")
    n = ss.n_states
    M = np.zeros((n + 1, n + 1))
    M[:n, :n] = ss.A
    M[:n, n] = ss.B_s
    E = scipy.linalg.expm(M * dt)
    Phi, Gamma = E[:n, :n], E[:n, n]
    Qc = noise_intensity * np.outer(ss.B_n, ss.B_n)
    V = np.zeros((2 * n, 2 * n))
    V[:n, :n] = -ss.A
    V[:n, n:] = Qc
    V[n:, n:] = ss.A.T
    F = scipy.linalg.expm(V * dt)
    Qd = spectral.symmetrize(F[n:, n:].T @ F[:n, n:])
    return Phi, Gamma, Qd


@numba.njit(cache=True, nogil=True)
def _linear_recursion(Phi, drive, noise, x0, out):
    # out[k] = x_k; x_{k+1} = Phi x_k + drive_k + noise_k
    n, ns = drive.shape
    x = x0.copy()
    for k in range(n):
        for i in range(ns):
            out[k, i] = x[i]
        xn = np.empty(ns)
        for i in range(ns):
            acc = drive[k, i] + noise[k, i]
            for j in range(ns):
                acc += Phi[i, j] * x[j]
            xn[i] = acc
        x = xn


def default_burn_in(ss: LinearStateSpace, dt: float) -> int:
    """Ten time constants of the slowest mode, in samples."""
    return int(math.ceil(10.0 / (ss.slowest_rate * dt)))


def simulate_linear_batch(ss, u, noise_intensity, dt, seeds, burn_in=0, x0=None) -> np.ndarray:
    """Simulate several noise realizations with one input; returns ``(len(seeds), n - burn_in, d)``."""
    u = np.asarray(u, dtype=float).reshape(-1)
    if not np.all(np.isfinite(u)):
        raise InvalidInput("input must be finite")
    if noise_intensity < 0:
        raise InvalidInput("noise intensity must be nonnegative")
    Phi, Gamma, Qd = discretize(ss, dt, noise_intensity)
    Lq = spectral.psd_sqrt(Qd) if noise_intensity > 0 else np.zeros_like(Qd)
    ns = ss.n_states
    x0 = np.zeros(ns) if x0 is None else np.asarray(x0, dtype=float).reshape(ns)
    drive = np.ascontiguousarray(np.outer(u, Gamma))
    out = np.empty((len(seeds), u.size - burn_in, ss.d))
    states = np.empty((u.size, ns))
    for k, seed in enumerate(seeds):
        rng = np.random.default_rng(seed)
        noise = rng.standard_normal((u.size, ns)) @ Lq.T
        _linear_recursion(Phi, drive, np.ascontiguousarray(noise), x0, states)
        out[k] = states[burn_in:] @ ss.C.T
    return out


def simulate_linear(
    ss: LinearStateSpace,
    u,
    noise_intensity: float,
    dt: float,
    seed: int,
    burn_in: int = 0,
    x0=None,
) -> ReadoutSeries:
    """Exact-discretization simulation of a linear SDE driven by a ZOH input.

    ``X_k = C x_k`` with ``x_{k+1} = e^{A dt} x_k + Gamma u_k + w_k``, so ``u_k``
    first affects ``X_{k+1}``. The first ``burn_in`` samples are dropped.
    """
    if not dt > 0:
        raise InvalidInput("dt must be positive")
    data = simulate_linear_batch(ss, u, noise_intensity, dt, [seed], burn_in, x0)[0]
    return ReadoutSeries(data, dt, t0=burn_in)


@dataclass(frozen=True)
class CovarianceSplit:
    """``Sigma = S + N`` with all three PSD."""

    Sigma: np.ndarray
    S: np.ndarray
    N: np.ndarray
    rel_tol: float = spectral.REL_TOL

    def __post_init__(self):
        for name in ("Sigma", "S", "N"):
            object.__setattr__(self, name, spectral.symmetrize(getattr(self, name)))
        scale = max(1.0, np.linalg.norm(self.Sigma))
        if np.linalg.norm(self.Sigma - self.S - self.N) > 1e-10 * scale:
            raise InvalidInput("Sigma must equal S + N")
        for name in ("S", "N"):
            spectral.rank_info(getattr(self, name), self.rel_tol)

    @classmethod
    def from_parts(cls, S, N, rel_tol: float = spectral.REL_TOL) -> "CovarianceSplit":
        S = spectral.symmetrize(S)
        N = spectral.symmetrize(N)
        return cls(S + N, S, N, rel_tol)

    @property
    def rank(self) -> spectral.RankInfo:
        return spectral.rank_info(self.Sigma, self.rel_tol)

    @property
    def d(self) -> int:
        return self.Sigma.shape[0]


def steady_state_split(ss: LinearStateSpace, input_spectral_density: float, noise_intensity: float) -> CovarianceSplit:
    """Stationary readout covariance split for white input and white thermal noise."""
    if input_spectral_density < 0 or noise_intensity < 0:
        raise InvalidInput("spectral densities must be nonnegative")
    Ps = spectral.lyapunov_solve(ss.A, input_spectral_density * np.outer(ss.B_s, ss.B_s))
    Pn = spectral.lyapunov_solve(ss.A, noise_intensity * np.outer(ss.B_n, ss.B_n))
    return CovarianceSplit.from_parts(ss.C @ Ps @ ss.C.T, ss.C @ Pn @ ss.C.T)


# ---------------------------------------------------------------------------
# Duffing oscillator


@numba.njit(cache=True, nogil=True)
def _duffing_kernel(delta, alpha, beta, dt, drive, kicks, limit, out):
    # velocity Verlet with the damping term of the closing half step taken
    # implicitly (second order); the thermal kick enters once per step.
    # out[k] is the position after step k
    x = 0.0
    v = 0.0
    n = drive.size
    a = drive[0]
    damp = 1.0 / (1.0 + 0.5 * dt * delta)
    for k in range(n):
        vh = v + 0.5 * dt * a
        x = x + dt * vh
        f = (drive[k + 1] if k + 1 < n else drive[k]) - alpha * x - beta * x * x * x
        v = (vh + 0.5 * dt * f) * damp + kicks[k]
        a = f - delta * v
        if not abs(x) <= limit:
            return k
        out[k] = x
    return -1


def carrier_drive(cfg: DuffingConfig, u) -> np.ndarray:
    """``alpha_s * u(t) * cos(omega t)`` on the raw grid, ``u`` held for ``cfg.hold`` steps."""
    u = np.asarray(u, dtype=float).reshape(-1)
    t = np.arange(u.size * cfg.hold) * cfg.dt
    return cfg.alpha_s * np.repeat(u, cfg.hold) * np.cos(cfg.omega * t)


def simulate_duffing(cfg: DuffingConfig, u, seed: int, drive=None) -> ReadoutSeries:
    """Raw displacement of the driven Duffing oscillator.

    Noise enters the velocity equation as ``alpha_n sqrt(T) dW`` with unit
    intensity. Returns a one-column series on the raw grid whose ``t0`` is the
    raw index of the first retained step (``burn_in * hold``).

    Raises DivergedTrajectory when ``|x|`` exceeds 1e6.
    """
    u = np.asarray(u, dtype=float).reshape(-1)
    if not np.all(np.isfinite(u)):
        raise InvalidInput("input must be finite")
    if u.size <= cfg.burn_in:
        raise InvalidInput("input is shorter than the burn-in")
    if drive is None:
        drive = carrier_drive(cfg, u)
    n_raw = drive.size
    if cfg.T > 0 and cfg.alpha_n != 0:
        rng = np.random.default_rng(seed)
        kicks = rng.standard_normal(n_raw) * (cfg.alpha_n * math.sqrt(cfg.T * cfg.dt))
    else:
        kicks = np.zeros(n_raw)
    out = np.empty(n_raw)
    with np.errstate(over="ignore", invalid="ignore"):
        bad = _duffing_kernel(cfg.delta, cfg.alpha, cfg.beta, cfg.dt, drive, kicks, DIVERGENCE_LIMIT, out)
    if bad >= 0:
        raise DivergedTrajectory(f"|x| exceeded {DIVERGENCE_LIMIT:g} at raw step {bad} (beta={cfg.beta}, T={cfg.T})")
    start = cfg.burn_in * cfg.hold
    return ReadoutSeries(out[start:], cfg.dt, t0=start)


def lowpass_taps(Omega_lpf: float, dt: float) -> np.ndarray:
    """Hamming-windowed sinc, unit DC gain, transition band no wider than ``Omega_lpf / 2``."""
    nyquist = math.pi / dt
    if not 0 < Omega_lpf < nyquist:
        raise InvalidInput("cutoff must lie strictly between 0 and the Nyquist frequency")
    fs = 1.0 / dt
    # Hamming transition width ~ 3.3 fs / numtaps (Hz)
    width_hz = Omega_lpf / 2 / (2 * math.pi)
    numtaps = int(math.ceil(3.3 * fs / width_hz)) | 1
    return scipy.signal.firwin(numtaps, Omega_lpf / (2 * math.pi), window="hamming", fs=fs)


def demodulate_lpf(y, omega: float, Omega_lpf: float, dt: float | None = None) -> ReadoutSeries:
    """Complex baseband envelope ``A = 2 LPF(y e^{-i omega t})`` as columns ``(Re A, Im A)``.

    The FIR group delay is removed, so row ``k`` of the output refers to the same
    instant as ``y[k]``. The first and last ``len(taps) // 2`` rows are filter
    transients.
    """
    if isinstance(y, ReadoutSeries):
        dt = y.dt_sample if dt is None else dt
        t0 = y.t0
        y = y.data[:, 0]
    else:
        t0 = 0
        y = np.asarray(y, dtype=float).reshape(-1)
    if dt is None or not dt > 0:
        raise InvalidInput("dt must be positive")
    taps = lowpass_taps(Omega_lpf, dt)
    t = (t0 + np.arange(y.size)) * dt
    z = y * np.exp(-1j * omega * t)
    A = 2.0 * scipy.signal.oaconvolve(z, taps, mode="same")
    return ReadoutSeries(np.column_stack([A.real, A.imag]), dt, t0=t0)


def sample_envelope(env: ReadoutSeries, hold: int, edge: int = 0) -> ReadoutSeries:
    """Pick one envelope row per input sample (the last raw step of each hold interval).

    ``edge`` input samples are dropped at both ends to discard filter transients.
    """
    if env.t0 % hold:
        raise InvalidInput("raw series must start on an input-sample boundary")
    first = env.t0 // hold
    n_in = env.n // hold
    idx = np.arange(n_in) * hold + hold - 1
    data = env.data[idx]
    if edge:
        data = data[edge:n_in - edge]
    return ReadoutSeries(data, env.dt_sample * hold, t0=first + edge)


@numba.njit(cache=True, nogil=True)
def _sampled_demod(y, cos_t, sin_t, taps, rows, out):
    # "same"-mode convolution of y e^{-i omega t} with taps, evaluated at rows only
    half = taps.size // 2
    n = y.size
    for r in range(rows.size):
        i = rows[r]
        re = 0.0
        im = 0.0
        for m in range(taps.size):
            j = i + half - m
            if 0 <= j < n:
                w = taps[m] * y[j]
                re += w * cos_t[j]
                im -= w * sin_t[j]
        out[r, 0] = 2.0 * re
        out[r, 1] = 2.0 * im


def demodulate_sampled(y: ReadoutSeries, omega: float, Omega_lpf: float, rows, carrier=None) -> np.ndarray:
    """Rows ``rows`` of :func:`demodulate_lpf` without filtering the whole series.

    ``carrier`` may supply precomputed ``(cos(omega t), sin(omega t))`` on the
    raw grid of ``y``.
    """
    taps = lowpass_taps(Omega_lpf, y.dt_sample)
    if carrier is None:
        t = (y.t0 + np.arange(y.n)) * y.dt_sample
        carrier = (np.cos(omega * t), np.sin(omega * t))
    rows = np.asarray(rows, dtype=np.int64)
    out = np.empty((rows.size, 2))
    _sampled_demod(np.ascontiguousarray(y.data[:, 0]), carrier[0], carrier[1], taps, rows, out)
    return out


def filter_edge_samples(cfg: DuffingConfig) -> int:
    """Input samples at each end that overlap the low-pass transient."""
    taps = lowpass_taps(cfg.Omega_lpf, cfg.dt)
    return int(math.ceil((taps.size // 2) / cfg.hold))


def _readout_rows(cfg: DuffingConfig, n_raw: int) -> np.ndarray:
    edge = filter_edge_samples(cfg)
    n_in = n_raw // cfg.hold
    return np.arange(edge, n_in - edge) * cfg.hold + cfg.hold - 1


def _carrier(cfg: DuffingConfig, n_inputs: int):
    start = cfg.burn_in * cfg.hold
    t = (start + np.arange((n_inputs - cfg.burn_in) * cfg.hold)) * cfg.dt
    return np.cos(cfg.omega * t), np.sin(cfg.omega * t)


def duffing_readout(cfg: DuffingConfig, u, seed: int, drive=None, carrier=None) -> ReadoutSeries:
    """Simulate, demodulate and sample one trial; rows are indexed by input sample.

    Equivalent to ``sample_envelope(demodulate_lpf(simulate_duffing(...)), hold, edge)``
    with ``edge = filter_edge_samples(cfg)``, evaluated only at the kept rows.
    """
    raw = simulate_duffing(cfg, u, seed, drive)
    if carrier is None:
        carrier = _carrier(cfg, np.asarray(u).size)
    data = demodulate_sampled(raw, cfg.omega, cfg.Omega_lpf, _readout_rows(cfg, raw.n), carrier)
    return ReadoutSeries(data, cfg.sample_interval, t0=cfg.burn_in + filter_edge_samples(cfg))


@dataclass(frozen=True)
class EnvelopeParams:
    Delta: float
    mu: float
    kappa: float


def duffing_envelope_params(cfg: DuffingConfig, drive_detuning: float) -> EnvelopeParams:
    """Slow-envelope coefficients: detuning, ``mu = 3 beta / (8 omega)``, ``kappa = alpha_s / (2 omega)``."""
    return EnvelopeParams(drive_detuning, 3.0 * cfg.beta / (8.0 * cfg.omega), cfg.alpha_s / (2.0 * cfg.omega))


# ---------------------------------------------------------------------------
# ensembles


def _trial_seeds(seed: int, K: int) -> list[int]:
    return [seed + k for k in range(1, K + 1)]


def _linear_system(system, noise_intensity):
    if isinstance(system, RlcConfig):
        return rlc_state_space(system), system.noise_intensity if noise_intensity is None else noise_intensity
    if noise_intensity is None:
        raise InvalidInput("noise_intensity is required for a bare LinearStateSpace")
    return system, noise_intensity


def simulate_trials(system, u, seeds, *, dt=None, noise_intensity=None, burn_in=None) -> np.ndarray:
    """Readouts for the given noise seeds as a ``(len(seeds), n, d)`` array."""
    if isinstance(system, DuffingConfig):
        drive = carrier_drive(system, u)
        carrier = _carrier(system, np.asarray(u).size)
        return np.stack([duffing_readout(system, u, s, drive, carrier).data for s in seeds])
    ss, q = _linear_system(system, noise_intensity)
    if dt is None:
        raise InvalidInput("dt is required for linear systems")
    if burn_in is None:
        burn_in = default_burn_in(ss, dt)
    return simulate_linear_batch(ss, u, q, dt, seeds, burn_in)


def readout_geometry(system, u, *, dt=None, burn_in=None) -> tuple[int, float]:
    """``(t0, dt_sample)`` of the readout rows a simulation of ``system`` produces."""
    if isinstance(system, DuffingConfig):
        return system.burn_in + filter_edge_samples(system), system.sample_interval
    ss, _ = _linear_system(system, 0.0)
    return (default_burn_in(ss, dt) if burn_in is None else burn_in), dt


def run_trial_ensemble(system, u, K: int, seed: int, *, dt=None, noise_intensity=None, burn_in=None) -> TrialEnsemble:
    """K simulations with a shared input and noise seeds ``seed+1 .. seed+K``.

    ``system`` is a DuffingConfig, an RlcConfig, or a LinearStateSpace (the
    latter two need ``dt``; a bare state space also needs ``noise_intensity``).
    """
    if K < 2:
        raise InvalidInput("an ensemble needs K >= 2 trials")
    seeds = _trial_seeds(seed, K)
    data = simulate_trials(system, u, seeds, dt=dt, noise_intensity=noise_intensity, burn_in=burn_in)
    t0, dt_s = readout_geometry(system, u, dt=dt, burn_in=burn_in)
    trials = [ReadoutSeries(x, dt_s, t0=t0) for x in data]
    return TrialEnsemble(np.asarray(u, dtype=float), trials, seeds)


def with_temperature(system, T: float):
    return replace(system, T=T)
