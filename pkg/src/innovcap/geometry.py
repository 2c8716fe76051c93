"""Closed-form capacity geometry of a covariance split ``Sigma = S + N``.

Capacities from traces and from the temperature pencil, whitened ellipsoids,
the tau-innovation subspace, block-Toeplitz covariance floors, entropy and
covering bounds, cascade calculators, and the Duffing covariance fit.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.special import gammaln

from . import spectral
from .errors import InsufficientData, InvalidInput, PreconditionFailed
from .reservoir import CovarianceSplit

__all__ = [
    "CovarianceSplit",
    "PencilSpectrum",
    "WhitenedGeometry",
    "TauSubspace",
    "CascadeParams",
    "capacity_traces",
    "pencil_spectrum",
    "shrinkage_capacities",
    "whitened_geometry",
    "tau_subspace",
    "tau_bounds_exact",
    "block_covariance",
    "block_floor_check",
    "ar1_autocovs",
    "mixing_cov_bound",
    "isotropic_entropy_bound",
    "gaussian_entropy",
    "log_unit_ball_volume",
    "covering_bound",
    "binary_entropy",
    "f_k",
    "cascade_sensitivity",
    "cascade_entropy_floor",
    "duffing_covfit",
]


# ---------------------------------------------------------------------------
# capacities


def capacity_traces(split: CovarianceSplit) -> tuple[float, float]:
    """``(Tr(S Sigma^+), Tr(N Sigma^+))``; the two add up to ``rank Sigma``."""
    Sp = spectral.pinv(split.Sigma, split.rel_tol)
    return float(np.sum(split.S * Sp)), float(np.sum(split.N * Sp))


@dataclass(frozen=True)
class PencilSpectrum:
    """Finite eigenvalues of ``(N0, S)``; ``r`` is the rank of ``S + T N0`` for ``T > 0``."""

    lambdas: np.ndarray
    r: int
    r_S: int

    def __post_init__(self):
        lam = np.asarray(self.lambdas, dtype=float).reshape(-1)
        if np.any(lam < -1e-12):
            raise InvalidInput("pencil eigenvalues must be nonnegative")
        object.__setattr__(self, "lambdas", np.clip(lam, 0.0, None))
        if lam.size != self.r_S or not 0 <= self.r_S <= self.r:
            raise InvalidInput("need len(lambdas) = r_S <= r")


def pencil_spectrum(S, N0, rel_tol: float = spectral.REL_TOL) -> PencilSpectrum:
    lam = spectral.pencil_eig(N0, S, rel_tol)
    r = spectral.rank_info(spectral.symmetrize(S) + spectral.symmetrize(N0), rel_tol).rank
    return PencilSpectrum(lam, r, lam.size)


def shrinkage_capacities(spec: PencilSpectrum, T: float) -> tuple[float, float]:
    """Capacities of ``Sigma(T) = S + T N0`` from the pencil spectrum.

    ``C_ip = sum 1 / (1 + T lam)`` and ``C_i = (r - r_S) + sum T lam / (1 + T lam)``.
    At ``T = 0`` the split is ``Sigma = S``, so ``C_i = 0``.
    """
    if not T >= 0:
        raise InvalidInput("temperature must be nonnegative")
    lam = spec.lambdas
    if T == 0:
        return float(spec.r_S), 0.0
    c_ip = float(np.sum(1.0 / (1.0 + T * lam)))
    c_i = float(spec.r - spec.r_S + np.sum(T * lam / (1.0 + T * lam)))
    return c_ip, c_i


# ---------------------------------------------------------------------------
# whitened geometry


def log_unit_ball_volume(m: int) -> float:
    """``log Vol(B_1^m) = (m/2) log pi - log Gamma(m/2 + 1)``."""
    return 0.5 * m * math.log(math.pi) - float(gammaln(0.5 * m + 1.0))


@dataclass(frozen=True)
class WhitenedGeometry:
    """``Gamma = Sigma^{+/2} S Sigma^{+/2}`` expressed on range(Sigma).

    ``basis`` (d x r) has orthonormal columns spanning range(Sigma); ``Gamma``
    is r x r in that basis, with eigenpairs ``(gammas, eigenvectors)`` in
    descending order. Ellipsoid volumes are intrinsic (in their own span).
    """

    Gamma: np.ndarray
    gammas: np.ndarray
    eigenvectors: np.ndarray
    basis: np.ndarray
    whitening: np.ndarray
    C_ip: float
    C_i: float
    r: int
    pred_dim: int
    innov_dim: int
    pred_log_volume: float
    innov_log_volume: float

    @property
    def pred_volume(self) -> float:
        return math.exp(self.pred_log_volume)

    @property
    def innov_volume(self) -> float:
        return math.exp(self.innov_log_volume)

    @property
    def Gamma_full(self) -> np.ndarray:
        """``Gamma`` in the original d-dimensional coordinates."""
        return self.basis @ self.Gamma @ self.basis.T

    @property
    def complement_gammas(self) -> np.ndarray:
        """Eigenvalues of ``Pi - Gamma`` matched to ``eigenvectors``."""
        return 1.0 - self.gammas


def _ellipsoid_log_volume(axes2, tol):
    keep = axes2 > tol
    k = int(keep.sum())
    return k, log_unit_ball_volume(k) + 0.5 * float(np.sum(np.log(axes2[keep])))


def whitened_geometry(split: CovarianceSplit) -> WhitenedGeometry:
    eig, keep = spectral._psd_eig(split.Sigma, split.rel_tol)
    U = eig.eigenvectors[:, keep]
    w = eig.eigenvalues[keep]
    W = (U / np.sqrt(w)) @ U.T
    G = spectral.symmetrize((U.T @ W) @ split.S @ (W @ U))
    gam, V = np.linalg.eigh(G)
    gam, V = np.clip(gam[::-1], 0.0, 1.0), V[:, ::-1]
    r = U.shape[1]
    tol = 1e-10
    pdim, plv = _ellipsoid_log_volume(gam, tol)
    idim, ilv = _ellipsoid_log_volume(1.0 - gam, tol)
    c_ip = float(gam.sum())
    return WhitenedGeometry(G, gam, V, U, W, c_ip, float(r - c_ip), r, pdim, idim, plv, ilv)


@dataclass(frozen=True)
class TauSubspace:
    """Whitened directions whose innovation fraction ``1 - gamma_k`` is at least ``tau``.

    ``P_tau`` has orthonormal rows in the d-dimensional whitened coordinates;
    ``P_tau @ whitening`` maps a readout to its tau-innovation coordinates.
    """

    tau: float
    indices: np.ndarray
    L_tau: int
    P_tau: np.ndarray
    whitening: np.ndarray
    lower: float
    upper: float
    floor_min_eig: float

    @property
    def bounds(self) -> tuple[float, float]:
        return self.lower, self.upper


def tau_bounds_exact(C_i: float, r: int, tau: float) -> tuple[Fraction, Fraction]:
    """``max(0, (C_i - tau r) / (1 - tau))`` and ``C_i / tau`` in exact rational arithmetic.

    Evaluated on the binary values of the inputs, so e.g. ``C_i = r`` gives a
    lower bound of exactly ``r`` instead of ``r`` plus one ulp.
    """
    c, t = Fraction(C_i), Fraction(tau)
    return max(Fraction(0), (c - t * r) / (1 - t)), c / t


def tau_subspace(geom: WhitenedGeometry, tau: float) -> TauSubspace:
    if not 0 < tau < 1:
        raise InvalidInput("tau must lie in (0, 1)")
    idx = np.flatnonzero(1.0 - geom.gammas >= tau)
    P = (geom.basis @ geom.eigenvectors[:, idx]).T
    L = idx.size
    r = geom.r
    lo_q, up_q = tau_bounds_exact(geom.C_i, r, tau)
    if not lo_q <= L <= up_q:
        raise PreconditionFailed(f"L_tau={L} outside [{float(lo_q)}, {float(up_q)}]")
    lower, upper = float(lo_q), float(up_q)
    # floor on the selected directions, checked on the assembled matrix
    Pi = geom.basis @ geom.basis.T
    M = P @ (Pi - geom.Gamma_full) @ P.T
    floor = float(np.linalg.eigvalsh(spectral.symmetrize(M))[0]) if L else math.inf
    if floor < tau - 1e-10:
        raise PreconditionFailed(f"variance floor {floor} below tau={tau}")
    return TauSubspace(tau, idx, L, P, geom.whitening, lower, upper, floor)


# ---------------------------------------------------------------------------
# block covariances and mixing


def _lags(autocovs) -> list[np.ndarray]:
    out = [np.atleast_2d(np.asarray(K, dtype=float)) for K in autocovs]
    if not out:
        raise InvalidInput("need at least K_0")
    m = out[0].shape
    if m[0] != m[1] or any(K.shape != m for K in out):
        raise InvalidInput("autocovariance lags must be square and of equal size")
    if not all(np.all(np.isfinite(K)) for K in out):
        raise InvalidInput("autocovariances must be finite")
    return out


def block_covariance(autocovs, b: int) -> np.ndarray:
    """Covariance of ``[Y_{t-b+1}, ..., Y_t]`` from ``K_k = Cov(Y_t, Y_{t+k})``.

    Block ``(i, j)`` is ``K_{j-i}`` above the diagonal and ``K_{i-j}^T`` below;
    lags not supplied are zero.
    """
    K = _lags(autocovs)
    if b < 1:
        raise InvalidInput("block length must be >= 1")
    m = K[0].shape[0]
    K0 = spectral.symmetrize(K[0])
    out = np.zeros((b * m, b * m))
    for i in range(b):
        for j in range(b):
            k = abs(j - i)
            if k >= len(K):
                continue
            blk = K0 if k == 0 else (K[k] if j > i else K[k].T)
            out[i * m:(i + 1) * m, j * m:(j + 1) * m] = blk
    return out


@dataclass(frozen=True)
class BlockFloor:
    epsilon: float
    floor: float
    lambda_min: float
    holds: bool
    vacuous: bool


def block_floor_check(autocovs, b: int, tau: float) -> BlockFloor:
    """Compare ``lambda_min`` of the block covariance with ``tau - 2 eps``.

    ``eps`` sums the operator norms of every supplied lag ``k >= 1`` (including
    lags beyond ``b``), so pass enough lags for the tail to be negligible.
    """
    K = _lags(autocovs)
    lam0 = float(np.linalg.eigvalsh(spectral.symmetrize(K[0]))[0])
    if lam0 < tau - 1e-12 * max(1.0, abs(tau)):
        raise PreconditionFailed(f"K_0 floor violated: lambda_min(K_0)={lam0} < tau={tau}")
    eps = float(sum(np.linalg.norm(Kk, 2) for Kk in K[1:]))
    floor = tau - 2.0 * eps
    lmin = float(np.linalg.eigvalsh(block_covariance(K, b))[0])
    return BlockFloor(eps, floor, lmin, lmin >= floor - 1e-10, floor <= 0)


def ar1_autocovs(rho: float, n_lags: int, variance: float = 1.0) -> list[np.ndarray]:
    """Scalar AR(1) lags ``K_k = variance * rho^k`` for ``k = 0 .. n_lags``."""
    return [np.array([[variance * rho ** k]]) for k in range(n_lags + 1)]


@dataclass(frozen=True)
class MixingBound:
    per_lag_bounds: np.ndarray
    sum_bound: float
    alpha_sum: float
    floor_condition: bool | None


def mixing_cov_bound(alpha_coeffs, M_2delta: float, delta: float, tau: float | None = None) -> MixingBound:
    """Operator-norm covariance bounds ``8 M^2 alpha(k)^{delta/(2+delta)}`` per lag.

    ``floor_condition`` reports ``sum_k alpha(k)^{delta/(2+delta)} <= tau / (32 M^2)``
    when ``tau`` is given.
    """
    if not delta > 0:
        raise InvalidInput("delta must be positive")
    if not M_2delta >= 0:
        raise InvalidInput("moment bound must be nonnegative")
    a = np.asarray(alpha_coeffs, dtype=float).reshape(-1)
    if np.any(a < 0) or np.any(a > 1) or not np.all(np.isfinite(a)):
        raise InvalidInput("mixing coefficients must lie in [0, 1]")
    if np.any(a > 0.25):
        warnings.warn("alpha-mixing coefficients above 1/4 are outside their natural range", stacklevel=2)
    powered = a ** (delta / (2.0 + delta))
    per = 8.0 * M_2delta ** 2 * powered
    s = float(powered.sum())
    cond = None
    if tau is not None:
        cond = bool(32.0 * M_2delta ** 2 * s <= tau)
    return MixingBound(per, float(per.sum()), s, cond)


# ---------------------------------------------------------------------------
# entropy and covering


@dataclass(frozen=True)
class EntropyBound:
    m: int
    bound_general: float
    bound_sigma: float


def isotropic_entropy_bound(cov, L_star: float) -> EntropyBound:
    """Differential-entropy lower bounds (nats) for a law with isotropic constant ``L_star``.

    ``m`` is the rank of ``cov``; the determinant is the pseudo-determinant.
    """
    if not L_star > 0:
        raise InvalidInput("L_star must be positive")
    info = spectral.rank_info(cov)
    m = info.rank
    if m == 0:
        raise InvalidInput("covariance is zero")
    lam = info.retained_eigenvalues
    log_l = math.log(L_star)
    general = 0.5 * float(np.sum(np.log(lam))) - m * log_l
    return EntropyBound(m, general, 0.5 * m * (math.log(float(lam.min())) - 2 * log_l))


def gaussian_entropy(cov) -> float:
    """``(1/2) log((2 pi e)^m det_+ cov)`` in nats."""
    info = spectral.rank_info(cov)
    m = info.rank
    return 0.5 * m * math.log(2 * math.pi * math.e) + 0.5 * float(np.sum(np.log(info.retained_eigenvalues)))


def covering_bound(entropy_lb: float, m: int, rho: float) -> float:
    """``log N_rho >= h + m log(1/rho) - log Vol(B_1^m)``: a set of entropy ``h`` cannot be
    covered by fewer Euclidean ``rho``-balls."""
    if not 0 < rho < 1:
        raise InvalidInput("rho must lie in (0, 1)")
    if m < 1:
        raise InvalidInput("dimension must be >= 1")
    return entropy_lb + m * math.log(1.0 / rho) - log_unit_ball_volume(m)


# ---------------------------------------------------------------------------
# cascade calculators (bits)


@dataclass(frozen=True)
class CascadeParams:
    """Contracting cascade: Dobrushin coefficient ``theta``, fan-in ``B``, depth ``L_depth``.

    The width polynomial is ``sum_j poly_coeffs[j] * n_input**j``.
    """

    theta: float
    B: float
    L_depth: int
    n_input: int
    poly_coeffs: tuple = (0.0, 1.0)
    k_alphabet: int = 2
    H_pi: float = 1.0
    M_runs: int = 1

    def __post_init__(self):
        if not 0 <= self.theta < 1:
            raise InvalidInput("theta must lie in [0, 1)")
        if self.B < 1:
            raise InvalidInput("fan-in must be >= 1")
        if self.k_alphabet < 2:
            raise InvalidInput("alphabet size must be >= 2")
        if self.L_depth < 0 or self.n_input < 0 or self.M_runs < 1:
            raise InvalidInput("depth, input size and run count must be nonnegative")
        if not -1e-12 <= self.H_pi <= math.log2(self.k_alphabet) + 1e-12:
            raise InvalidInput("H(pi) must lie in [0, log2 k]")

    def width(self) -> float:
        return float(np.polynomial.polynomial.polyval(self.n_input, self.poly_coeffs))


def cascade_sensitivity(p: CascadeParams) -> float:
    """``min(1, poly(n) (B theta)^L)``; equal to 1 (vacuous) when ``B theta >= 1``."""
    raw = p.width() * (p.B * p.theta) ** p.L_depth
    return float(min(1.0, raw))


def cascade_is_vacuous(p: CascadeParams) -> bool:
    return p.B * p.theta >= 1 or p.width() * (p.B * p.theta) ** p.L_depth >= 1


def binary_entropy(x: float) -> float:
    """``h_2(x)`` in bits with ``h_2(0) = h_2(1) = 0``."""
    if not 0 <= x <= 1:
        raise InvalidInput("argument must lie in [0, 1]")
    if x in (0.0, 1.0):
        return 0.0
    return -x * math.log2(x) - (1 - x) * math.log2(1 - x)


def f_k(delta: float, k: int) -> float:
    """``delta log2(k - 1) + h_2(delta)``."""
    return delta * math.log2(k - 1) + binary_entropy(delta)


def cascade_entropy_floor(p: CascadeParams, delta_L: float) -> float:
    """``H(pi) - f_k(min(1, delta_L))`` bits."""
    if not delta_L >= 0:
        raise InvalidInput("delta_L must be nonnegative")
    return p.H_pi - f_k(min(1.0, delta_L), p.k_alphabet)


# ---------------------------------------------------------------------------
# Duffing covariance fit


@dataclass
class CovfitBeta:
    """Fitted ``Sigma(T) = S + T N1 + |beta|^3 g(T) Nbar I`` for one ``beta``; ``a[k-1]`` is ``a_k``."""

    beta: float
    S: np.ndarray
    N1: np.ndarray
    Nbar: float
    a: np.ndarray
    temps: np.ndarray
    r2: float
    residual_traces: np.ndarray
    rel_tol: float = spectral.REL_TOL

    def g(self, T) -> np.ndarray:
        T = np.asarray(T, dtype=float)
        return sum(ak * T ** (k + 1) for k, ak in enumerate(self.a))

    def Sigma(self, T: float) -> np.ndarray:
        d = self.S.shape[0]
        return self.S + T * self.N1 + abs(self.beta) ** 3 * float(self.g(T)) * self.Nbar * np.eye(d)

    def deterministic_capacity(self, T: float) -> float:
        """Model ``Tr(S Sigma(T)^+)``."""
        return float(np.sum(self.S * spectral.pinv(self.Sigma(T), self.rel_tol)))


@dataclass
class CovfitModel:
    per_beta: dict = field(default_factory=dict)
    max_poly_degree: int = 3

    def __getitem__(self, beta) -> CovfitBeta:
        return self.per_beta[beta]


def duffing_covfit(samples: dict, max_poly_degree: int = 3) -> CovfitModel:
    """Fit the isotropic-inflation model per ``beta`` from ensemble splits.

    ``samples`` maps ``(beta, T)`` to a CovarianceSplit. ``S`` and ``N1`` are the
    linear extrapolation through the two lowest temperatures. Those two points
    already contain some inflation, so the regressor for ``a_k`` is
    ``T^k - ell_k(T)`` with ``ell_k`` the chord of ``T^k`` through them; the
    resulting offset in ``N1`` and ``Nbar`` is removed in closed form. ``a_1``
    is not identifiable from a chord fit and is returned as 0.
    """
    if max_poly_degree < 1:
        raise InvalidInput("max_poly_degree must be >= 1")
    by_beta: dict = {}
    for (beta, T), split in samples.items():
        if T < 0:
            raise InvalidInput("temperatures must be nonnegative")
        by_beta.setdefault(float(beta), {})[float(T)] = split
    model = CovfitModel({}, max_poly_degree)
    for beta in sorted(by_beta):
        cells = by_beta[beta]
        temps = np.array(sorted(cells))
        if temps.size < max_poly_degree + 2:
            raise InsufficientData(f"beta={beta}: need >= {max_poly_degree + 2} temperatures, got {temps.size}")
        Ta, Tb = temps[0], temps[1]
        sa, sb = cells[Ta], cells[Tb]
        d = sa.d
        slope = (sb.N - sa.N) / (Tb - Ta)
        N1 = spectral.symmetrize(slope)
        S = spectral.symmetrize(sa.S - Ta * (sb.S - sa.S) / (Tb - Ta))
        N0 = sa.N - Ta * N1
        rel_tol = sa.rel_tol
        b3 = abs(beta) ** 3
        ks = np.arange(1, max_poly_degree + 1)
        chord = (Tb ** ks - Ta ** ks) / (Tb - Ta)
        resid = np.array([np.trace(cells[T].Sigma - S - N0 - T * N1) for T in temps])
        Phi = np.array([[T ** k - (Ta ** k + (T - Ta) * chord[k - 1]) for k in ks] for T in temps])
        Phi[:, 0] = 0.0  # T itself is its own chord
        A = d * b3 * Phi
        if b3 == 0 or not np.any(A):
            b = np.zeros(ks.size)
        else:
            b = spectral.nnls(A, resid)
        fitted = A @ b
        ss_tot = float(np.sum((resid - resid.mean()) ** 2))
        ss_res = float(np.sum((resid - fitted) ** 2))
        # inflation at rounding level (e.g. beta = 0) leaves nothing to explain
        scale = max(float(np.trace(cells[T].Sigma)) for T in temps)
        if float(np.max(np.abs(resid))) <= 1e-10 * max(scale, 1e-300):
            r2 = 1.0
        else:
            r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
        # b_k = a_k * Nbar_true; the chord leaked b . chord into N1 isotropically
        leak = b3 * float(b @ chord)
        N1_true = N1 - leak * np.eye(d)
        Nbar_est = 0.5 * float(np.trace(N1))
        Nbar_true = Nbar_est - (d / 2.0) * leak
        a = b / Nbar_true if Nbar_true > 0 else np.zeros_like(b)
        model.per_beta[beta] = CovfitBeta(
            beta, S, spectral.symmetrize(N1_true), Nbar_true,
            np.clip(a, 0.0, None), temps, r2, resid, rel_tol,
        )
    return model
