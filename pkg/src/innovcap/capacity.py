"""Data-driven capacity estimation.

Tasks live on an absolute time window ``[start, stop)`` of the input axis.
Readouts carry their own offset (``ReadoutSeries.t0``) and are cropped to the
window before any projection, so delayed input tasks can reach back into the
burn-in.

Per-task capacity of a centered task ``z`` on a centered readout ``X`` is the
fraction of ``z``'s energy captured by the best linear readout,
``z' X (X'X)^+ X' z / z' z``.
"""

from __future__ import annotations

import itertools
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.linalg
from scipy.special import factorial

from . import reservoir as rv
from . import spectral
from .errors import InsufficientData, InvalidInput, InvalidTask

SECTORS = ("predictable", "innovation", "mixed")
DROP_TOL = 1e-6


# ---------------------------------------------------------------------------
# tasks


@dataclass
class TaskSeries:
    values: np.ndarray
    sector: str
    description: str = ""

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float).reshape(-1)
        if self.sector not in SECTORS:
            raise InvalidInput(f"unknown sector {self.sector!r}")


@dataclass(frozen=True)
class TaskBlock:
    """Tasks stored as the columns of ``Q``, orthonormal under ``<a, b> = mean(a * b)``."""

    Q: np.ndarray
    sector: str
    descriptions: tuple = ()
    degrees: tuple = ()
    window: tuple = (0, 0)
    n_candidates: int = 0
    n_dropped: int = 0

    @property
    def n(self) -> int:
        return self.Q.shape[0]

    @property
    def size(self) -> int:
        return self.Q.shape[1]

    @property
    def tasks(self) -> list[TaskSeries]:
        return [TaskSeries(self.Q[:, j], self.sector, self.descriptions[j]) for j in range(self.size)]

    def gram(self) -> np.ndarray:
        return self.Q.T @ self.Q / self.n

    def select(self, mask) -> "TaskBlock":
        mask = np.asarray(mask, dtype=bool)
        return replace(
            self,
            Q=self.Q[:, mask],
            descriptions=tuple(d for d, k in zip(self.descriptions, mask) if k),
            degrees=tuple(d for d, k in zip(self.degrees, mask) if k),
        )


def hermite_normalized(x, k: int) -> np.ndarray:
    """Probabilists' Hermite polynomial ``He_k(x) / sqrt(k!)``; orthonormal under N(0, 1)."""
    x = np.asarray(x, dtype=float)
    h_prev, h = np.ones_like(x), x.copy()
    if k == 0:
        return h_prev
    for j in range(1, k):
        h_prev, h = h, x * h - j * h_prev
    return h / math.sqrt(factorial(k, exact=True))


def delay_order(max_delay: int, max_lead: int = 0) -> list[int]:
    """Delays ``0, 1, -1, 2, -2, ...`` (negative = lead) up to the given reach."""
    out = [0]
    for j in range(1, max(max_delay, max_lead) + 1):
        if j <= max_delay:
            out.append(j)
        if j <= max_lead:
            out.append(-j)
    return out


def _monomials(n_vars: int, max_degree: int, limit: int | None):
    count = 0
    for deg in range(1, max_degree + 1):
        for combo in itertools.combinations_with_replacement(range(n_vars), deg):
            if limit is not None and count >= limit:
                return
            count += 1
            yield combo


def _hermite_candidates(columns, names, max_degree, n_tasks):
    """Products of normalized Hermite polynomials of the given standardized columns."""
    cache = {}

    def herm(v, k):
        if (v, k) not in cache:
            cache[(v, k)] = hermite_normalized(columns[v], k)
        return cache[(v, k)]

    values, descs, degrees = [], [], []
    for combo in _monomials(len(columns), max_degree, n_tasks):
        z = np.ones_like(columns[0])
        parts = []
        for v, k in sorted(_counts(combo).items()):
            z = z * herm(v, k)
            parts.append(f"He{k}({names[v]})")
        values.append(z)
        descs.append("*".join(parts))
        degrees.append(len(combo))
    return values, descs, degrees


def _counts(combo):
    out = {}
    for v in combo:
        out[v] = out.get(v, 0) + 1
    return out


def _standardize(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    sd = x.std()
    if sd == 0:
        return np.zeros_like(x)
    return (x - x.mean()) / sd


def orthonormalize(candidates, prior=(), drop_tol: float = DROP_TOL):
    """Gram-Schmidt the candidate columns in order against ``prior`` blocks and each other.

    Candidates are centered, projected twice onto the orthogonal complement of
    the prior blocks, then processed sequentially; a candidate whose remaining
    norm is below ``drop_tol`` times its raw norm is skipped. The
    sequential pass works on the Gram matrix (an incremental Cholesky), and a
    second Cholesky-QR pass restores orthogonality to working precision.

    Returns ``(Q, kept)`` with ``Q`` of shape ``(n, len(kept))`` and
    ``Q.T @ Q / n = I``.
    """
    C = np.array(candidates, dtype=float, copy=True)
    if C.ndim == 1:
        C = C[:, None]
    n, k = C.shape
    # centering is the first projection, so the drop rule is relative to the raw norm
    norms = np.sqrt(np.einsum("ij,ij->j", C, C) / n)
    C -= C.mean(axis=0)
    for _ in range(2):
        for P in prior:
            if P.shape[1]:
                C -= P @ (P.T @ C / n)
    G = C.T @ C / n
    kept: list[int] = []
    L = np.zeros((0, 0))
    for j in range(k):
        if not norms[j] > 0:
            continue
        g = G[kept, j]
        ell = scipy.linalg.solve_triangular(L, g, lower=True) if kept else np.zeros(0)
        r2 = G[j, j] - ell @ ell
        if not r2 > (drop_tol * norms[j]) ** 2:
            continue
        m = len(kept)
        L2 = np.zeros((m + 1, m + 1))
        L2[:m, :m] = L
        L2[m, :m] = ell
        L2[m, m] = math.sqrt(r2)
        L = L2
        kept.append(j)
    if not kept:
        return np.zeros((n, 0)), []
    Q = scipy.linalg.solve_triangular(L, C[:, kept].T, lower=True).T
    for P in prior:
        if P.shape[1]:
            Q -= P @ (P.T @ Q / n)
    L2 = np.linalg.cholesky(Q.T @ Q / n)
    Q = scipy.linalg.solve_triangular(L2, Q.T, lower=True).T
    return Q, kept


def _make_block(values, descs, degrees, sector, window, prior, drop_tol, n_tasks):
    n = window[1] - window[0]
    if n < 10 * len(values):
        raise InsufficientData(f"{n} samples cannot support {len(values)} tasks (need n >= 10 * n_tasks)")
    if not values:
        return TaskBlock(np.zeros((n, 0)), sector, (), (), window, 0, 0)
    Q, kept = orthonormalize(np.column_stack(values), [b.Q for b in prior], drop_tol)
    return TaskBlock(
        Q,
        sector,
        tuple(descs[j] for j in kept),
        tuple(degrees[j] for j in kept),
        tuple(window),
        len(values),
        len(values) - len(kept),
    )


def _check_window(window, lo: int, hi: int):
    start, stop = int(window[0]), int(window[1])
    if start < lo or stop > hi or stop <= start:
        raise InvalidInput(f"task window {window} does not fit the available range [{lo}, {hi})")
    return start, stop


def build_predictable_basis(
    u,
    max_delay: int = 10,
    max_degree: int = 3,
    n_tasks: int | None = None,
    *,
    max_lead: int = 0,
    window=None,
    drop_tol: float = DROP_TOL,
) -> TaskBlock:
    """Orthonormal Hermite polynomials of delayed (and optionally advanced) inputs.

    Candidates are enumerated by total degree, then lexicographically over the
    delay order of :func:`delay_order`. ``window`` is an absolute index range of
    ``u``; by default the largest range on which every delay is defined.
    """
    u = np.asarray(u, dtype=float).reshape(-1)
    if max_delay < 0 or max_lead < 0 or max_degree < 1:
        raise InvalidInput("delays must be nonnegative and max_degree >= 1")
    if window is None:
        window = (max_delay, u.size - max_lead)
    start, stop = _check_window(window, max_delay, u.size - max_lead)
    x = _standardize(u)
    delays = delay_order(max_delay, max_lead)
    cols = [x[start - j:stop - j] for j in delays]
    names = [f"u[t{-j:+d}]" if j else "u[t]" for j in delays]
    values, descs, degrees = _hermite_candidates(cols, names, max_degree, n_tasks)
    return _make_block(values, descs, degrees, "predictable", (start, stop), (), drop_tol, n_tasks)


def _residual_stream(split) -> tuple[np.ndarray, int]:
    if isinstance(split, (DoobSplit, StreamedDoobSplit)):
        return split.designated_residual(), split.t0
    if isinstance(split, rv.ReadoutSeries):
        return split.data, split.t0
    raise InvalidInput("expected a DoobSplit, StreamedDoobSplit or ReadoutSeries")


def build_innovation_basis(
    split,
    max_delay: int = 10,
    max_degree: int = 3,
    n_tasks: int | None = None,
    *,
    prior=(),
    window=None,
    drop_tol: float = DROP_TOL,
) -> TaskBlock:
    """Orthonormal Hermite polynomials of delayed residual coordinates.

    ``split`` supplies the designated trial's residual stream; a ReadoutSeries
    may be passed to use another noise-only source. Candidates are projected
    against ``prior`` blocks (normally the predictable block) before
    normalization.
    """
    R, t0 = _residual_stream(split)
    n, d = R.shape
    if window is None:
        window = (t0 + max_delay, t0 + n)
    start, stop = _check_window(window, t0 + max_delay, t0 + n)
    std = [_standardize(R[:, i]) for i in range(d)]
    cols, names = [], []
    for j in range(max_delay + 1):
        for i in range(d):
            cols.append(std[i][start - t0 - j:stop - t0 - j])
            names.append(f"dX{i + 1}[t-{j}]" if j else f"dX{i + 1}[t]")
    values, descs, degrees = _hermite_candidates(cols, names, max_degree, n_tasks)
    return _make_block(values, descs, degrees, "innovation", (start, stop), prior, drop_tol, n_tasks)


def build_mixed_basis(
    u,
    split,
    n_tasks: int | None = None,
    *,
    predictable: TaskBlock,
    innovation: TaskBlock,
    closure=None,
    max_factor_degree: int = 1,
    drop_tol: float = DROP_TOL,
) -> TaskBlock:
    """Products of one predictable and one innovation task, projected against both blocks.

    Only factors of degree ``<= max_factor_degree`` are paired. ``closure`` is an
    optional residual stream (n x d ReadoutSeries) whose delay-0 coordinates are
    appended as extra candidates; after projection they hold the part of the
    residual that is neither input-only nor noise-only.
    """
    if predictable.window != innovation.window:
        raise InvalidInput("predictable and innovation blocks must share a window")
    window = predictable.window
    P = [j for j in range(predictable.size) if predictable.degrees[j] <= max_factor_degree]
    I = [j for j in range(innovation.size) if innovation.degrees[j] <= max_factor_degree]
    values, descs, degrees = [], [], []
    for a, b in itertools.product(P, I):
        if n_tasks is not None and len(values) >= n_tasks:
            break
        values.append(predictable.Q[:, a] * innovation.Q[:, b])
        descs.append(f"[{predictable.descriptions[a]}]x[{innovation.descriptions[b]}]")
        degrees.append(predictable.degrees[a] + innovation.degrees[b])
    if closure is not None:
        R, t0 = _residual_stream(closure)
        start, stop = _check_window(window, t0, t0 + R.shape[0])
        for i in range(R.shape[1]):
            values.append(R[start - t0:stop - t0, i])
            descs.append(f"dX{i + 1}[t] closure")
            degrees.append(1)
    return _make_block(values, descs, degrees, "mixed", window, (predictable, innovation), drop_tol, n_tasks)


# ---------------------------------------------------------------------------
# Doob split


@dataclass
class DoobSplit:
    """Trial mean and per-trial residuals of an ensemble."""

    mean_series: np.ndarray
    residuals: np.ndarray
    t0: int = 0
    dt_sample: float = 1.0

    @property
    def K(self) -> int:
        return self.residuals.shape[0]

    def designated_residual(self, index: int = 0) -> np.ndarray:
        return _flush_rounding(self.residuals[index], self.mean_series)

    def covariance_split(self) -> rv.CovarianceSplit:
        """Unbiased ``(S, N)`` from the law of total covariance; ``S`` is clipped to PSD."""
        X = self.residuals + self.mean_series
        return _split_from_moments(*_moments(X), self.K)


def _moments(X):
    # X: K x n x d
    K, n, _ = X.shape
    Xc = X - X.mean(axis=1, keepdims=True)
    second = np.einsum("kti,ktj->ij", Xc, Xc) / n
    return second, Xc.sum(axis=0), n


def _split_from_moments(second_sum, sum_series, n, K):
    mean = sum_series / K
    mm = mean.T @ mean / n
    N = (second_sum - K * mm) / (K - 1)
    S = spectral.clip_psd(mm - N / K)
    N = spectral.clip_psd(N)
    return rv.CovarianceSplit.from_parts(S, N)


def doob_split(ens: rv.TrialEnsemble) -> DoobSplit:
    if ens.K < 2:
        raise InvalidInput("Doob split needs K >= 2")
    X = ens.stacked()
    mean = X.mean(axis=0)
    tr = ens.trials[0]
    return DoobSplit(mean, X - mean, tr.t0, tr.dt_sample)


@dataclass
class StreamedDoobSplit:
    """Doob split that keeps only the designated trial; built without storing the ensemble."""

    mean_series: np.ndarray
    designated: rv.ReadoutSeries
    K: int
    split: rv.CovarianceSplit
    seeds: list = field(default_factory=list)
    designated_index: int = 0

    @property
    def t0(self) -> int:
        return self.designated.t0

    @property
    def dt_sample(self) -> float:
        return self.designated.dt_sample

    def designated_residual(self, index: int | None = None) -> np.ndarray:
        if index not in (None, self.designated_index):
            raise InvalidInput("only the designated trial's residual is retained")
        return _flush_rounding(self.designated.data - self.mean_series, self.mean_series)


def _flush_rounding(residual, mean):
    # identical trials leave only last-bit differences from the averaging
    scale = np.abs(mean).max(initial=0.0)
    if np.abs(residual).max(initial=0.0) <= 1e-12 * scale:
        return np.zeros_like(residual)
    return residual


def streamed_doob_split(
    system,
    u,
    K: int,
    seed: int,
    *,
    dt=None,
    noise_intensity=None,
    burn_in=None,
    designated: int = 0,
    batch: int = 8,
    threads: int = 1,
) -> StreamedDoobSplit:
    """Simulate an ensemble in batches and accumulate the sufficient statistics of the split."""
    if K < 2:
        raise InvalidInput("Doob split needs K >= 2")
    if not 0 <= designated < K:
        raise InvalidInput("designated trial index out of range")
    seeds = rv._trial_seeds(seed, K)
    groups = [seeds[i:i + batch] for i in range(0, K, batch)]

    def work(group):
        X = rv.simulate_trials(system, u, group, dt=dt, noise_intensity=noise_intensity, burn_in=burn_in)
        second, sums, n = _moments(X)
        keep = X[designated - seeds.index(group[0])] if group[0] <= seeds[designated] <= group[-1] else None
        return X.sum(axis=0), second, sums, keep

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(work, groups))
    else:
        parts = [work(g) for g in groups]
    raw_sum = sum(p[0] for p in parts)
    second = sum(p[1] for p in parts)
    sums = sum(p[2] for p in parts)
    X_des = next(p[3] for p in parts if p[3] is not None)
    n = X_des.shape[0]
    t0, dt_s = rv.readout_geometry(system, u, dt=dt, burn_in=burn_in)
    return StreamedDoobSplit(
        raw_sum / K,
        rv.ReadoutSeries(X_des, dt_s, t0=t0),
        K,
        _split_from_moments(second, sums, n, K),
        seeds,
        designated,
    )


# ---------------------------------------------------------------------------
# capacities


class ReadoutProjector:
    """Shares ``(X'X)^{+/2}`` across many per-task capacity evaluations."""

    def __init__(self, X, rel_tol: float = spectral.REL_TOL):
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X[:, None]
        self.X = X - X.mean(axis=0)
        self.n = X.shape[0]
        self.Sigma = self.X.T @ self.X / self.n
        self.rank = spectral.rank_info(self.Sigma, rel_tol)
        self._W = spectral.pinv_sqrt(self.Sigma, rel_tol)

    def capacities(self, Z) -> np.ndarray:
        Z = np.asarray(Z, dtype=float)
        if Z.ndim == 1:
            Z = Z[:, None]
        if Z.shape[0] != self.n:
            raise InvalidInput("task length does not match the readout")
        Z = Z - Z.mean(axis=0)
        energy = np.einsum("ij,ij->j", Z, Z) / self.n
        if np.any(energy <= 0):
            raise InvalidTask("task is identically zero")
        proj = (self._W @ (self.X.T @ Z)) / self.n
        return np.einsum("ij,ij->j", proj, proj) / energy


def _readout_array(X) -> np.ndarray:
    if isinstance(X, rv.ReadoutSeries):
        return X.data
    X = np.asarray(X, dtype=float)
    return X[:, None] if X.ndim == 1 else X


def per_task_capacity(X, z, rel_tol: float = spectral.REL_TOL) -> float:
    """``z' X (X'X)^+ X' z / z' z`` after centering both."""
    X = _readout_array(X)
    zv = z.values if isinstance(z, TaskSeries) else np.asarray(z, dtype=float).reshape(-1)
    if X.shape[0] < X.shape[1]:
        raise InsufficientData("need at least as many samples as readout dimensions")
    return float(ReadoutProjector(X, rel_tol).capacities(zv)[0])


@dataclass
class CapacityReport:
    C_ip: float
    C_i: float
    rank_Sigma: int
    per_sector: dict
    descriptions: dict
    degrees: dict
    n: int
    d: int
    K: int = 0
    thresholds: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)

    def _sum(self, sector, pred=lambda deg: True) -> float:
        caps = self.per_sector.get(sector, np.zeros(0))
        degs = self.degrees.get(sector, ())
        return float(sum(c for c, g in zip(caps, degs) if pred(g)))

    @property
    def C_ip_linear(self) -> float:
        return self._sum("predictable", lambda g: g == 1)

    @property
    def C_ip_nonlinear(self) -> float:
        """Predictable capacity carried by tasks of total degree >= 2."""
        return self._sum("predictable", lambda g: g >= 2)

    @property
    def C_i_noise(self) -> float:
        return self._sum("innovation")

    @property
    def C_i_mixed(self) -> float:
        return self._sum("mixed")

    @property
    def conservation_gap(self) -> float:
        return self.rank_Sigma - self.C_ip - self.C_i

    def to_dict(self) -> dict:
        return {
            "C_ip": self.C_ip,
            "C_i": self.C_i,
            "C_ip_linear": self.C_ip_linear,
            "C_ip_nonlinear": self.C_ip_nonlinear,
            "C_i_noise": self.C_i_noise,
            "C_i_mixed": self.C_i_mixed,
            "rank_Sigma": self.rank_Sigma,
            "n": self.n,
            "d": self.d,
            "K": self.K,
            "thresholds": self.thresholds,
            "diagnostics": self.diagnostics,
            "per_sector": {s: [float(c) for c in v] for s, v in self.per_sector.items()},
            "descriptions": {s: list(v) for s, v in self.descriptions.items()},
        }

    def rows(self):
        for s in SECTORS:
            for desc, c in zip(self.descriptions.get(s, ()), self.per_sector.get(s, ())):
                yield s, desc, float(c)

    def write(self, json_path, csv_path=None) -> None:
        with open(json_path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")
        if csv_path is not None:
            import csv

            with open(csv_path, "w", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(["sector", "task_description", "capacity"])
                for s, desc, c in self.rows():
                    w.writerow([s, desc, repr(c)])


def crop_readout(X, window) -> np.ndarray:
    """Rows of ``X`` on the absolute window ``[start, stop)``."""
    t0 = X.t0 if isinstance(X, rv.ReadoutSeries) else 0
    data = _readout_array(X)
    start, stop = _check_window(window, t0, t0 + data.shape[0])
    return data[start - t0:stop - t0]


def sector_capacities(X, blocks, *, K: int = 0, rel_tol: float = spectral.REL_TOL) -> CapacityReport:
    """Per-task capacities of every block on the readout, summed by sector.

    ``C_ip`` sums the predictable block; ``C_i`` sums innovation and mixed blocks.
    """
    blocks = [b for b in blocks if b is not None]
    if not blocks:
        raise InvalidInput("no task blocks given")
    windows = {b.window for b in blocks}
    if len(windows) > 1:
        raise InvalidInput(f"blocks disagree on the task window: {sorted(windows)}")
    window = windows.pop()
    Xw = crop_readout(X, window)
    proj = ReadoutProjector(Xw, rel_tol)
    per, descs, degs = {}, {}, {}
    for b in blocks:
        caps = proj.capacities(b.Q) if b.size else np.zeros(0)
        per[b.sector] = np.concatenate([per.get(b.sector, np.zeros(0)), caps])
        descs[b.sector] = tuple(descs.get(b.sector, ())) + b.descriptions
        degs[b.sector] = tuple(degs.get(b.sector, ())) + b.degrees
    diag = {
        "window": list(window),
        "basis_sizes": {b.sector: b.size for b in blocks},
        "candidates": {b.sector: b.n_candidates for b in blocks},
        "dropped": {b.sector: b.n_dropped for b in blocks},
    }
    C_ip = float(per.get("predictable", np.zeros(0)).sum())
    C_i = float(per.get("innovation", np.zeros(0)).sum() + per.get("mixed", np.zeros(0)).sum())
    return CapacityReport(
        C_ip,
        C_i,
        proj.rank.rank,
        per,
        descs,
        degs,
        Xw.shape[0],
        Xw.shape[1],
        K,
        {"rel_tol": rel_tol},
        diag,
    )


# ---------------------------------------------------------------------------
# end-to-end estimation


@dataclass(frozen=True)
class BasisConfig:
    """Task-family truncation.

    ``innovation_source="residual"`` builds noise tasks from the designated
    trial's residual. ``"replay"`` builds them from a zero-input run with the
    designated trial's noise seed, and appends the residual itself to the mixed
    block as a closure.
    """

    max_delay: int = 10
    max_lead: int = 0
    max_degree: int = 3
    n_tasks: int | None = None
    innov_delay: int = 0
    innov_degree: int = 1
    innov_tasks: int | None = None
    mixed_tasks: int | None = 0
    mixed_factor_degree: int = 1
    innovation_source: str = "residual"
    drop_tol: float = DROP_TOL
    rel_tol: float = spectral.REL_TOL

    def __post_init__(self):
        if self.innovation_source not in ("residual", "replay"):
            raise InvalidInput(f"unknown innovation source {self.innovation_source!r}")


def task_window(u_len: int, t0: int, n: int, basis: BasisConfig) -> tuple[int, int]:
    start = max(basis.max_delay, t0 + basis.innov_delay)
    stop = min(u_len - basis.max_lead, t0 + n)
    if stop <= start:
        raise InsufficientData("readout too short for the requested delays")
    return start, stop


def zero_input_replay(system, u, seed: int, *, dt=None, noise_intensity=None, burn_in=None) -> rv.ReadoutSeries:
    """Readout of one trial with the input switched off and the given noise seed."""
    z = np.zeros_like(np.asarray(u, dtype=float))
    data = rv.simulate_trials(system, z, [seed], dt=dt, noise_intensity=noise_intensity, burn_in=burn_in)[0]
    t0, dt_s = rv.readout_geometry(system, z, dt=dt, burn_in=burn_in)
    return rv.ReadoutSeries(data, dt_s, t0=t0)


def estimate_capacities(
    system,
    u,
    K: int,
    seed: int,
    basis: BasisConfig = BasisConfig(),
    *,
    dt=None,
    noise_intensity=None,
    burn_in=None,
    threads: int = 1,
    predictable: TaskBlock | None = None,
) -> tuple[CapacityReport, StreamedDoobSplit]:
    """Simulate an ensemble, build the three task blocks and return the sector report.

    A precomputed ``predictable`` block may be passed to reuse it across
    temperatures (it depends only on ``u``).
    """
    u = np.asarray(u, dtype=float).reshape(-1)
    sim = dict(dt=dt, noise_intensity=noise_intensity, burn_in=burn_in)
    split = streamed_doob_split(system, u, K, seed, threads=threads, **sim)
    X = split.designated
    window = task_window(u.size, X.t0, X.n, basis)
    if predictable is None or predictable.window != window:
        predictable = build_predictable_basis(
            u, basis.max_delay, basis.max_degree, basis.n_tasks,
            max_lead=basis.max_lead, window=window, drop_tol=basis.drop_tol,
        )
    residual = rv.ReadoutSeries(split.designated_residual(), X.dt_sample, t0=X.t0)
    if basis.innovation_source == "replay":
        source = zero_input_replay(system, u, split.seeds[split.designated_index], **sim)
        closure = residual
    else:
        source, closure = residual, None
    innovation = build_innovation_basis(
        source, basis.innov_delay, basis.innov_degree, basis.innov_tasks,
        prior=(predictable,), window=window, drop_tol=basis.drop_tol,
    )
    blocks = [predictable, innovation]
    if basis.mixed_tasks != 0 or closure is not None:
        mixed = build_mixed_basis(
            u, split, basis.mixed_tasks, predictable=predictable, innovation=innovation,
            closure=closure, max_factor_degree=basis.mixed_factor_degree, drop_tol=basis.drop_tol,
        )
        blocks.append(mixed)
    report = sector_capacities(X, blocks, K=K, rel_tol=basis.rel_tol)
    return report, split
