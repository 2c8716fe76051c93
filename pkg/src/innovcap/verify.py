"""Randomized invariant suites for every module, plus a deliberate negative control."""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass

import numpy as np

from . import capacity as cp
from . import geometry as geo
from . import hardness as hd
from . import reservoir as rv
from . import spectral
from .experiments import random_split

MISTHRESHOLD_TOL = 0.5


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: bool
    worst: float
    detail: str
    seconds: float


def _penrose(rng, n_cases=50):
    worst = 0.0
    for _ in range(n_cases):
        d = int(rng.integers(2, 9))
        G = rng.standard_normal((d, int(rng.integers(1, d + 1))))
        A = G @ G.T
        P = spectral.pinv(A)
        errs = (A @ P @ A - A, P @ A @ P - P, (A @ P).T - A @ P, (P @ A).T - P @ A)
        worst = max(worst, max(float(np.max(np.abs(e))) for e in errs) / max(1.0, float(np.max(np.abs(A)))))
    return worst <= 1e-8, worst, "Penrose conditions of pinv on random PSD matrices"


def _pencil(rng, n_cases=50):
    worst = 0.0
    for _ in range(n_cases):
        d = int(rng.integers(2, 8))
        sp = random_split(rng, d)
        lam, v = spectral.pencil_eigvecs(sp.N, sp.S)
        if lam.size:
            res = sp.N @ v - (sp.S @ v) * lam
            worst = max(worst, float(np.max(np.abs(res))) / max(1.0, float(np.max(np.abs(sp.Sigma)))))
    return worst <= 1e-8, worst, "N v = lambda S v for pencil eigenpairs"


def _lyapunov(rng, n_cases=30):
    worst = 0.0
    for _ in range(n_cases):
        d = int(rng.integers(1, 6))
        M = rng.standard_normal((d, d))
        A = M - (np.max(np.linalg.eigvals(M).real) + 0.5) * np.eye(d)
        Q = rng.standard_normal((d, d))
        Q = Q @ Q.T
        P = spectral.lyapunov_solve(A, Q)
        worst = max(worst, float(np.max(np.abs(A @ P + P @ A.T + Q))) / max(1.0, float(np.max(np.abs(Q)))))
    return worst <= 1e-8, worst, "A P + P A^T + Q = 0"


def _nnls(rng, n_cases=50):
    worst = 0.0
    for _ in range(n_cases):
        A = rng.standard_normal((12, 4))
        b = rng.standard_normal(12)
        x = spectral.nnls(A, b)
        g = A.T @ (A @ x - b)
        # KKT: x >= 0, gradient >= 0 where x = 0, gradient = 0 where x > 0
        kkt = max(float(-x.min()), float(np.max(np.where(x > 0, np.abs(g), np.maximum(-g, 0.0)))))
        worst = max(worst, kkt)
    return worst <= 1e-8, worst, "NNLS KKT conditions"


def _reservoir(rng):
    cfg = rv.RlcConfig(T=1.0)
    ss = rv.rlc_state_space(cfg)
    sp = rv.steady_state_split(ss, 0.5, cfg.noise_intensity)
    P = spectral.lyapunov_solve(ss.A, np.outer(ss.B_n, ss.B_n) * cfg.noise_intensity)
    err = float(np.max(np.abs(sp.N - ss.C @ P @ ss.C.T)))
    u = rng.standard_normal(400)
    a = rv.simulate_linear(ss, u, 0.1, 0.5, seed=3, burn_in=50).data
    b = rv.simulate_linear(ss, u, 0.1, 0.5, seed=3, burn_in=50).data
    same = bool(np.array_equal(a, b))
    return err <= 1e-10 and same, err, "steady-state split matches Lyapunov; simulation deterministic per seed"


def _capacity_conservation(rng, rel_tol=spectral.REL_TOL):
    """Full-rank task set spanning the readout recovers rank(Sigma) exactly."""
    worst = 0.0
    for _ in range(20):
        d = int(rng.integers(2, 6))
        n = 400
        X = rng.standard_normal((n, d)) @ rng.standard_normal((d, d))
        if rng.random() < 0.5:
            X[:, -1] = X[:, 0]
        X -= X.mean(0)
        Q, _ = np.linalg.qr(np.column_stack([X, rng.standard_normal((n, 30))]))
        caps = cp.ReadoutProjector(X, spectral.REL_TOL).capacities(Q)
        rank = spectral.rank_info(X.T @ X / n, rel_tol).rank
        worst = max(worst, abs(float(caps.sum()) - rank))
    return worst <= 1e-8, worst, "sum of capacities over a complete orthonormal task set equals rank"


def _geometry(rng, rel_tol=spectral.REL_TOL):
    worst = 0.0
    ok = True
    for _ in range(100):
        d = int(rng.integers(2, 13))
        sp = random_split(rng, d)
        c_ip, c_i = geo.capacity_traces(sp)
        rank = spectral.rank_info(sp.Sigma, rel_tol).rank
        worst = max(worst, abs(c_ip + c_i - rank))
        spec = geo.pencil_spectrum(sp.S, sp.N)
        for T in (0.0, 0.3, 3.0):
            a = geo.shrinkage_capacities(spec, T)
            b = geo.capacity_traces(rv.CovarianceSplit.from_parts(sp.S, T * sp.N))
            worst = max(worst, abs(a[0] - b[0]))
        g = geo.whitened_geometry(sp)
        for tau in (0.1, 0.5, 0.9):
            geo.tau_subspace(g, tau)
    K = geo.ar1_autocovs(0.1, 2000)
    for b in (1, 4, 16, 64):
        ok &= geo.block_floor_check(K, b, 1.0).holds
    return ok and worst <= 1e-8, worst, "conservation, shrinkage, tau bounds and block floor"


def _entropy(rng):
    scale = float(rng.uniform(0.5, 2.0))
    worst = 0.0
    for m in (1, 3, 8, 21, 64):
        cov = scale * np.eye(m)
        h = geo.isotropic_entropy_bound(cov, (2 * math.pi) ** -0.5).bound_general
        worst = max(worst, abs(geo.gaussian_entropy(cov) - h - m / 2))
        c = geo.covering_bound(h, m, 0.2) - geo.covering_bound(h, m, 0.4)
        worst = max(worst, abs(c - m * math.log(2)))
    worst = max(worst, abs(geo.f_k(0.1, 4) - (0.1 * math.log2(3) + geo.binary_entropy(0.1))))
    return worst <= 1e-8, worst, "entropy gap m/2, covering halving, f_k"


def _hardness(rng):
    cloud, fam = hd.make_family(16, 0.5, n_samples=8000, seed=int(rng.integers(1 << 30)))
    s = hd.family_summary(fam, [0])
    ok = s["min_tv"] >= fam.p * fam.alpha / 4 - 1e-12 and s["max_kl"] <= 4 * fam.p * fam.alpha ** 2
    ok &= fam.code.min_distance >= fam.m // 4
    worst = 0.0
    for _ in range(5):
        i, j = (int(x) for x in rng.choice(fam.size, 2, replace=False))
        tv, _ = hd.monte_carlo_tv_kl(fam, cloud, i, j, 40000, int(rng.integers(1 << 30)))
        worst = max(worst, abs(tv - hd._pair(fam, i, j).tv))
    return bool(ok) and worst <= 3 / math.sqrt(40000), worst, "packing TV/KL bounds, code distance, Monte-Carlo TV"


SUITES = {
    "spectral.penrose": _penrose,
    "spectral.pencil": _pencil,
    "spectral.lyapunov": _lyapunov,
    "spectral.nnls": _nnls,
    "reservoir.split": _reservoir,
    "capacity.conservation": _capacity_conservation,
    "geometry.invariants": _geometry,
    "geometry.entropy": _entropy,
    "hardness.family": _hardness,
}


def run_suites(seed: int, negative_control: bool = False) -> list[SuiteResult]:
    """Run every suite with its own child seed.

    ``negative_control`` counts rank with a deliberately wrong threshold in
    the conservation checks, which must make them fail.
    """
    children = np.random.SeedSequence(seed).spawn(len(SUITES))
    out = []
    for (name, fn), child in zip(SUITES.items(), children):
        rng = np.random.default_rng(child)
        kw = {}
        if negative_control and name in ("capacity.conservation", "geometry.invariants"):
            kw["rel_tol"] = MISTHRESHOLD_TOL
        t = time.perf_counter()
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                passed, worst, detail = fn(rng, **kw)
        except Exception as exc:  # a raised invariant is a failure, not a crash
            passed, worst, detail = False, math.nan, f"{type(exc).__name__}: {exc}"
        out.append(SuiteResult(name, bool(passed), float(worst), detail, time.perf_counter() - t))
    return out


def format_table(results) -> str:
    w = max(len(r.name) for r in results)
    lines = [f"{'suite':<{w}}  status  worst       seconds  detail"]
    for r in results:
        lines.append(f"{r.name:<{w}}  {'PASS' if r.passed else 'FAIL':<6}  {r.worst:<10.3g}  {r.seconds:7.2f}  {r.detail}")
    return "\n".join(lines)
