import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from innovcap import capacity as cp
from innovcap import geometry as geo
from innovcap import reservoir as rv
from innovcap.errors import InsufficientData, InvalidTask

RLC_BASIS = cp.BasisConfig(max_delay=20, max_degree=1, innov_delay=0, innov_degree=1, mixed_tasks=0)


def _rlc(T, **kw):
    cfg = rv.RlcConfig(T=T, **kw)
    return cfg, rv.rlc_state_space(cfg)


def test_hermite_normalization():
    x = np.random.default_rng(0).standard_normal(400000)
    for k in range(1, 5):
        h = cp.hermite_normalized(x, k)
        assert abs(np.mean(h * h) - 1) < 0.05
        assert abs(np.mean(h)) < 0.02
    np.testing.assert_allclose(cp.hermite_normalized(x[:5], 2), (x[:5] ** 2 - 1) / math.sqrt(2))


def test_delay_order():
    assert cp.delay_order(2, 1) == [0, 1, -1, 2]
    assert cp.delay_order(0) == [0]


def test_per_task_capacity_examples():
    X = np.array([[1.0, 0], [-1, 0], [0, 1], [0, -1]])
    z = np.array([1.0, -1, 1, -1]) / 2
    assert cp.per_task_capacity(X, z) == pytest.approx(1.0, abs=1e-12)
    rng = np.random.default_rng(1)
    Y = rng.standard_normal((200, 3))
    Y -= Y.mean(0)
    assert cp.per_task_capacity(Y, Y[:, 0]) == pytest.approx(1.0, abs=1e-12)
    w = rng.standard_normal(200)
    w -= Y @ np.linalg.lstsq(Y, w, rcond=None)[0]
    assert abs(cp.per_task_capacity(Y, w)) < 1e-10
    with pytest.raises(InvalidTask):
        cp.per_task_capacity(Y, np.zeros(200))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 5))
def test_per_task_capacity_in_unit_interval(seed, d):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((60, d))
    X -= X.mean(0)
    c = cp.ReadoutProjector(X).capacities(rng.standard_normal((60, 8)))
    assert np.all(c >= -1e-12) and np.all(c <= 1 + 1e-8)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 6))
def test_complete_task_set_recovers_rank(seed, d):
    rng = np.random.default_rng(seed)
    r = int(rng.integers(1, d + 1))
    X = rng.standard_normal((120, r)) @ rng.standard_normal((r, d))
    X -= X.mean(0)
    Q, kept = cp.orthonormalize(np.column_stack([X, rng.standard_normal((120, 40))]))
    caps = cp.ReadoutProjector(X).capacities(Q)
    assert caps.sum() == pytest.approx(r, abs=1e-8)


def test_orthonormalize_gram_and_drop_rule():
    rng = np.random.default_rng(2)
    a = rng.standard_normal(500)
    b = rng.standard_normal(500)
    Q, kept = cp.orthonormalize(np.column_stack([a, b, a, 2 * a - b, np.ones(500)]))
    assert kept == [0, 1]
    np.testing.assert_allclose(Q.T @ Q / 500, np.eye(2), atol=1e-12)
    np.testing.assert_allclose(Q.mean(0), 0, atol=1e-12)


def test_predictable_basis_examples():
    rng = np.random.default_rng(3)
    u = 2.0 + 0.5 * rng.standard_normal(5000)
    blk = cp.build_predictable_basis(u, max_delay=0, max_degree=1)
    np.testing.assert_allclose(blk.Q[:, 0], (u - u.mean()) / u.std(), atol=1e-10)
    blk = cp.build_predictable_basis(u, max_delay=1, max_degree=1)
    assert blk.size == 2
    raw = np.column_stack([(u[1:] - u.mean()) / u.std(), (u[:-1] - u.mean()) / u.std()])
    assert np.max(np.abs(raw.T @ raw / raw.shape[0] - np.eye(2))) < 4 / math.sqrt(raw.shape[0])
    np.testing.assert_allclose(blk.gram(), np.eye(2), atol=1e-8)


def test_predictable_basis_drops_degenerate_candidates():
    blk = cp.build_predictable_basis(np.ones(2000), max_delay=1, max_degree=1)
    assert blk.size == 0 and blk.n_dropped == 2
    # a binary input makes He2(u) constant, so every degree-2 power is dropped
    u = np.sign(np.random.default_rng(4).standard_normal(2000))
    blk = cp.build_predictable_basis(u, max_delay=0, max_degree=2)
    assert blk.descriptions == ("He1(u[t])",)


def test_predictable_basis_needs_enough_samples():
    with pytest.raises(InsufficientData):
        cp.build_predictable_basis(np.random.default_rng(0).standard_normal(100), max_delay=10, max_degree=2)


def test_doob_split_exact_cases():
    _, ss = _rlc(0.0)
    u = np.random.default_rng(5).standard_normal(300)
    ens = rv.run_trial_ensemble(ss, u, 4, seed=1, dt=0.5, noise_intensity=0.0)
    sp = cp.doob_split(ens)
    assert np.all(sp.residuals == 0)
    _, ss = _rlc(1.0)
    ens = rv.run_trial_ensemble(ss, u, 6, seed=1, dt=0.5, noise_intensity=1.0)
    sp = cp.doob_split(ens)
    np.testing.assert_allclose(sp.residuals.mean(axis=0), 0, atol=1e-12)


def test_doob_split_noise_covariance_matches_lyapunov():
    cfg, ss = _rlc(1.0, readout="state")
    u = np.random.default_rng(6).standard_normal(2000)
    ens = rv.run_trial_ensemble(ss, u, 500, seed=2, dt=0.5, noise_intensity=cfg.noise_intensity)
    N_hat = cp.doob_split(ens).covariance_split().N
    N = rv.steady_state_split(ss, 1.0, cfg.noise_intensity).N
    assert np.linalg.norm(N_hat - N) <= 0.1 * np.linalg.norm(N)


def test_streamed_split_matches_batch_split():
    cfg, ss = _rlc(1.0, readout="state")
    u = np.random.default_rng(7).standard_normal(600)
    ens = rv.run_trial_ensemble(ss, u, 10, seed=3, dt=0.5, noise_intensity=cfg.noise_intensity)
    a = cp.doob_split(ens)
    b = cp.streamed_doob_split(ss, u, 10, 3, dt=0.5, noise_intensity=cfg.noise_intensity, batch=3)
    np.testing.assert_allclose(b.mean_series, a.mean_series, atol=1e-12)
    np.testing.assert_allclose(b.designated_residual(), a.designated_residual(), atol=1e-12)
    np.testing.assert_allclose(b.split.S, a.covariance_split().S, atol=1e-10)
    np.testing.assert_allclose(b.split.N, a.covariance_split().N, atol=1e-10)


def test_innovation_basis_empty_without_noise():
    _, ss = _rlc(0.0)
    u = np.random.default_rng(8).standard_normal(2000)
    sp = cp.streamed_doob_split(ss, u, 4, 0, dt=0.5, noise_intensity=0.0)
    assert cp.build_innovation_basis(sp, 2, 2).size == 0
    mixed = cp.build_mixed_basis(
        u, sp, None,
        predictable=cp.build_predictable_basis(u, 2, 1, window=(sp.t0 + 2, sp.t0 + sp.designated.n)),
        innovation=cp.build_innovation_basis(sp, 2, 2),
    )
    assert mixed.size == 0


def _estimate(T, basis=RLC_BASIS, n=20000, K=40, **kw):
    cfg, ss = _rlc(T, **kw)
    u = np.random.default_rng(9).standard_normal(n + 100)
    rep, split = cp.estimate_capacities(cfg, u, K, 11, basis, dt=0.5, burn_in=100)
    return cfg, ss, rep


def test_rlc_capacities_match_shrinkage_law():
    for T in (0.0, 1.0):
        cfg, ss, rep = _estimate(T)
        S = rv.steady_state_split(ss, 0.5, 0.0).S
        N0 = rv.steady_state_split(ss, 0.0, cfg.alpha_n ** 2 * cfg.gamma).N
        c_ip, c_i = geo.shrinkage_capacities(geo.pencil_spectrum(S, N0), T)
        assert abs(rep.C_ip - c_ip) < 0.05 and abs(rep.C_i - c_i) < 0.05
        assert rep.rank_Sigma == 1
        cap = np.array([r[-1] for r in rep.rows()], dtype=float)
        assert np.all(cap >= -1e-12) and np.all(cap <= 1 + 1e-8)


def test_noiseless_and_pure_noise_limits():
    _, _, rep = _estimate(0.0, readout="state")
    assert rep.C_i == 0 and abs(rep.C_ip - rep.rank_Sigma) < 0.05
    _, _, rep = _estimate(1.0, alpha_s=0.0, readout="state")
    assert rep.C_ip < 0.05 and abs(rep.C_i - rep.rank_Sigma) < 0.05


def test_additive_system_has_no_mixed_sector():
    basis = cp.BasisConfig(max_delay=20, max_degree=1, innov_delay=1, innov_degree=1, mixed_tasks=None)
    _, _, rep = _estimate(1.0, basis)
    assert abs(rep.C_i_mixed) < 0.05


def test_report_serialization(tmp_path):
    _, _, rep = _estimate(0.5, n=3000, K=10)
    rep.write(tmp_path / "r.json", tmp_path / "r.csv")
    assert (tmp_path / "r.json").read_text().startswith("{")
    d = rep.to_dict()
    assert d["C_ip"] == pytest.approx(rep.C_ip)
    assert rep.conservation_gap == pytest.approx(rep.rank_Sigma - rep.C_ip - rep.C_i)


@pytest.mark.slow
def test_duffing_strong_nonlinearity_populates_mixed_sector():
    basis = cp.BasisConfig(max_delay=2, max_lead=1, max_degree=5, innov_delay=2, innov_degree=3,
                           mixed_tasks=None, innovation_source="replay")
    cfg = rv.DuffingConfig(beta=1.0, T=1.0, alpha_s=0.2, alpha_n=0.3, hold=320)
    u = np.random.default_rng(1).standard_normal(5000)
    rep, _ = cp.estimate_capacities(cfg, u, 10, 5, basis)
    assert rep.C_i_mixed > 0.05
    assert rep.rank_Sigma - 0.2 <= rep.C_ip + rep.C_i <= rep.rank_Sigma + 0.05
