import math

import numpy as np
import pytest

from innovcap import reservoir as rv
from innovcap import spectral
from innovcap.errors import DivergedTrajectory, InvalidInput, UnstableSystem


def test_rlc_state_space_characteristic_polynomial():
    ss = rv.rlc_state_space(rv.RlcConfig(R=1, L_ind=1, C_cap=1))
    np.testing.assert_allclose(ss.A, [[0, 1], [-1, -1]])
    np.testing.assert_allclose(np.linalg.eigvals(ss.A).real, [-0.5, -0.5])


def test_rlc_zero_signal_gain_gives_zero_S():
    ss = rv.rlc_state_space(rv.RlcConfig(alpha_s=0.0))
    np.testing.assert_array_equal(ss.B_s, 0)
    assert np.all(rv.steady_state_split(ss, 1.0, 1.0).S == 0)


def test_rlc_default_is_hurwitz():
    ss = rv.rlc_state_space(rv.RlcConfig())
    assert np.all(np.linalg.eigvals(ss.A).real < 0)


def test_config_validation():
    with pytest.raises(InvalidInput):
        rv.RlcConfig(R=-1)
    with pytest.raises(InvalidInput):
        rv.DuffingConfig(Omega_lpf=0.5)
    with pytest.raises(InvalidInput):
        rv.DuffingConfig(dt=1.0)
    with pytest.raises(UnstableSystem):
        rv.LinearStateSpace(np.eye(2), np.ones(2), np.ones(2), np.eye(2))


def test_simulate_linear_zero_everything():
    ss = rv.rlc_state_space(rv.RlcConfig())
    X = rv.simulate_linear(ss, np.zeros(500), 0.0, 0.1, seed=1)
    assert np.all(X.data == 0)


def test_simulate_linear_step_gain():
    ss = rv.rlc_state_space(rv.RlcConfig())
    X = rv.simulate_linear(ss, np.ones(2000), 0.0, 0.1, seed=1)
    gain = -ss.C @ np.linalg.solve(ss.A, ss.B_s)
    np.testing.assert_allclose(X.data[-1], gain, atol=1e-9)


def test_simulate_linear_noise_covariance_matches_lyapunov():
    cfg = rv.RlcConfig(readout="state")
    ss = rv.rlc_state_space(cfg)
    X = rv.simulate_linear(ss, np.zeros(10 ** 6), cfg.noise_intensity, 0.5, seed=7, burn_in=100)
    P = spectral.lyapunov_solve(ss.A, cfg.noise_intensity * np.outer(ss.B_n, ss.B_n))
    want = ss.C @ P @ ss.C.T
    got = np.cov(X.data.T)
    assert np.linalg.norm(got - want) <= 0.05 * np.linalg.norm(want)


def test_simulate_linear_is_seed_deterministic():
    ss = rv.rlc_state_space(rv.RlcConfig())
    u = np.random.default_rng(0).standard_normal(300)
    a = rv.simulate_linear(ss, u, 1.0, 0.5, seed=4).data
    b = rv.simulate_linear(ss, u, 1.0, 0.5, seed=4).data
    c = rv.simulate_linear(ss, u, 1.0, 0.5, seed=5).data
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, c)


def test_steady_state_split_cases():
    ss = rv.rlc_state_space(rv.RlcConfig())
    sp = rv.steady_state_split(ss, 1.0, 0.0)
    assert np.all(sp.N == 0)
    np.testing.assert_allclose(sp.Sigma, sp.S)
    assert np.all(rv.steady_state_split(ss, 0.0, 1.0).S == 0)


def test_noise_covariance_is_linear_in_temperature():
    N = {}
    for T in (0.3, 1.7):
        cfg = rv.RlcConfig(T=T, readout="state")
        N[T] = rv.steady_state_split(rv.rlc_state_space(cfg), 1.0, cfg.noise_intensity).N
    np.testing.assert_allclose(N[1.7], N[0.3] * (1.7 / 0.3), rtol=1e-12)


def test_duffing_unforced_stays_at_rest():
    cfg = rv.DuffingConfig(beta=0.0, T=0.0, hold=40, burn_in=5)
    y = rv.simulate_duffing(cfg, np.zeros(20), seed=0)
    assert np.max(np.abs(y.data)) < 1e-8


def test_duffing_linear_response_matches_transfer_function():
    cfg = rv.DuffingConfig(beta=0.0, T=0.0, hold=320, burn_in=20)
    X = rv.duffing_readout(cfg, np.ones(200), seed=0)
    amp = np.hypot(X.data[-20:, 0], X.data[-20:, 1])
    H = cfg.alpha_s / abs(cfg.alpha - cfg.omega ** 2 + 1j * cfg.delta * cfg.omega)
    np.testing.assert_allclose(amp, H, rtol=0.02)


def test_duffing_divergence_raises():
    cfg = rv.DuffingConfig(beta=-5.0, alpha_s=5.0, T=0.0, hold=40, burn_in=1)
    with pytest.raises(DivergedTrajectory):
        rv.simulate_duffing(cfg, 10 * np.ones(50), seed=0)


def test_demodulate_pure_carrier():
    dt = 2 * math.pi / 40
    t = np.arange(40 * 400) * dt
    edge = rv.lowpass_taps(0.1, dt).size
    A = rv.demodulate_lpf(np.cos(t), 1.0, 0.1, dt).data[edge:-edge]
    np.testing.assert_allclose(A, np.tile([1.0, 0.0], (len(A), 1)), atol=1e-3)
    B = rv.demodulate_lpf(np.sin(t), 1.0, 0.1, dt).data[edge:-edge]
    np.testing.assert_allclose(B, np.tile([0.0, -1.0], (len(B), 1)), atol=1e-3)


def test_demodulate_two_tone_beat():
    dt, Om = 2 * math.pi / 40, 0.1
    t = np.arange(40 * 1200) * dt
    y = np.cos((1 + Om / 4) * t) + np.cos((1 - Om / 4) * t)
    edge = rv.lowpass_taps(Om, dt).size
    mag = np.hypot(*rv.demodulate_lpf(y, 1.0, Om, dt).data[edge:-edge].T)
    np.testing.assert_allclose(mag, np.abs(2 * np.cos(Om / 4 * t[edge:-edge])), atol=5e-3)


def test_sampled_demodulation_matches_full_filter():
    cfg = rv.DuffingConfig(beta=0.3, T=1.0, hold=40, burn_in=5)
    u = np.random.default_rng(2).standard_normal(120)
    raw = rv.simulate_duffing(cfg, u, seed=3)
    full = rv.sample_envelope(rv.demodulate_lpf(raw, cfg.omega, cfg.Omega_lpf), cfg.hold, rv.filter_edge_samples(cfg))
    fast = rv.duffing_readout(cfg, u, seed=3)
    assert fast.t0 == full.t0
    np.testing.assert_allclose(fast.data, full.data, atol=1e-12)


def test_envelope_params():
    assert rv.duffing_envelope_params(rv.DuffingConfig(beta=0.0), 0.0).mu == 0
    assert rv.duffing_envelope_params(rv.DuffingConfig(beta=8.0, omega=3.0, dt=2 * math.pi / 120), 0.0).mu == 1
    assert rv.duffing_envelope_params(rv.DuffingConfig(alpha_s=2.0, omega=1.0), 0.0).kappa == 1


def test_trial_ensemble_noise_free_and_determinism():
    ss = rv.rlc_state_space(rv.RlcConfig(T=0.0))
    u = np.random.default_rng(1).standard_normal(300)
    ens = rv.run_trial_ensemble(ss, u, 3, seed=9, dt=0.5, noise_intensity=0.0)
    for tr in ens.trials[1:]:
        np.testing.assert_array_equal(tr.data, ens.trials[0].data)
    noisy = rv.rlc_state_space(rv.RlcConfig())
    a = rv.run_trial_ensemble(noisy, u, 2, seed=9, dt=0.5, noise_intensity=1.0)
    b = rv.run_trial_ensemble(noisy, u, 2, seed=9, dt=0.5, noise_intensity=1.0)
    for x, y in zip(a.trials, b.trials):
        np.testing.assert_array_equal(x.data, y.data)


def test_trial_mean_matches_noise_free_run():
    cfg = rv.RlcConfig()
    ss = rv.rlc_state_space(cfg)
    u = np.random.default_rng(3).standard_normal(400)
    ens = rv.run_trial_ensemble(ss, u, 500, seed=1, dt=0.5, noise_intensity=cfg.noise_intensity, burn_in=0)
    X = ens.stacked()
    clean = rv.simulate_linear(ss, u, 0.0, 0.5, seed=0).data
    se = X.std(axis=0, ddof=1) / math.sqrt(ens.K)
    z = np.abs(X.mean(axis=0) - clean) / np.maximum(se, 1e-12)
    # 3 standard errors, allowing the expected handful of excursions
    assert np.mean(z[10:] > 3) < 0.01


def test_ragged_ensemble_rejected():
    a = rv.ReadoutSeries(np.zeros((5, 1)), 1.0)
    b = rv.ReadoutSeries(np.zeros((6, 1)), 1.0)
    with pytest.raises(InvalidInput):
        rv.TrialEnsemble(np.zeros(6), [a, b])
