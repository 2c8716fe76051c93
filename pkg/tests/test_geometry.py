import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from innovcap import geometry as geo
from innovcap import spectral
from innovcap.errors import InvalidInput, PreconditionFailed
from innovcap.reservoir import CovarianceSplit

from conftest import random_psd


def _split(rng, d, rs=None, rn=None):
    rs = int(rng.integers(0, d + 1)) if rs is None else rs
    rn = int(rng.integers(0, d + 1)) if rn is None else rn
    return CovarianceSplit.from_parts(random_psd(rng, d, rs), random_psd(rng, d, rn))


def test_capacity_traces_examples(rng):
    S = random_psd(rng, 4, 2)
    assert geo.capacity_traces(CovarianceSplit.from_parts(S, np.zeros((4, 4)))) == pytest.approx((2, 0))
    c = geo.capacity_traces(CovarianceSplit.from_parts(np.eye(2), np.diag([1.0, 4.0])))
    assert c == pytest.approx((0.7, 1.3), abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(2, 12))
def test_conservation_property(seed, d):
    sp = _split(np.random.default_rng(seed), d)
    c_ip, c_i = geo.capacity_traces(sp)
    assert c_ip + c_i == pytest.approx(sp.rank.rank, abs=1e-8)
    assert -1e-10 <= c_ip and -1e-10 <= c_i


def test_shrinkage_examples(rng):
    spec = geo.pencil_spectrum(np.eye(2), np.diag([1.0, 4.0]))
    assert geo.shrinkage_capacities(spec, 1.0)[0] == pytest.approx(0.7, abs=1e-12)
    sp = _split(rng, 5, 3, 5)
    spec = geo.pencil_spectrum(sp.S, sp.N)
    # at T = 0 the noise directions leave the range, so C_i = 0 rather than r - r_S
    assert geo.shrinkage_capacities(spec, 0.0) == (spec.r_S, 0)
    assert geo.shrinkage_capacities(spec, 1e-9)[1] == pytest.approx(spec.r - spec.r_S, abs=1e-6)
    assert geo.shrinkage_capacities(spec, 1e12)[0] < 1e-9
    with pytest.raises(InvalidInput):
        geo.shrinkage_capacities(spec, -1.0)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(2, 8), st.one_of(st.just(0.0), st.floats(1e-6, 20.0)))
def test_shrinkage_matches_traces(seed, d, T):
    sp = _split(np.random.default_rng(seed), d)
    a = geo.shrinkage_capacities(geo.pencil_spectrum(sp.S, sp.N), T)
    b = geo.capacity_traces(CovarianceSplit.from_parts(sp.S, T * sp.N))
    assert a == pytest.approx(b, abs=1e-8)


def test_whitened_geometry_cases(rng):
    S = random_psd(rng, 4, 3)
    g = geo.whitened_geometry(CovarianceSplit.from_parts(S, np.zeros((4, 4))))
    np.testing.assert_allclose(g.gammas, 1, atol=1e-10)
    np.testing.assert_allclose(g.Gamma_full, spectral.range_projector(S), atol=1e-9)
    assert g.innov_dim == 0
    g = geo.whitened_geometry(CovarianceSplit.from_parts(S / 2, S / 2))
    np.testing.assert_allclose(g.gammas, 0.5, atol=1e-10)
    assert g.pred_log_volume == pytest.approx(g.innov_log_volume)
    sp = _split(rng, 6)
    g = geo.whitened_geometry(sp)
    assert g.C_ip == pytest.approx(geo.capacity_traces(sp)[0], abs=1e-8)
    assert g.C_ip + g.C_i == pytest.approx(g.r, abs=1e-8)
    np.testing.assert_allclose(g.complement_gammas, 1 - g.gammas)


def test_tau_subspace_hand_example():
    # whitened covariance with gamma = (0.9, 0.5, 0.1)
    S = np.diag([0.9, 0.5, 0.1])
    g = geo.whitened_geometry(CovarianceSplit.from_parts(S, np.eye(3) - S))
    ts = geo.tau_subspace(g, 0.3)
    assert ts.L_tau == 2
    assert ts.bounds == pytest.approx(((1.5 - 0.9) / 0.7, 5.0))
    np.testing.assert_allclose(ts.P_tau @ ts.P_tau.T, np.eye(2), atol=1e-10)
    assert ts.floor_min_eig >= 0.3 - 1e-10


def test_tau_subspace_limits(rng):
    g = geo.whitened_geometry(CovarianceSplit.from_parts(np.zeros((3, 3)), random_psd(rng, 3)))
    for tau in (0.1, 0.5, 0.99):
        assert geo.tau_subspace(g, tau).L_tau == 3
    g = geo.whitened_geometry(_split(rng, 4, 4, 4))
    assert geo.tau_subspace(g, 1 - 1e-9).L_tau == 0
    with pytest.raises(InvalidInput):
        geo.tau_subspace(g, 1.0)


def test_block_covariance_cases():
    K0 = np.array([[2.0, 0.5], [0.5, 1.0]])
    np.testing.assert_array_equal(geo.block_covariance([K0], 1), K0)
    B = geo.block_covariance([K0, np.zeros((2, 2))], 3)
    np.testing.assert_array_equal(B, np.kron(np.eye(3), K0))


def test_block_covariance_ar1_monte_carlo():
    rho, n = 0.4, 10 ** 6
    rng = np.random.default_rng(0)
    e = rng.standard_normal(n) * math.sqrt(1 - rho ** 2)
    y = np.empty(n)
    y[0] = rng.standard_normal()
    for t in range(1, n):
        y[t] = rho * y[t - 1] + e[t]
    blocks = np.lib.stride_tricks.sliding_window_view(y, 4)
    emp = np.cov(blocks.T)
    want = geo.block_covariance(geo.ar1_autocovs(rho, 3), 4)
    assert np.linalg.norm(emp - want) <= 0.05 * np.linalg.norm(want)


def test_block_floor_cases():
    K0 = np.diag([2.0, 3.0])
    rec = geo.block_floor_check([K0], 5, 1.0)
    assert rec.epsilon == 0 and rec.floor == 1.0 and rec.lambda_min == pytest.approx(2.0)
    K = geo.ar1_autocovs(0.1, 400)
    for b in (1, 2, 8, 32, 64):
        rec = geo.block_floor_check(K, b, 1.0)
        assert rec.epsilon == pytest.approx(1 / 9)
        assert rec.floor == pytest.approx(7 / 9)
        assert rec.holds and not rec.vacuous
    rec = geo.block_floor_check(geo.ar1_autocovs(0.5, 200), 16, 1.0)
    assert rec.floor <= 0 and rec.vacuous and rec.holds
    with pytest.raises(PreconditionFailed):
        geo.block_floor_check([np.eye(2) * 0.5], 2, 1.0)


def test_mixing_bound():
    rec = geo.mixing_cov_bound(np.zeros(5), 1.0, 2.0)
    assert np.all(rec.per_lag_bounds == 0) and rec.sum_bound == 0
    k = np.arange(1, 200)
    with pytest.warns(UserWarning):
        rec = geo.mixing_cov_bound(2.0 ** -k, 1.0, 2.0)
    np.testing.assert_allclose(rec.per_lag_bounds, 8 * 2.0 ** (-k / 2))
    assert rec.sum_bound == pytest.approx(8 / (math.sqrt(2) - 1), rel=1e-12)
    # boundary inclusion: sum of powered coefficients exactly tau / (32 M^2)
    rec = geo.mixing_cov_bound([1 / 64, 1 / 64], 1.0, 2.0, tau=8.0)
    assert rec.alpha_sum == pytest.approx(0.25) and rec.floor_condition is True


def test_entropy_bounds():
    for m in (1, 5, 64):
        b = geo.isotropic_entropy_bound(np.eye(m), (2 * math.pi) ** -0.5)
        assert b.bound_general == pytest.approx(m / 2 * math.log(2 * math.pi))
        assert geo.gaussian_entropy(np.eye(m)) - b.bound_general == pytest.approx(m / 2, abs=1e-10)
        assert b.bound_general == pytest.approx(b.bound_sigma)
    assert geo.isotropic_entropy_bound(np.eye(3), 1e300).bound_general < -1e3


def test_covering_bound():
    assert geo.covering_bound(0.0, 1, 0.5) == pytest.approx(0.0, abs=1e-15)
    assert geo.log_unit_ball_volume(2) == pytest.approx(math.log(math.pi))
    for m in (1, 7, 40):
        h = geo.isotropic_entropy_bound(np.eye(m), 0.3).bound_general
        step = geo.covering_bound(h, m, 0.1) - geo.covering_bound(h, m, 0.2)
        assert step == pytest.approx(m * math.log(2), abs=1e-10)


def test_cascade():
    assert geo.cascade_sensitivity(geo.CascadeParams(theta=0.0, B=2.0, L_depth=3, n_input=10)) == 0
    p = geo.CascadeParams(theta=0.6, B=2.0, L_depth=3, n_input=10)
    assert geo.cascade_sensitivity(p) == 1.0 and geo.cascade_is_vacuous(p)
    p = geo.CascadeParams(theta=0.25, B=2.0, L_depth=10, n_input=10)
    assert geo.cascade_sensitivity(p) == pytest.approx(10 * 0.5 ** 10, abs=1e-15)
    q = geo.CascadeParams(theta=0.25, B=2.0, L_depth=10, n_input=10, k_alphabet=4, H_pi=2.0)
    assert geo.cascade_entropy_floor(q, 0.0) == 2.0
    assert geo.f_k(0.5, 2) == pytest.approx(1.0)
    assert geo.cascade_entropy_floor(q, 0.1) == pytest.approx(1.3726, abs=1e-4)
    with pytest.raises(InvalidInput):
        geo.CascadeParams(theta=1.0, B=2.0, L_depth=1, n_input=1)


def _planted(a, betas=(0.0, 0.2, 0.5), temps=(0.0, 0.25, 0.5, 1.0, 2.0), seed=0):
    rng = np.random.default_rng(seed)
    out = {}
    for beta in betas:
        S, N1 = random_psd(rng, 2), random_psd(rng, 2)
        Nbar = 0.5 * np.trace(N1)
        for T in temps:
            g = sum(ak * T ** (k + 1) for k, ak in enumerate(a))
            out[(beta, T)] = CovarianceSplit.from_parts(S, T * N1 + abs(beta) ** 3 * g * Nbar * np.eye(2))
    return out


def test_covfit_plant_and_recover():
    model = geo.duffing_covfit(_planted([0.0, 0.3]), 3)
    for beta, fit in model.per_beta.items():
        want = [0, 0.3, 0] if beta else [0, 0, 0]
        np.testing.assert_allclose(fit.a, want, atol=1e-6)
        assert fit.r2 == pytest.approx(1.0)
        for T in fit.temps:
            sim = geo.capacity_traces(_planted([0.0, 0.3])[(beta, T)])[0]
            assert fit.deterministic_capacity(T) == pytest.approx(sim, abs=1e-8)


def test_covfit_linear_system_has_zero_coefficients():
    model = geo.duffing_covfit(_planted([0.0, 0.0, 0.0]), 3)
    for fit in model.per_beta.values():
        np.testing.assert_allclose(fit.a, 0, atol=1e-10)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.floats(0, 1), st.floats(0, 1))
def test_covfit_coefficients_nonnegative(seed, a2, a3):
    model = geo.duffing_covfit(_planted([0.0, a2, a3], seed=seed), 3)
    for fit in model.per_beta.values():
        assert np.all(fit.a >= 0)
