import numpy as np
import pytest
import scipy.linalg
import scipy.optimize
from hypothesis import given, settings
from hypothesis import strategies as st

from innovcap import spectral
from innovcap.errors import NotPSD, UnstableSystem

from conftest import random_psd


def test_sym_eig_identity_and_diagonal():
    np.testing.assert_allclose(spectral.sym_eig(np.eye(3)).eigenvalues, [1, 1, 1])
    np.testing.assert_allclose(spectral.sym_eig(np.diag([2.0, 5.0])).eigenvalues, [5, 2])


def test_sym_eig_reconstruction(rng):
    A = rng.standard_normal((6, 6))
    A = A + A.T
    e = spectral.sym_eig(A)
    V, w = e.eigenvectors, e.eigenvalues
    assert np.linalg.norm(A - V @ np.diag(w) @ V.T) / max(1, np.linalg.norm(A)) < 1e-10
    np.testing.assert_allclose(V.T @ V, np.eye(6), atol=1e-10)
    assert np.all(np.diff(w) <= 0)


def test_symmetrize_and_shape_checks():
    np.testing.assert_array_equal(spectral.symmetrize([[1.0, 2.0], [0.0, 1.0]]), [[1, 1], [1, 1]])
    with pytest.raises(ValueError):
        spectral.symmetrize(np.ones((2, 3)))
    with pytest.raises(ValueError):
        spectral.symmetrize([[np.nan]])


def test_pinv_examples():
    np.testing.assert_allclose(spectral.pinv(np.diag([2.0, 0.0])), np.diag([0.5, 0.0]))
    np.testing.assert_allclose(spectral.pinv(np.eye(4)), np.eye(4))


def test_pinv_penrose(rng):
    A = random_psd(rng, 5, 3)
    P = spectral.pinv(A)
    for err in (A @ P @ A - A, P @ A @ P - P, (A @ P).T - A @ P, (P @ A).T - P @ A):
        assert np.max(np.abs(err)) < 1e-8
    assert spectral.rank_info(A).rank == 3


def test_pinv_rejects_indefinite():
    with pytest.raises(NotPSD):
        spectral.pinv(np.diag([1.0, -0.5]))


def test_pinv_sqrt_whitens_to_projector(rng):
    np.testing.assert_allclose(spectral.pinv_sqrt(np.diag([4.0, 0.0])), np.diag([0.5, 0.0]))
    np.testing.assert_allclose(spectral.pinv_sqrt(np.eye(3)), np.eye(3))
    A = random_psd(rng, 6, 4)
    W = spectral.pinv_sqrt(A)
    e = spectral.sym_eig(A)
    U = e.eigenvectors[:, :4]
    np.testing.assert_allclose(W @ A @ W, U @ U.T, atol=1e-9)
    np.testing.assert_allclose(spectral.range_projector(A), U @ U.T, atol=1e-10)


def test_pencil_examples():
    np.testing.assert_allclose(spectral.pencil_eig(np.diag([1.0, 4.0]), np.eye(2)), [4, 1])
    np.testing.assert_allclose(spectral.pencil_eig(np.zeros((3, 3)), random_psd(np.random.default_rng(0), 3)), 0)


def test_pencil_dense_similarity_oracle(rng):
    S = random_psd(rng, 3)
    N0 = random_psd(rng, 3, 2)
    Sm = scipy.linalg.fractional_matrix_power(S, -0.5).real
    want = np.sort(np.linalg.eigvalsh(Sm @ N0 @ Sm))[::-1]
    np.testing.assert_allclose(spectral.pencil_eig(N0, S), want, atol=1e-9)


def test_pencil_singular_S_uses_range_of_S():
    # N0 couples range(S) to null(S); the pencil eigenvalue on range(S) is zero
    lam = spectral.pencil_eig(np.ones((2, 2)), np.diag([1.0, 0.0]))
    np.testing.assert_allclose(lam, [0.0], atol=1e-12)


def test_pencil_eigvecs_satisfy_pencil(rng):
    for _ in range(20):
        S = random_psd(rng, 5, int(rng.integers(1, 6)))
        N = random_psd(rng, 5, int(rng.integers(0, 6)))
        lam, v = spectral.pencil_eigvecs(N, S)
        np.testing.assert_allclose(N @ v, S @ v * lam, atol=1e-7 * max(1, np.abs(N).max()))


def test_lyapunov_examples(rng):
    np.testing.assert_allclose(spectral.lyapunov_solve(-np.eye(2), np.eye(2)), np.eye(2) / 2)
    np.testing.assert_allclose(spectral.lyapunov_solve(-np.eye(2), np.zeros((2, 2))), 0)
    M = rng.standard_normal((4, 4))
    A = M - (np.linalg.eigvals(M).real.max() + 1) * np.eye(4)
    Q = random_psd(rng, 4)
    P = spectral.lyapunov_solve(A, Q)
    assert np.max(np.abs(A @ P + P @ A.T + Q)) < 1e-9
    np.testing.assert_allclose(P, scipy.linalg.solve_continuous_lyapunov(A, -Q), atol=1e-9)


def test_lyapunov_rejects_unstable():
    with pytest.raises(UnstableSystem):
        spectral.lyapunov_solve(np.eye(2), np.eye(2))


def test_pseudo_det(rng):
    assert spectral.pseudo_det(np.diag([2.0, 3.0, 0.0])) == pytest.approx(6.0)
    assert spectral.pseudo_det(np.zeros((3, 3))) == 1.0
    A = random_psd(rng, 4, 2)
    w = spectral.sym_eig(A).eigenvalues
    assert spectral.pseudo_det(A) == pytest.approx(w[0] * w[1], rel=1e-10)


def test_nnls_examples(rng):
    np.testing.assert_allclose(spectral.nnls(np.eye(2), np.array([1.0, -1.0])), [1, 0])
    np.testing.assert_allclose(spectral.nnls(rng.standard_normal((5, 3)), np.zeros(5)), 0)
    A = rng.standard_normal((10, 3))
    x_star = np.array([0.5, 0.0, 2.0])
    np.testing.assert_allclose(spectral.nnls(A, A @ x_star), x_star, atol=1e-6)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(3, 15), st.integers(1, 6))
def test_nnls_matches_scipy(seed, n, k):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((n, k))
    b = rng.standard_normal(n)
    x = spectral.nnls(A, b)
    ref, _ = scipy.optimize.nnls(A, b)
    assert np.all(x >= 0)
    assert np.linalg.norm(A @ x - b) <= np.linalg.norm(A @ ref - b) + 1e-9


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 8))
def test_rank_counts_eigenvalues_above_threshold(seed, d):
    rng = np.random.default_rng(seed)
    r = int(rng.integers(0, d + 1))
    A = random_psd(rng, d, r)
    info = spectral.rank_info(A)
    assert info.rank == r
    assert spectral.range_basis(A).shape == (d, r)
