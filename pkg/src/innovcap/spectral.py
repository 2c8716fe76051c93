"""Dense symmetric linear-algebra kernels.

Everything here works on small dense matrices (a few hundred rows at most).
Inputs that are meant to be symmetric are symmetrized as ``(A + A.T) / 2`` on
entry, which absorbs the asymmetry that accumulates in covariance estimates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput, NoConvergence, NotPSD, UnstableSystem

#: Relative eigenvalue cutoff (w.r.t. the largest eigenvalue) used for ranks.
REL_TOL = 1e-10


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenpairs of a symmetric matrix, eigenvalues in descending order."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        V = self.eigenvectors
        return (V * self.eigenvalues) @ V.T


@dataclass(frozen=True)
class RankInfo:
    rank: int
    threshold: float
    retained_eigenvalues: np.ndarray


def symmetrize(A) -> np.ndarray:
    """Return ``(A + A.T) / 2`` as a float array after validating shape and finiteness."""
    A = np.asarray(A, dtype=float)
    if A.ndim == 0:
        A = A.reshape(1, 1)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InvalidInput(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InvalidInput("matrix has non-finite entries")
    return 0.5 * (A + A.T)


def sym_eig(A) -> EigenDecomposition:
    """Eigendecomposition of a symmetric matrix with descending eigenvalues."""
    A = symmetrize(A)
    w, V = np.linalg.eigh(A)
    return EigenDecomposition(w[::-1].copy(), V[:, ::-1].copy())


def _psd_eig(A, rel_tol: float) -> tuple[EigenDecomposition, np.ndarray]:
    """Eigendecomposition plus a mask of eigenvalues above ``rel_tol * lambda_max``.

    Raises NotPSD when an eigenvalue is below ``-rel_tol * lambda_max``.
    """
    eig = sym_eig(A)
    w = eig.eigenvalues
    scale = max(w[0], 0.0) if w.size else 0.0
    if w.size and w[-1] < -rel_tol * max(scale, np.abs(w).max()):
        raise NotPSD(f"matrix is indefinite: min eigenvalue {w[-1]:.3e}, max {w[0]:.3e}")
    keep = w > rel_tol * scale if scale > 0 else np.zeros(w.shape, dtype=bool)
    return eig, keep


def rank_info(A, rel_tol: float = REL_TOL) -> RankInfo:
    eig, keep = _psd_eig(A, rel_tol)
    return RankInfo(int(keep.sum()), rel_tol, eig.eigenvalues[keep])


def range_basis(A, rel_tol: float = REL_TOL) -> np.ndarray:
    """Orthonormal columns spanning the range of a PSD matrix."""
    eig, keep = _psd_eig(A, rel_tol)
    return eig.eigenvectors[:, keep]


def _spectral_function(A, rel_tol, fn) -> np.ndarray:
    eig, keep = _psd_eig(A, rel_tol)
    V = eig.eigenvectors[:, keep]
    return (V * fn(eig.eigenvalues[keep])) @ V.T


def pinv(A, rel_tol: float = REL_TOL) -> np.ndarray:
    """Moore-Penrose inverse of a symmetric PSD matrix.

    Eigenvalues at or below ``rel_tol * lambda_max`` are treated as zero.
    """
    return _spectral_function(A, rel_tol, lambda w: 1.0 / w)


def pinv_sqrt(A, rel_tol: float = REL_TOL) -> np.ndarray:
    """Symmetric pseudo-inverse square root ``A^{+/2}``.

    ``pinv_sqrt(A) @ A @ pinv_sqrt(A)`` is the orthogonal projector onto range(A).
    """
    return _spectral_function(A, rel_tol, lambda w: 1.0 / np.sqrt(w))


def psd_sqrt(A, rel_tol: float = REL_TOL) -> np.ndarray:
    return _spectral_function(A, rel_tol, np.sqrt)


def range_projector(A, rel_tol: float = REL_TOL) -> np.ndarray:
    U = range_basis(A, rel_tol)
    return U @ U.T


def clip_psd(A) -> np.ndarray:
    """Nearest PSD matrix in Frobenius norm (negative eigenvalues set to zero)."""
    eig = sym_eig(A)
    w = np.clip(eig.eigenvalues, 0.0, None)
    V = eig.eigenvectors
    return symmetrize((V * w) @ V.T)


def pencil_eig(N0, S, rel_tol: float = REL_TOL) -> np.ndarray:
    """Finite generalized eigenvalues of the symmetric pencil ``(N0, S)``.

    Returns the ``rank(S)`` values ``lam >= 0`` for which ``N0 v = lam S v`` has a
    solution with ``S v != 0``, in descending order.

    The problem is reduced to range(S). Directions in null(S) are eliminated
    through the Schur complement of ``N0`` on null(S); when ``N0`` does not couple
    range(S) to null(S) this is just the spectrum of ``S^{+/2} N0 S^{+/2}`` on
    range(S).
    """
    N0 = symmetrize(N0)
    S = symmetrize(S)
    if N0.shape != S.shape:
        raise InvalidInput("pencil matrices must have the same shape")
    _psd_eig(N0, rel_tol)
    eig, keep = _psd_eig(S, rel_tol)
    if not keep.any():
        return np.zeros(0)
    U = eig.eigenvectors[:, keep]
    W = eig.eigenvectors[:, ~keep]
    s = eig.eigenvalues[keep]
    schur = U.T @ N0 @ U
    if W.shape[1]:
        nww = W.T @ N0 @ W
        nwu = W.T @ N0 @ U
        schur = schur - nwu.T @ pinv(nww, rel_tol) @ nwu
    scale = 1.0 / np.sqrt(s)
    M = symmetrize(schur * scale[:, None] * scale[None, :])
    lam = np.linalg.eigvalsh(M)[::-1]
    return np.clip(lam, 0.0, None)


def pencil_eigvecs(N0, S, rel_tol: float = REL_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Like :func:`pencil_eig` but also returns full-space eigenvectors as columns."""
    N0 = symmetrize(N0)
    S = symmetrize(S)
    eig, keep = _psd_eig(S, rel_tol)
    U = eig.eigenvectors[:, keep]
    W = eig.eigenvectors[:, ~keep]
    s = eig.eigenvalues[keep]
    nuu = U.T @ N0 @ U
    if W.shape[1]:
        nww_pinv = pinv(W.T @ N0 @ W, rel_tol)
        nwu = W.T @ N0 @ U
        nuu = nuu - nwu.T @ nww_pinv @ nwu
    scale = 1.0 / np.sqrt(s)
    lam, B = np.linalg.eigh(symmetrize(nuu * scale[:, None] * scale[None, :]))
    lam, B = lam[::-1], B[:, ::-1]
    a = B * scale[:, None]
    v = U @ a
    if W.shape[1]:
        v = v - W @ (nww_pinv @ (nwu @ a))
    return np.clip(lam, 0.0, None), v


def lyapunov_solve(A, Q) -> np.ndarray:
    """Solve ``A P + P A^T + Q = 0`` for Hurwitz ``A`` by Kronecker vectorization.

    Intended for small state dimensions (d <= ~50); the linear system has d^2 unknowns.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InvalidInput(f"drift matrix must be square, got {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InvalidInput("drift matrix has non-finite entries")
    Q = symmetrize(Q)
    if Q.shape != A.shape:
        raise InvalidInput("Q must match the shape of A")
    _psd_eig(Q, REL_TOL)
    if np.max(np.linalg.eigvals(A).real) >= 0:
        raise UnstableSystem("drift matrix is not Hurwitz")
    d = A.shape[0]
    eye = np.eye(d)
    # row-major vec: vec(A P) = (A kron I) vec(P), vec(P A^T) = (I kron A) vec(P)
    K = np.kron(A, eye) + np.kron(eye, A)
    P = np.linalg.solve(K, -Q.reshape(-1)).reshape(d, d)
    return symmetrize(P)


def pseudo_det(A, rel_tol: float = REL_TOL) -> float:
    """Product of eigenvalues above ``rel_tol * lambda_max``; 1 for the zero matrix."""
    eig, keep = _psd_eig(A, rel_tol)
    return float(np.prod(eig.eigenvalues[keep]))


def log_pseudo_det(A, rel_tol: float = REL_TOL) -> float:
    eig, keep = _psd_eig(A, rel_tol)
    return float(np.sum(np.log(eig.eigenvalues[keep])))


def nnls(A, b, max_iter: int | None = None, tol: float | None = None) -> np.ndarray:
    """Nonnegative least squares ``min ||A x - b||_2 s.t. x >= 0``.

    Lawson-Hanson active-set method. Columns that are identically zero never
    enter the passive set, so their coefficients stay at zero.

    Parameters
    ----------
    A : array_like, shape (m, n)
    b : array_like, shape (m,)
    max_iter : int, optional
        Cap on outer iterations (default ``30 * n``).
    tol : float, optional
        Dual-feasibility tolerance on the gradient ``A^T (b - A x)``.

    Returns
    -------
    x : ndarray, shape (n,)
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float).reshape(-1)
    m, n = A.shape
    if b.shape[0] != m:
        raise InvalidInput("A and b have incompatible shapes")
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
        raise InvalidInput("nnls inputs must be finite")
    if max_iter is None:
        max_iter = 30 * max(n, 1)
    if tol is None:
        tol = 10 * np.finfo(float).eps * max(m, n) * max(1.0, np.abs(A).max(initial=0.0)) * max(
            1.0, np.abs(b).max(initial=0.0)
        )

    x = np.zeros(n)
    passive = np.zeros(n, dtype=bool)
    w = A.T @ (b - A @ x)
    it = 0
    while (~passive).any() and np.max(np.where(passive, -np.inf, w)) > tol:
        it += 1
        if it > max_iter:
            raise NoConvergence(f"nnls did not converge in {max_iter} iterations")
        j = int(np.argmax(np.where(passive, -np.inf, w)))
        passive[j] = True
        while True:
            z = np.zeros(n)
            z[passive] = np.linalg.lstsq(A[:, passive], b, rcond=None)[0]
            if np.all(z[passive] > 0):
                x = z
                break
            it += 1
            if it > max_iter:
                raise NoConvergence(f"nnls did not converge in {max_iter} iterations")
            blocking = passive & (z <= 0)
            step = np.min(x[blocking] / (x[blocking] - z[blocking]))
            x = x + step * (z - x)
            passive &= x > tol
            x[~passive] = 0.0
        w = A.T @ (b - A @ x)
    return x
