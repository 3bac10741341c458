"""Hermitian eigenvalue problems.

Small matrices go through a cyclic complex Jacobi sweep written here; above
``JACOBI_MAX_DIM`` the LAPACK driver behind :func:`numpy.linalg.eigh` is
used.  Both are deterministic for a given input.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError

JACOBI_MAX_DIM = 64
HERMITIAN_TOL = 1e-12


def _check_hermitian(H: np.ndarray) -> np.ndarray:
    H = np.asarray(H, dtype=np.complex128)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {H.shape}")
    scale = max(np.linalg.norm(H), 1.0)
    if np.linalg.norm(H - H.conj().T) > HERMITIAN_TOL * scale:
        raise DomainError("matrix is not Hermitian")
    return (H + H.conj().T) / 2


def off_norm(A: np.ndarray) -> float:
    return float(np.linalg.norm(A - np.diag(np.diag(A))))


def jacobi_eigh(H, tol: float = 1e-14, max_sweeps: int = 100) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi: eigenvalues ascending and unitary eigenvectors (columns).

    Sweeps run in row-major (p, q) order until the off-diagonal Frobenius
    norm drops below ``tol * ||H||_F``.
    """
    A = _check_hermitian(H).copy()
    n = A.shape[0]
    V = np.eye(n, dtype=np.complex128)
    target = tol * max(np.linalg.norm(A), np.finfo(float).tiny)
    for _ in range(max_sweeps):
        if off_norm(A) <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                h = A[p, q]
                mag = abs(h)
                if mag == 0.0:
                    continue
                phase = h / mag
                theta = 0.5 * np.arctan2(2 * mag, A[q, q].real - A[p, p].real)
                c, s = np.cos(theta), np.sin(theta)
                # Q = diag(1, conj(phase)) @ [[c, s], [-s, c]]
                Q = np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]])
                cols = [p, q]
                A[:, cols] = A[:, cols] @ Q
                A[cols, :] = Q.conj().T @ A[cols, :]
                A[p, q] = A[q, p] = 0.0
                A[p, p] = A[p, p].real
                A[q, q] = A[q, q].real
                V[:, cols] = V[:, cols] @ Q
    else:
        if off_norm(A) > target:
            raise RuntimeError("Jacobi iteration did not converge")
    w = np.diag(A).real
    order = np.argsort(w, kind="stable")
    return w[order], V[:, order]


def hermitian_eigh(H, method: str = "auto") -> tuple[np.ndarray, np.ndarray]:
    """Eigenpairs of a Hermitian matrix; ``method`` in {auto, jacobi, lapack}."""
    H = _check_hermitian(H)
    if method == "auto":
        method = "jacobi" if H.shape[0] <= JACOBI_MAX_DIM else "lapack"
    if method == "jacobi":
        return jacobi_eigh(H)
    if method == "lapack":
        w, V = np.linalg.eigh(H)
        return w, V
    raise ValueError(f"unknown method {method!r}")


def hermitian_spectrum(H, method: str = "auto") -> np.ndarray:
    """Sorted real eigenvalues of a Hermitian matrix."""
    return hermitian_eigh(H, method)[0]
