"""Cyclic Jacobi eigensolver for small symmetric matrices and a PCA built on it."""

from __future__ import annotations

import math

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted


def jacobi_eigh(A, tol: float = 1e-12, max_sweeps: int = 100) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (descending) and column eigenvectors of a symmetric matrix.

    Sweeps rotate every off-diagonal pair in row-major order until the
    off-diagonal Frobenius norm is at most ``tol`` times the matrix norm
    (or ``tol`` in absolute terms for tiny matrices).  Each eigenvector is
    oriented so that its first entry with magnitude above 1e-12 is positive.
    """
    A = np.array(A, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    if not np.allclose(A, A.T, rtol=0, atol=1e-12 * max(1.0, np.abs(A).max(initial=0))):
        raise ValueError("matrix is not symmetric")
    A = (A + A.T) / 2
    n = A.shape[0]
    V = np.eye(n)
    offdiag = ~np.eye(n, dtype=bool)
    threshold = tol * max(1.0, math.sqrt(float(np.sum(A * A))))
    for _ in range(max_sweeps):
        off = math.sqrt(float(np.sum(A[offdiag] ** 2)))
        if off <= threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                h = A[q, q] - A[p, p]
                if abs(h) + 1e3 * abs(apq) == abs(h):
                    t = apq / h  # theta would overflow; tan(phi) ~ 1 / (2 theta)
                else:
                    theta = h / (2.0 * apq)
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                # A <- J^T A J with J the (p, q) Givens rotation.
                ap, aq = A[:, p].copy(), A[:, q].copy()
                A[:, p] = c * ap - s * aq
                A[:, q] = s * ap + c * aq
                ap, aq = A[p, :].copy(), A[q, :].copy()
                A[p, :] = c * ap - s * aq
                A[q, :] = s * ap + c * aq
                A[p, q] = A[q, p] = 0.0
                vp, vq = V[:, p].copy(), V[:, q].copy()
                V[:, p] = c * vp - s * vq
                V[:, q] = s * vp + c * vq
    else:
        raise ArithmeticError("Jacobi iteration did not converge")
    values = np.diag(A).copy()
    order = sorted(range(n), key=lambda i: (-values[i], i))
    values, V = values[order], V[:, order]
    for k in range(n):
        nz = np.flatnonzero(np.abs(V[:, k]) > 1e-12)
        if nz.size and V[nz[0], k] < 0:
            V[:, k] = -V[:, k]
    return values, V


class JacobiPCA(TransformerMixin, BaseEstimator):
    """Principal component analysis via :func:`jacobi_eigh` on the covariance.

    Attributes
    ----------
    mean_ : ndarray of shape (n_features,)
    components_ : ndarray of shape (n_components, n_features)
    explained_variance_ : ndarray of shape (n_components,)
    total_variance_ : float
    """

    def __init__(self, n_components: int = 2, tol: float = 1e-12):
        self.n_components = n_components
        self.tol = tol

    def fit(self, X, y=None):
        X = check_array(X, dtype=np.float64, ensure_min_samples=2)
        if self.n_components > X.shape[1]:
            raise ValueError(f"n_components={self.n_components} exceeds "
                             f"n_features={X.shape[1]}")
        self.mean_ = X.mean(axis=0)
        Xc = X - self.mean_
        cov = Xc.T @ Xc / (X.shape[0] - 1)
        values, vectors = jacobi_eigh(cov, tol=self.tol)
        self.components_ = vectors[:, : self.n_components].T
        self.explained_variance_ = np.clip(values[: self.n_components], 0.0, None)
        self.total_variance_ = float(np.trace(cov))
        return self

    def transform(self, X):
        check_is_fitted(self, "components_")
        X = check_array(X, dtype=np.float64)
        return (X - self.mean_) @ self.components_.T
