import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from newsclust.linalg import JacobiPCA, jacobi_eigh

from oracles import symmetric_3x3_eigenvalues


def random_symmetric(rng, n):
    A = rng.normal(size=(n, n))
    return (A + A.T) / 2


@pytest.mark.parametrize("seed", range(20))
def test_eigenvalues_match_characteristic_polynomial_3x3(seed):
    A = random_symmetric(np.random.default_rng(seed), 3)
    values, _ = jacobi_eigh(A)
    np.testing.assert_allclose(values, symmetric_3x3_eigenvalues(A), atol=1e-9, rtol=0)


def test_diagonal_and_repeated_eigenvalues():
    values, V = jacobi_eigh(np.diag([1.0, 3.0, 2.0]))
    assert values.tolist() == [3.0, 2.0, 1.0]
    values, _ = jacobi_eigh(np.eye(4) * 2)
    assert values.tolist() == [2.0] * 4


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 14), st.integers(0, 10**6))
def test_decomposition_reconstructs(n, seed):
    A = random_symmetric(np.random.default_rng(seed), n)
    values, V = jacobi_eigh(A)
    np.testing.assert_allclose(V @ np.diag(values) @ V.T, A, atol=1e-10)
    np.testing.assert_allclose(V.T @ V, np.eye(n), atol=1e-12)
    assert np.all(np.diff(values) <= 0)
    for k in range(n):
        first = V[np.flatnonzero(np.abs(V[:, k]) > 1e-12)[0], k]
        assert first > 0


def test_rejects_non_symmetric():
    with pytest.raises(ValueError):
        jacobi_eigh(np.array([[0.0, 1.0], [0.0, 0.0]]))


@pytest.mark.parametrize("ambient", [3, 4, 7])
def test_pca_preserves_distances_in_plane(ambient):
    rng = np.random.default_rng(ambient)
    basis, _ = np.linalg.qr(rng.normal(size=(ambient, 2)))
    coeffs = rng.normal(size=(9, 2)) * [3.0, 1.0]
    X = coeffs @ basis.T + rng.normal(size=ambient)
    Y = JacobiPCA(2).fit_transform(X)
    for i, j in itertools.combinations(range(len(X)), 2):
        assert abs(np.linalg.norm(Y[i] - Y[j]) - np.linalg.norm(X[i] - X[j])) <= 1e-9


def test_pca_collinear_second_component_vanishes():
    X = np.array([[0.0, 0, 0], [1, 2, 3], [2, 4, 6]])
    pca = JacobiPCA(2).fit(X)
    assert pca.explained_variance_[1] == pytest.approx(0.0, abs=1e-12)
    assert pca.explained_variance_[0] >= pca.explained_variance_[1]


def test_pca_variance_bounds(rng):
    X = rng.normal(size=(12, 5))
    pca = JacobiPCA(2).fit(X)
    Y = pca.transform(X)
    assert pca.explained_variance_.sum() <= pca.total_variance_ + 1e-12
    np.testing.assert_allclose(Y.var(axis=0, ddof=1), pca.explained_variance_, rtol=1e-10)
    assert JacobiPCA(2).get_params() == {"n_components": 2, "tol": 1e-12}
    with pytest.raises(ValueError):
        JacobiPCA(6).fit(X)
