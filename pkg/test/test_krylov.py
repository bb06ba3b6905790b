''' Krylov propagator tests '''
import pytest
import numpy as np
import scipy.linalg

from rubyqsl.krylov import lanczos_iteration, propagate


def random_hermitian(n, seed=0):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(n, n)) + 1j*rng.normal(size=(n, n))
    return (a + a.conj().T)/2


def test_propagate_matches_expm():
    H = random_hermitian(60)
    v = np.random.default_rng(1).normal(size=60).astype(complex)
    exact = scipy.linalg.expm(-1j*2.0*H) @ v
    approx = propagate(H.__matmul__, v, 2.0, numiter=20, tol=1E-12)
    assert np.allclose(approx, exact, atol=1E-8)
    assert np.linalg.norm(approx) == pytest.approx(np.linalg.norm(v))


def test_backward():
    H = random_hermitian(20)
    v = np.ones(20, dtype=complex)
    fwd = propagate(H.__matmul__, v, 1.0)
    assert np.allclose(propagate(H.__matmul__, fwd, -1.0), v, atol=1E-8)


def test_small_space():
    # Krylov dimension above the vector length ends with an exact projection
    H = random_hermitian(3)
    v = np.array([1, 0, 0], dtype=complex)
    alpha, beta, V, residual = lanczos_iteration(H.__matmul__, v, 10)
    assert len(alpha) <= 3
    assert np.allclose(propagate(H.__matmul__, v, 0.7), scipy.linalg.expm(-0.7j*H) @ v)


def test_lanczos_orthonormal():
    H = random_hermitian(40)
    v = np.ones(40, dtype=complex)
    alpha, beta, V, residual = lanczos_iteration(H.__matmul__, v, 15)
    assert np.allclose(V.conj().T @ V, np.eye(V.shape[1]), atol=1E-10)
    T = np.diag(alpha) + np.diag(beta, 1) + np.diag(beta, -1)
    assert np.allclose(V.conj().T @ H @ V, T, atol=1E-10)


def test_trivial():
    H = random_hermitian(5)
    v = np.ones(5, dtype=complex)
    assert np.allclose(propagate(H.__matmul__, v, 0.0), v)
    with pytest.raises(ValueError):
        lanczos_iteration(H.__matmul__, np.zeros(5), 3)
