''' Lanczos (Krylov subspace) propagation of exp(-iHt) v '''

from __future__ import annotations
from typing import Callable
import logging

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .rubytypes import ConvergenceError


MatVec = Callable[[np.ndarray], np.ndarray]


def lanczos_iteration(matvec: MatVec, vstart: np.ndarray, numiter: int):
    ''' Lanczos iteration with full reorthogonalization.

        Args:
            matvec: Hermitian linear map
            vstart: Starting vector (nonzero)
            numiter: Maximum number of iterations

        Returns:
            alpha: Diagonal of the tridiagonal matrix
            beta: Off-diagonal of the tridiagonal matrix
            V: Lanczos vectors as columns, shape (len(vstart), len(alpha))
            residual: Norm of the component leaving the subspace (0 on breakdown)
    '''
    nrmv = np.linalg.norm(vstart)
    if nrmv == 0:
        raise ValueError('Lanczos start vector is zero')
    numiter = max(1, min(numiter, len(vstart)))

    alpha = np.zeros(numiter)
    beta = np.zeros(numiter)
    V = np.zeros((numiter, len(vstart)), dtype=complex)
    V[0] = vstart / nrmv
    scale = 0.0
    for j in range(numiter):
        w = matvec(V[j])
        alpha[j] = np.vdot(V[j], w).real
        w = w - alpha[j]*V[j] - (beta[j-1]*V[j-1] if j > 0 else 0)
        # Reorthogonalize against every previous Lanczos vector
        w -= V[:j+1].T @ (V[:j+1].conj() @ w)
        beta[j] = np.linalg.norm(w)
        scale = max(scale, abs(alpha[j]), beta[j])
        if beta[j] <= 1E-13 * max(scale, 1.0):
            # Invariant subspace found: the projection is exact
            return alpha[:j+1], beta[:j], V[:j+1].T, 0.0
        if j < numiter - 1:
            V[j+1] = w / beta[j]
    return alpha, beta[:-1], V.T, beta[-1]


def expm_step(matvec: MatVec, v: np.ndarray, dt: float, numiter: int):
    ''' One Krylov approximation of exp(-i dt H) v, with the a posteriori
        error estimate residual * |last component of the small exponential|
    '''
    nrmv = np.linalg.norm(v)
    alpha, beta, V, residual = lanczos_iteration(matvec, v, numiter)
    w_hess, u_hess = eigh_tridiagonal(alpha, beta) if len(beta) else (alpha, np.ones((1, 1)))
    coeffs = u_hess @ (np.exp(-1j*dt*w_hess) * u_hess[0]) * nrmv
    error = residual * abs(coeffs[-1])
    return V @ coeffs, error


def propagate(matvec: MatVec, v: np.ndarray, t: float, numiter: int = 30,
              tol: float = 1E-10, maxsteps: int = 100_000) -> np.ndarray:
    ''' exp(-i t H) v by adaptive Krylov substeps

        Each substep is accepted when its error estimate is below tol times
        the vector norm; rejected substeps are halved, accepted ones grow.

        Raises:
            ConvergenceError: substep shrank below resolution or too many steps
    '''
    if t == 0:
        return np.array(v, dtype=complex)
    nrm = np.linalg.norm(v)
    out = np.array(v, dtype=complex)
    done = 0.0
    dt = t
    steps = 0
    error = float('nan')
    while abs(t - done) > 1E-15 * abs(t):
        dt = min(dt, t - done) if t > 0 else max(dt, t - done)
        trial, error = expm_step(matvec, out, dt, numiter)
        if error <= tol * nrm:
            out = trial
            done += dt
            steps += 1
            dt *= 1.5
        else:
            dt /= 2
            if abs(dt) < 1E-14 * abs(t):
                raise ConvergenceError(
                    f'Krylov step shrank to {dt:.3g} with error {error:.3g}', error)
        if steps > maxsteps:
            raise ConvergenceError(f'Krylov propagation needed more than {maxsteps} steps', error)
    logging.debug('Krylov propagation over t=%g in %d substeps', t, steps)
    return out
