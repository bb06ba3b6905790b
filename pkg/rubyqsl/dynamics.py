''' State vectors, time evolution, quasi-adiabatic sweeps, the quench basis
    rotation, and ground states
'''

from __future__ import annotations
from typing import Callable, Optional, Sequence
from dataclasses import dataclass, replace
import math
import logging

import numpy as np
import scipy.linalg
from scipy.sparse.linalg import eigsh, ArpackNoConvergence, norm as sparse_norm
from joblib import Parallel, delayed

from .config import config
from .rubytypes import ConvergenceError
from .hilbert import ConstrainedBasis, BasisState, enumerate_basis
from .hamiltonian import SparseOperator, HamiltonianSpec, HamiltonianTerms, hamiltonian_terms, quench_time
from .lattice import RubyLattice, blockade_graph, triangle_graph
from .schedule import SweepSchedule
from . import krylov


class StateVector:
    ''' Amplitudes over a constrained basis

        Args:
            basis: The basis
            amplitudes: Complex amplitudes, one per basis state
    '''
    def __init__(self, basis: ConstrainedBasis, amplitudes: np.ndarray):
        amplitudes = np.asarray(amplitudes, dtype=complex)
        if amplitudes.shape != (basis.dim,):
            raise ValueError(f'Amplitude vector of shape {amplitudes.shape} '
                             f'does not match basis dimension {basis.dim}')
        self.basis = basis
        self.amplitudes = amplitudes

    def __repr__(self):
        return f'<StateVector dim={self.dim} norm={self.norm():.12g}>'

    @classmethod
    def vacuum(cls, basis: ConstrainedBasis) -> 'StateVector':
        ''' All atoms in the ground state '''
        return cls.basis_state(basis, 0)

    @classmethod
    def basis_state(cls, basis: ConstrainedBasis, state: BasisState) -> 'StateVector':
        ''' A single occupation configuration '''
        amps = np.zeros(basis.dim, dtype=complex)
        amps[basis.index_of(state)] = 1
        return cls(basis, amps)

    @classmethod
    def superposition(cls, basis: ConstrainedBasis, states: Sequence[BasisState],
                      coeffs: Optional[Sequence[complex]] = None) -> 'StateVector':
        ''' Normalized superposition of basis states (equal weights by default) '''
        amps = np.zeros(basis.dim, dtype=complex)
        coeffs = np.ones(len(states)) if coeffs is None else coeffs
        for s, c in zip(states, coeffs):
            amps[basis.index_of(s)] += c
        return cls(basis, amps).normalized()

    @classmethod
    def random(cls, basis: ConstrainedBasis, seed: Optional[int] = None) -> 'StateVector':
        ''' Normalized complex Gaussian random state '''
        rng = np.random.default_rng(seed)
        amps = rng.normal(size=basis.dim) + 1j*rng.normal(size=basis.dim)
        return cls(basis, amps).normalized()

    @property
    def dim(self) -> int:
        ''' Basis dimension '''
        return self.basis.dim

    def norm(self) -> float:
        ''' Euclidean norm of the amplitudes '''
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> 'StateVector':
        nrm = self.norm()
        if nrm == 0:
            raise ValueError('Cannot normalize the zero vector')
        return StateVector(self.basis, self.amplitudes / nrm)

    def probabilities(self) -> np.ndarray:
        ''' Born probabilities |amplitude|^2 '''
        return np.abs(self.amplitudes)**2

    def overlap(self, other: 'StateVector') -> complex:
        ''' <self|other>, on the same basis '''
        if other.dim != self.dim:
            raise ValueError(f'States have dimensions {self.dim} and {other.dim}')
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def fidelity(self, other: 'StateVector') -> float:
        ''' |<self|other>|^2 '''
        return abs(self.overlap(other))**2

    def expectation(self, op: SparseOperator) -> float:
        ''' Real part of <psi|op|psi> '''
        if op.dim != self.dim:
            raise ValueError(f'Operator dimension {op.dim} does not match state dimension {self.dim}')
        return op.expectation(self.amplitudes).real

    def embed(self, basis: ConstrainedBasis) -> 'StateVector':
        ''' Same state expressed in another basis, matched by occupation bitstring.

            Raises:
                ValueError: a state with nonzero amplitude is missing from `basis`
        '''
        if basis is self.basis:
            return self
        if basis.n_sites != self.basis.n_sites:
            raise ValueError(f'Cannot embed {self.basis.n_sites}-site state '
                             f'into a {basis.n_sites}-site basis')
        idx = basis.lookup(self.basis.states)
        missing = (idx < 0) & (self.amplitudes != 0)
        if missing.any():
            raise ValueError(f'{int(missing.sum())} occupied configurations are not in the target basis')
        amps = np.zeros(basis.dim, dtype=complex)
        keep = idx >= 0
        amps[idx[keep]] = self.amplitudes[keep]
        return StateVector(basis, amps)


@dataclass
class QuenchSpec:
    ''' Basis-rotation pulse at reduced blockade radius

        Attributes
        ----------
        omega_q: Quench Rabi frequency (rad/us)
        delta_q: Quench detuning
        phase: Drive phase. pi/2 maps X strings onto their dual Z strings.
        tau: Pulse length. Defaults to 4 pi / (3 sqrt(3) omega_q).
        rise_time: Linear Omega rise at the start of the pulse, or None for
            an ideal square pulse
        rb_over_a: Blockade radius during the quench
    '''
    omega_q: float = 2*math.pi*20
    delta_q: float = 0.0
    phase: float = math.pi/2
    tau: Optional[float] = None
    rise_time: Optional[float] = None
    rb_over_a: float = 1.53

    def __post_init__(self):
        if self.tau is None:
            self.tau = quench_time(self.omega_q)
        if self.tau < 0:
            raise ValueError(f'Quench time must be nonnegative, got {self.tau}')
        if self.rise_time is not None and self.rise_time <= 0:
            raise ValueError(f'Rise time must be positive, got {self.rise_time}')
        if self.rb_over_a <= 0:
            raise ValueError(f'Quench blockade radius must be positive, got {self.rb_over_a}')


def _check_operator(psi: StateVector, H: SparseOperator) -> None:
    if H.dim != psi.dim:
        raise ValueError(f'Hamiltonian dimension {H.dim} does not match state dimension {psi.dim}')
    if not H.is_hermitian():
        raise ValueError(f'Hamiltonian is not Hermitian (deviation {H.hermiticity_error():.3g})')


def _propagate(H: SparseOperator, v: np.ndarray, t: float) -> np.ndarray:
    if H.dim < config.dense_threshold:
        w, u = H.spectrum()
        return u @ (np.exp(-1j*w*t) * (u.conj().T @ v))
    return krylov.propagate(H.matrix.__matmul__, v, t, config.krylov_dim, config.krylov_tol)


def evolve(psi: StateVector, H: SparseOperator, t: float) -> StateVector:
    ''' exp(-iHt) psi

        Uses the dense eigendecomposition of H below `config.dense_threshold`
        and adaptive Krylov substeps above it.

        Raises:
            ValueError: dimension mismatch or non-Hermitian H
            ConvergenceError: a Krylov substep could not reach `config.krylov_tol`
    '''
    _check_operator(psi, H)
    if t == 0:
        return StateVector(psi.basis, psi.amplitudes.copy())
    nrm = psi.norm()
    out = _propagate(H, psi.amplitudes, t)
    drift = abs(np.linalg.norm(out) - nrm)
    if drift > 1E-9:
        logging.warning('Norm drift %.3g during evolution', drift)
    return StateVector(psi.basis, out)


def evolve_timedep(psi: StateVector, builder: Callable[[float], SparseOperator],
                   t0: float, t1: float, dt: float) -> StateVector:
    ''' Evolve from t0 to t1 under a time-dependent Hamiltonian

        The interval is split into equal steps no longer than dt, and each
        step uses the Hamiltonian at its midpoint. The error is second order
        in the step length.

        Args:
            psi: Initial state
            builder: Function of time returning the Hamiltonian
            t0: Start time
            t1: End time (>= t0)
            dt: Largest step
    '''
    if dt <= 0:
        raise ValueError(f'Time step must be positive, got {dt}')
    if t1 < t0:
        raise ValueError(f'End time {t1} before start time {t0}')
    if t1 == t0:
        return StateVector(psi.basis, psi.amplitudes.copy())
    nsteps = max(1, math.ceil((t1 - t0)/dt - 1E-9))
    h = (t1 - t0) / nsteps
    for k in range(nsteps):
        psi = evolve(psi, builder(t0 + (k + 0.5)*h), h)
    logging.debug('Time-dependent evolution %g -> %g in %d steps', t0, t1, nsteps)
    return psi


def sweep_basis(lat: RubyLattice, spec: HamiltonianSpec) -> ConstrainedBasis:
    ''' Basis used for state preparation: the full blockade graph for the PXP
        model, intra-triangle blockade only for the van der Waals model
    '''
    g = blockade_graph(lat, spec.rb_over_a) if spec.model == 'pxp' else triangle_graph(lat)
    return enumerate_basis(g)


def _run_one(psi: StateVector, terms: HamiltonianTerms, sched: SweepSchedule, dt: float) -> StateVector:
    def builder(t):
        return terms.at(*sched.evaluate(t))
    # Integrate each segment separately so no midpoint step straddles a kink
    bounds = [0.0, sched.t_ramp_on, sched.t_stop, sched.t_total]
    for a, b in zip(bounds[:-1], bounds[1:]):
        if b > a:
            psi = evolve_timedep(psi, builder, a, b, dt)
    return psi


def run_sweep(lat: RubyLattice, spec: HamiltonianSpec, sched: SweepSchedule,
              endpoints: Sequence[float],
              basis: Optional[ConstrainedBasis] = None) -> dict[float, StateVector]:
    ''' Quasi-adiabatic preparation from the vacuum, stopping the cubic
        detuning sweep at each endpoint

        Args:
            lat: The lattice
            spec: Model. Its omega and delta are replaced by the schedule;
                van der Waals couplings are scaled by sched.omega_max.
            sched: Sweep schedule
            endpoints: Final detunings in units of omega_max (absolute
                detunings when omega_max is zero)
            basis: Preparation basis, built from spec when omitted

        Returns:
            Final state of each endpoint, in endpoint order
    '''
    if sched.omega_max > 0:
        truncated = [sched.at_endpoint(e) for e in endpoints]
        scale = sched.omega_max
    else:
        truncated = [sched.truncated(e) for e in endpoints]
        scale = max(abs(sched.delta_min), abs(sched.delta_max), 1.0)
    basis = sweep_basis(lat, spec) if basis is None else basis
    terms = hamiltonian_terms(basis, lat, replace(spec, omega=sched.omega_max or 1.0))
    dt = config.sweep_step / scale
    psi0 = StateVector.vacuum(basis)
    logging.info('Sweeping %d endpoints on basis of dimension %d', len(endpoints), basis.dim)
    finals = Parallel(n_jobs=config.threads, backend='threading')(
        delayed(_run_one)(psi0, terms, s, dt) for s in truncated)
    return dict(zip(endpoints, finals))


def quench_basis(lat: RubyLattice, q: QuenchSpec) -> ConstrainedBasis:
    ''' Basis of the reduced blockade graph used during the quench '''
    return enumerate_basis(blockade_graph(lat, q.rb_over_a))


def apply_quench(psi: StateVector, lat: RubyLattice, q: QuenchSpec,
                 basis: Optional[ConstrainedBasis] = None) -> StateVector:
    ''' Quench pulse exp(-i H_q tau) at the reduced blockade radius

        The state is re-embedded into the reduced basis by occupation
        bitstring. With a rise time the Rabi frequency ramps linearly from
        zero before holding at omega_q until tau.

        Args:
            psi: State on the preparation basis
            lat: The lattice
            q: Quench pulse
            basis: Reduced basis, built from q when omitted
    '''
    prep_rb = psi.basis.graph.rb_over_a
    if prep_rb is not None and prep_rb < q.rb_over_a:
        raise ValueError(f'Preparation blockade radius {prep_rb} is below the quench radius '
                         f'{q.rb_over_a}; the state cannot be embedded')
    basis = quench_basis(lat, q) if basis is None else basis
    psi = psi.embed(basis)
    if q.tau == 0:
        return psi
    terms = HamiltonianTerms(basis, q.phase)
    held = q.tau
    if q.rise_time is not None:
        rise = min(q.rise_time, q.tau)
        psi = evolve_timedep(psi, lambda t: terms.at(q.omega_q*t/q.rise_time, q.delta_q),
                             0, rise, q.rise_time/config.rise_steps)
        held = q.tau - rise
    if held > 0:
        psi = evolve(psi, terms.at(q.omega_q, q.delta_q), held)
    return psi


def _check_residuals(H: SparseOperator, w: np.ndarray, v: np.ndarray) -> None:
    scale = max(1.0, float(sparse_norm(H.matrix, 1)))
    res = np.linalg.norm(H.matrix @ v - v*w, axis=0)
    logging.debug('Eigenpair residuals up to %.3g', res.max())
    if res.max() > config.eig_tol*scale:
        raise ConvergenceError(f'Eigenpair residual {res.max():.3g} above tolerance', float(res.max()))


def spectrum_slice(H: SparseOperator, k: int) -> tuple[np.ndarray, list[StateVector]]:
    ''' The k lowest eigenpairs of H, eigenvalues in nondecreasing order

        Raises:
            ValueError: non-Hermitian H or k outside [1, dim]
            ConvergenceError: eigensolver failure or residual above `config.eig_tol`
    '''
    if not H.is_hermitian():
        raise ValueError(f'Hamiltonian is not Hermitian (deviation {H.hermiticity_error():.3g})')
    if not 1 <= k <= H.dim:
        raise ValueError(f'Cannot compute {k} eigenpairs of a {H.dim}-dimensional operator')
    if H.dim < config.dense_threshold or k >= H.dim - 1:
        w, v = scipy.linalg.eigh(H.toarray(), subset_by_index=[0, k-1])
    else:
        v0 = np.random.default_rng(0).normal(size=H.dim).astype(complex)
        try:
            w, v = eigsh(H.matrix, k=k, which='SA', tol=0, v0=v0)
        except ArpackNoConvergence as err:
            raise ConvergenceError(f'Eigensolver did not converge: {err}') from err
        order = np.argsort(w)
        w, v = w[order], v[:, order]
    _check_residuals(H, w, v)
    return w, [StateVector(H.basis, v[:, i]) for i in range(k)]


def ground_state(H: SparseOperator) -> tuple[float, StateVector]:
    ''' Lowest eigenpair of H '''
    w, vecs = spectrum_slice(H, 1)
    return float(w[0]), vecs[0]


def instantaneous_ground_state(lat: RubyLattice, spec: HamiltonianSpec,
                               basis: Optional[ConstrainedBasis] = None) -> tuple[float, StateVector]:
    ''' Ground state of the model at the (omega, delta) of spec '''
    basis = sweep_basis(lat, spec) if basis is None else basis
    return ground_state(hamiltonian_terms(basis, lat, spec).at(spec.omega, spec.delta))


