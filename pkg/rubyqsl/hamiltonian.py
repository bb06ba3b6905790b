''' Sparse Rydberg Hamiltonians over a constrained basis

    H = sum_i (Omega/2) (e^{i phi} |g_i><r_i| + e^{-i phi} |r_i><g_i|)
        - Delta sum_i n_i + sum_{i<j} V_ij n_i n_j

    with hbar = 1 and frequencies in rad/us. The blockade projector is implicit
    in the basis: a drive term is kept only when the flipped state is in it.
'''

from __future__ import annotations
from typing import Optional, TYPE_CHECKING
from dataclasses import dataclass
import math
import logging

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from .hilbert import ConstrainedBasis
from .lattice import interaction_list

if TYPE_CHECKING:
    from .lattice import RubyLattice


MODELS = ('pxp', 'vdw')


@dataclass
class HamiltonianSpec:
    ''' Model and drive parameters

        Attributes
        ----------
        model: 'pxp' (blockade as a hard constraint) or 'vdw' (truncated
            van der Waals tail on top of intra-triangle blockade)
        rb_over_a: Blockade radius in lattice spacings
        omega: Rabi frequency (rad/us)
        delta: Detuning (rad/us)
        phase: Drive phase (rad)
        r_trunc_over_a: Interaction truncation distance for the 'vdw' model
    '''
    model: str = 'pxp'
    rb_over_a: float = 2.4
    omega: float = 1.0
    delta: float = 0.0
    phase: float = 0.0
    r_trunc_over_a: Optional[float] = None

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f'Unknown model {self.model!r}; use one of {MODELS}')
        if self.omega < 0:
            raise ValueError(f'Rabi frequency must be nonnegative, got {self.omega}')
        if self.rb_over_a <= 0:
            raise ValueError(f'Blockade radius must be positive, got {self.rb_over_a}')
        if self.model == 'vdw' and self.r_trunc_over_a is None:
            raise ValueError('The vdw model needs r_trunc_over_a')


class SparseOperator:
    ''' Sparse matrix in the ordering of a ConstrainedBasis

        Args:
            matrix: Square sparse matrix (converted to CSR with sorted indices)
            basis: The basis it acts on
    '''
    def __init__(self, matrix, basis: ConstrainedBasis):
        matrix = sp.csr_matrix(matrix, dtype=complex)
        if matrix.shape != (basis.dim, basis.dim):
            raise ValueError(f'Operator shape {matrix.shape} does not match basis dimension {basis.dim}')
        matrix.sum_duplicates()
        matrix.sort_indices()
        self.matrix = matrix
        self.basis = basis
        self._spectrum = None

    def __repr__(self):
        return f'<SparseOperator dim={self.dim} nnz={self.matrix.nnz}>'

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __matmul__(self, other):
        if isinstance(other, SparseOperator):
            if other.basis is not self.basis and other.dim != self.dim:
                raise ValueError('Operators act on different bases')
            return SparseOperator(self.matrix @ other.matrix, self.basis)
        return self.matrix @ other

    def hermiticity_error(self) -> float:
        ''' Largest entry of |H - H^dagger| '''
        diff = self.matrix - self.matrix.conj().T
        return float(abs(diff).max()) if diff.nnz else 0.0

    def is_hermitian(self, tol: float = 1E-12) -> bool:
        scale = max(1.0, float(abs(self.matrix).max()) if self.matrix.nnz else 0.0)
        return self.hermiticity_error() < tol * scale

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()

    def expectation(self, amplitudes: np.ndarray) -> complex:
        ''' <psi|O|psi> for an amplitude vector '''
        return complex(np.vdot(amplitudes, self.matrix @ amplitudes))

    def norm(self) -> float:
        ''' Largest absolute entry '''
        return float(abs(self.matrix).max()) if self.matrix.nnz else 0.0

    def spectrum(self) -> tuple[np.ndarray, np.ndarray]:
        ''' Dense eigendecomposition (eigenvalues, eigenvectors), computed once '''
        if self._spectrum is None:
            self._spectrum = scipy.linalg.eigh(self.toarray())
        return self._spectrum


def drive_matrix(b: ConstrainedBasis, phase: float = 0.0) -> sp.csr_matrix:
    ''' Drive term for Omega = 1: <g|H|r> = e^{i phase}/2 for every
        single-site flip that stays inside the basis
    '''
    rows = []
    cols = []
    occ = b.occupations
    for i in range(b.n_sites):
        src = np.flatnonzero(~occ[:, i])
        if b.n_sites <= 64:
            targets = b.states[src] | np.uint64(1 << i)
        else:
            targets = b.states[src] | (1 << i)
        tgt = b.lookup(targets)
        keep = tgt >= 0
        rows.append(src[keep])
        cols.append(tgt[keep])
    rows = np.concatenate(rows) if rows else np.zeros(0, dtype=np.int64)
    cols = np.concatenate(cols) if cols else np.zeros(0, dtype=np.int64)
    up = np.full(len(rows), 0.5*np.exp(1j*phase))
    data = np.concatenate([up, up.conj()])
    mat = sp.coo_matrix((data, (np.concatenate([rows, cols]), np.concatenate([cols, rows]))),
                        shape=(b.dim, b.dim)).tocsr()
    mat.sort_indices()
    return mat


class HamiltonianTerms:
    ''' Precomputed pieces of the Hamiltonian, recombined for each (Omega, Delta)

        Args:
            basis: Constrained basis
            phase: Drive phase
            interactions: Optional diagonal interaction energy per basis state
    '''
    def __init__(self, basis: ConstrainedBasis, phase: float = 0.0,
                 interactions: Optional[np.ndarray] = None):
        self.basis = basis
        self.phase = phase
        self.drive = drive_matrix(basis, phase)
        self.number = basis.excitations.astype(float)
        self.interactions = (np.zeros(basis.dim) if interactions is None
                             else np.asarray(interactions, dtype=float))
        logging.debug('Hamiltonian terms: dim %d, %d drive entries', basis.dim, self.drive.nnz)

    def at(self, omega: float, delta: float) -> SparseOperator:
        ''' Hamiltonian at Rabi frequency omega and detuning delta '''
        diag = sp.diags(self.interactions - delta*self.number, format='csr')
        return SparseOperator(omega*self.drive + diag, self.basis)


def build_pxp(b: ConstrainedBasis, omega: float, delta: float, phase: float = 0.0) -> SparseOperator:
    ''' PXP Hamiltonian restricted to the constrained basis

        The drive element <g|H|r> is (omega/2) exp(i phase). On one triangle,
        phase -pi/2 gives the matrix with -i omega/2 along the vacuum row;
        the quench phase pi/2 gives its complex conjugate.
    '''
    if len(b.states) and b.n_sites and int(b.states.max()) >> b.n_sites:
        raise ValueError('Basis states use sites beyond its blockade graph')
    return HamiltonianTerms(b, phase).at(omega, delta)


def vdw_diagonal(b: ConstrainedBasis, lat: 'RubyLattice', spec: HamiltonianSpec) -> np.ndarray:
    ''' Interaction energy sum V_ij n_i n_j of each basis state, skipping
        hard-blockaded pairs. V_ij = Omega (Rb/d)^6 at the HamiltonianSpec omega.
    '''
    occ = b.occupations
    energy = np.zeros(b.dim)
    for i, j, v, hard in interaction_list(lat, spec.rb_over_a, spec.r_trunc_over_a):
        if hard:
            continue
        energy += spec.omega * v * (occ[:, i] & occ[:, j])
    return energy


def build_vdw(b: ConstrainedBasis, lat: 'RubyLattice', spec: HamiltonianSpec) -> SparseOperator:
    ''' Drive and detuning plus truncated van der Waals interactions '''
    if spec.model != 'vdw':
        raise ValueError(f'build_vdw needs a vdw spec, got model {spec.model!r}')
    if b.n_sites != lat.n_sites:
        raise ValueError(f'Basis has {b.n_sites} sites, lattice has {lat.n_sites}')
    terms = HamiltonianTerms(b, spec.phase, vdw_diagonal(b, lat, spec))
    return terms.at(spec.omega, spec.delta)


def hamiltonian_terms(b: ConstrainedBasis, lat: 'RubyLattice', spec: HamiltonianSpec) -> HamiltonianTerms:
    ''' Terms for either model, interactions scaled by spec.omega '''
    if spec.model == 'vdw':
        return HamiltonianTerms(b, spec.phase, vdw_diagonal(b, lat, spec))
    return HamiltonianTerms(b, spec.phase)


def phase_gauge(b: ConstrainedBasis, dphi: float) -> sp.dia_matrix:
    ''' Diagonal unitary exp(i dphi sum_i n_i) '''
    return sp.diags(np.exp(1j*dphi*b.excitations))


def quench_time(omega_q: float) -> float:
    ''' Pulse length 4 pi / (3 sqrt(3) omega_q) that maps X strings onto Z strings '''
    if omega_q <= 0:
        raise ValueError(f'Quench Rabi frequency must be positive, got {omega_q}')
    return 4*math.pi / (3*math.sqrt(3)*omega_q)
