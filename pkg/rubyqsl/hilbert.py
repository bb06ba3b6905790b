''' Blockade-constrained Hilbert space

    Basis states are occupation bitstrings stored as integers, bit i set when
    site i is in the Rydberg state. The basis is the set of independent sets
    of a blockade graph, sorted by integer value, so the vacuum has index 0.
'''

from __future__ import annotations
from typing import Optional, Sequence, TYPE_CHECKING
from functools import cached_property
import logging

import numpy as np

from .config import config
from .lattice import BlockadeGraph
from .rubytypes import CapacityError

if TYPE_CHECKING:
    from .lattice import RubyLattice


BasisState = int


def state_from_sites(sites: Sequence[int]) -> BasisState:
    ''' Basis state with the given sites occupied '''
    state = 0
    for s in sites:
        state |= 1 << int(s)
    return state


def occupied_sites(state: BasisState) -> tuple[int, ...]:
    ''' Occupied site indices of a basis state '''
    state = int(state)
    out = []
    i = 0
    while state:
        if state & 1:
            out.append(i)
        state >>= 1
        i += 1
    return tuple(out)


def state_to_string(state: BasisState, n_sites: int) -> str:
    ''' Fixed-width 0/1 string, site 0 first '''
    return ''.join('1' if (int(state) >> i) & 1 else '0' for i in range(n_sites))


def state_from_string(bits: str) -> BasisState:
    ''' Parse a 0/1 string written by `state_to_string` '''
    if set(bits) - {'0', '1'}:
        raise ValueError(f'Occupation string may only hold 0 and 1: {bits!r}')
    return state_from_sites([i for i, c in enumerate(bits) if c == '1'])


def _dtype(n_sites: int):
    return np.uint64 if n_sites <= 64 else object


def _bit(i: int, n_sites: int):
    return np.uint64(1 << i) if n_sites <= 64 else (1 << i)


def as_states(states: Sequence[int], n_sites: int) -> np.ndarray:
    ''' Integer states as an array of the basis dtype '''
    if n_sites <= 64:
        return np.array([int(s) for s in states], dtype=np.uint64)
    out = np.empty(len(states), dtype=object)
    out[:] = [int(s) for s in states]
    return out


def occupations(states: np.ndarray, n_sites: int) -> np.ndarray:
    ''' Boolean occupation matrix, shape (len(states), n_sites) '''
    if n_sites <= 64:
        shifts = np.arange(n_sites, dtype=np.uint64)
        return ((states[:, None] >> shifts) & np.uint64(1)).astype(bool)
    return np.array([[(int(s) >> i) & 1 for i in range(n_sites)] for s in states],
                    dtype=bool).reshape(len(states), n_sites)


def pack(occ: np.ndarray) -> np.ndarray:
    ''' Inverse of `occupations` '''
    occ = np.asarray(occ, dtype=bool)
    n_sites = occ.shape[1]
    if n_sites <= 64:
        shifts = np.arange(n_sites, dtype=np.uint64)
        return (occ.astype(np.uint64) << shifts).sum(axis=1, dtype=np.uint64)
    return as_states([state_from_sites(np.flatnonzero(row)) for row in occ], n_sites)


class ConstrainedBasis:
    ''' Sorted independent sets of a blockade graph with index lookup

        Args:
            graph: The blockade graph
            states: Sorted array of basis states
    '''
    def __init__(self, graph: BlockadeGraph, states: np.ndarray):
        self.graph = graph
        self.states = states
        self.states.setflags(write=False)

    def __repr__(self):
        return f'<ConstrainedBasis dim={self.dim} over {self.n_sites} sites>'

    def __len__(self):
        return self.dim

    @property
    def dim(self) -> int:
        return len(self.states)

    @property
    def n_sites(self) -> int:
        return self.graph.n_sites

    @cached_property
    def occupations(self) -> np.ndarray:
        ''' Boolean occupation matrix, one row per basis state '''
        occ = occupations(self.states, self.n_sites)
        occ.setflags(write=False)
        return occ

    @cached_property
    def excitations(self) -> np.ndarray:
        ''' Number of occupied sites of each basis state '''
        return self.occupations.sum(axis=1)

    def lookup(self, states: np.ndarray) -> np.ndarray:
        ''' Indices of many states, -1 where a state is not in the basis '''
        states = np.asarray(states, dtype=self.states.dtype)
        if len(states) == 0:
            return np.zeros(0, dtype=np.int64)
        idx = np.searchsorted(self.states, states)
        clipped = np.minimum(idx, self.dim - 1)
        found = self.states[clipped] == states
        return np.where(found, clipped, -1).astype(np.int64)

    def index_of(self, state: BasisState) -> int:
        ''' Position of a basis state '''
        state = int(state)
        if state < 0 or state >> self.n_sites:
            raise ValueError(f'State {state:#x} has bits beyond site {self.n_sites-1}')
        k = int(self.lookup(as_states([state], self.n_sites))[0])
        if k < 0:
            raise ValueError(f'State {occupied_sites(state)} violates the blockade constraint')
        return k

    def state_of(self, k: int) -> BasisState:
        ''' Basis state at position k '''
        if not 0 <= k < self.dim:
            raise ValueError(f'Index {k} out of range for dimension {self.dim}')
        return int(self.states[k])

    def contains(self, state: BasisState) -> bool:
        return int(self.lookup(as_states([state], self.n_sites))[0]) >= 0


def enumerate_basis(g: BlockadeGraph, cap: Optional[int] = None) -> ConstrainedBasis:
    ''' Enumerate all independent sets of the blockade graph.

        Sites are added one at a time; site i may join every partial state
        that has none of its lower-indexed neighbours occupied.

        Raises:
            CapacityError: the basis would exceed `cap` (default
                `config.dimension_cap`) states
    '''
    cap = config.dimension_cap if cap is None else cap
    n = g.n_sites
    dtype = _dtype(n)
    states = np.zeros(1, dtype=dtype)
    for i in range(n):
        lower = [j for j in g.neighbors(i) if j < i]
        mask = state_from_sites(lower)
        if n <= 64:
            free = states[(states & np.uint64(mask)) == 0]
        else:
            free = states[np.array([(int(s) & mask) == 0 for s in states], dtype=bool)]
        if len(states) + len(free) > cap:
            raise CapacityError(
                f'Constrained basis has at least {len(states) + len(free)} states '
                f'(cap {cap}) after {i+1} of {n} sites')
        states = np.concatenate([states, free | _bit(i, n)])
    states = np.sort(states)
    logging.debug('Enumerated basis of dimension %d over %d sites', len(states), n)
    return ConstrainedBasis(g, states)


def dimer_sector(b: ConstrainedBasis, lat: 'RubyLattice', rule: str = 'exempt') -> np.ndarray:
    ''' Indices of basis states that are perfect dimer coverings: every
        constrained vertex touches exactly one occupied link. On a torus every
        vertex is constrained; on open lattices `rule` selects whether boundary
        vertices are exempt.
    '''
    if b.n_sites != lat.n_sites:
        raise ValueError(f'Basis has {b.n_sites} sites, lattice has {lat.n_sites}')
    verts = lat.covered_vertices(rule)
    counts = b.occupations.astype(np.int16) @ lat.incidence.astype(np.int16)
    ok = (counts[:, verts] == 1).all(axis=1) & (counts <= 1).all(axis=1)
    return np.flatnonzero(ok)


def sector_population(probabilities: np.ndarray, b: ConstrainedBasis,
                      lat: 'RubyLattice', rule: str = 'exempt') -> float:
    ''' Total probability in the dimer-covering sector '''
    return float(np.sum(np.asarray(probabilities)[dimer_sector(b, lat, rule)]))

