''' Dimer coverings of the kagome lattice formed by excited ruby sites

    A covering is a basis-state integer: each excited site is a dimer on its
    kagome link. In a perfect covering every constrained vertex touches
    exactly one dimer and no vertex touches two.
'''

from __future__ import annotations
from typing import Optional, Sequence
import math
import logging

import numpy as np

from .config import config
from .rubytypes import CapacityError, SectorError, Cycle, TransitionGraph
from .lattice import RubyLattice
from .hilbert import BasisState, state_from_sites, occupied_sites, as_states, occupations
from .strings import StringSpec, enumerate_loops
from .measure import x_image, SnapshotSet

# Direction of the reference cut from the hole; irrational so it misses every vertex
CUT_ANGLE = 0.1234


def enumerate_perfect_coverings(lat: RubyLattice, boundary: str = 'exempt',
                                cap: Optional[int] = None) -> list[BasisState]:
    ''' All perfect dimer coverings, by vertex-by-vertex backtracking

        Vertices are visited in index order. An uncovered vertex either
        takes a dimer to a later, still uncovered vertex, or (when exempt)
        stays a monomer.

        Args:
            lat: The lattice
            boundary: 'exempt' lets boundary vertices (fewer than four links)
                be monomers; 'strict' covers every vertex
            cap: Largest number of coverings (default `config.covering_cap`)

        Returns:
            Sorted list of coverings

        Raises:
            CapacityError: more than `cap` coverings
    '''
    cap = config.covering_cap if cap is None else cap
    nvert = len(lat.vertices)
    forced = np.zeros(nvert, dtype=bool)
    forced[lat.covered_vertices(boundary)] = True
    links = [[(int(s), int(w)) for s in lat.vertices[v].sites
              for w in lat.site_vertices[s] if w != v] for v in range(nvert)]
    covered = np.zeros(nvert, dtype=bool)
    chosen: list[int] = []
    found: list[BasisState] = []

    def search(v: int) -> None:
        while v < nvert and covered[v]:
            v += 1
        if v == nvert:
            found.append(state_from_sites(chosen))
            if len(found) > cap:
                raise CapacityError(f'More than {cap} dimer coverings on {lat}')
            return
        for s, w in links[v]:
            if w > v and not covered[w]:
                covered[v] = covered[w] = True
                chosen.append(s)
                search(v + 1)
                chosen.pop()
                covered[v] = covered[w] = False
        if not forced[v]:
            search(v + 1)

    search(0)
    found.sort()
    logging.debug('Enumerated %d %s coverings of %s', len(found), boundary, lat)
    return found


def _check_state(lat: RubyLattice, D: BasisState) -> None:
    if int(D) < 0 or int(D) >> lat.n_sites:
        raise ValueError(f'Covering {int(D):#x} has sites beyond the {lat.n_sites}-site lattice')


def vertex_counts(lat: RubyLattice, D: BasisState) -> np.ndarray:
    ''' Number of dimers touching each vertex '''
    _check_state(lat, D)
    occ = occupations(as_states([D], lat.n_sites), lat.n_sites)[0]
    return occ.astype(int) @ lat.incidence.astype(int)


def is_perfect_covering(lat: RubyLattice, D: BasisState, boundary: str = 'exempt') -> bool:
    ''' Whether D has one dimer at every constrained vertex and at most one anywhere '''
    counts = vertex_counts(lat, D)
    return bool((counts <= 1).all() and (counts[lat.covered_vertices(boundary)] == 1).all())


def apply_x_loop(lat: RubyLattice, D: BasisState, s: StringSpec,
                 boundary: str = 'exempt') -> Optional[BasisState]:
    ''' Covering obtained by acting with closed X loop s on D, or None when
        the loop is not flippable on D (the image is not a perfect covering)
    '''
    if s.kind != 'X' or not s.closed:
        raise ValueError(f'Covering moves need a closed X loop, got {s!r}')
    image, _ = x_image(lat, D, s)
    if not is_perfect_covering(lat, image, boundary):
        return None
    return image


def _walk(lat: RubyLattice, start: int, adj: dict[int, list[tuple[int, int]]],
          used: set) -> tuple[list[int], list[int]]:
    ''' Follow unused links from start; returns (vertices, sites) in order '''
    verts = [start]
    sites = []
    v = start
    while True:
        step = [(s, w) for s, w in adj[v] if s not in used]
        if not step:
            return verts, sites
        s, w = step[0]
        used.add(s)
        sites.append(s)
        if w == start:
            return verts, sites
        verts.append(w)
        v = w


def transition_graph(lat: RubyLattice, D1: BasisState, D2: BasisState) -> TransitionGraph:
    ''' Superimpose two coverings, drop shared dimers, and split the rest
        into alternating closed cycles and open paths (ending at monomers)
    '''
    _check_state(lat, D1)
    _check_state(lat, D2)
    diff = occupied_sites(int(D1) ^ int(D2))
    adj: dict[int, list[tuple[int, int]]] = {}
    for s in diff:
        u, w = (int(x) for x in lat.site_vertices[s])
        adj.setdefault(u, []).append((s, w))
        adj.setdefault(w, []).append((s, u))
    if any(len(links) > 2 for links in adj.values()):
        raise ValueError('Inputs are not dimer coverings: a vertex touches two dimers')
    used: set = set()
    cycles = []
    paths = []
    # Paths start at degree-1 vertices
    for v in sorted(adj):
        if len(adj[v]) == 1 and adj[v][0][0] not in used:
            verts, sites = _walk(lat, v, adj, used)
            paths.append(Cycle(tuple(sites), tuple(verts)))
    for v in sorted(adj):
        if any(s not in used for s, _ in adj[v]):
            verts, sites = _walk(lat, v, adj, used)
            cycles.append(Cycle(tuple(sites), tuple(verts)))
    return TransitionGraph(cycles, paths)


def winding(lat: RubyLattice, cycle: Cycle) -> int:
    ''' Signed number of times a closed cycle crosses the reference cut,
        a ray from the hole center
    '''
    if lat.hole_center is None:
        raise ValueError(f'{lat} has no hole')
    if lat.torus:
        raise ValueError('Winding around a hole is not defined on a torus')
    c = np.array(lat.hole_center)
    d = np.array([math.cos(CUT_ANGLE), math.sin(CUT_ANGLE)])
    pos = [np.array(lat.vertices[v].pos) for v in cycle.vertices]
    total = 0
    for p, q in zip(pos, pos[1:] + pos[:1]):
        seg = q - p
        denom = d[0]*seg[1] - d[1]*seg[0]
        if denom == 0:
            continue
        # Solve c + lam d = p + mu seg
        r = p - c
        lam = (r[0]*seg[1] - r[1]*seg[0]) / denom
        mu = (r[0]*d[1] - r[1]*d[0]) / denom
        if lam > 0 and 0 <= mu < 1:
            total += 1 if denom > 0 else -1
    return total


def sector_relation(lat: RubyLattice, D1: BasisState, D2: BasisState) -> str:
    ''' 'opposite' when the transition cycles of D1 and D2 wind the hole an
        odd number of times in total, otherwise 'same'

        Raises:
            ValueError: lattice without a hole, or coverings whose transition
                graph has open paths (monomers), for which no sector is defined
    '''
    if lat.hole is None or lat.torus:
        raise ValueError(f'Sector relation needs an open lattice with a hole, got {lat}')
    tg = transition_graph(lat, D1, D2)
    if tg.paths:
        raise ValueError(f'Transition graph has {len(tg.paths)} open paths; '
                         "compare coverings of the 'strict' rule")
    total = sum(winding(lat, c) for c in tg.cycles)
    return 'opposite' if total % 2 else 'same'


def _string_parity(D: BasisState, s: StringSpec) -> int:
    return 1 - 2*(sum((int(D) >> i) & 1 for i in s.sites) % 2)


def classify_sectors(lat: RubyLattice, coverings: Sequence[BasisState],
                     reference: BasisState) -> dict[BasisState, int]:
    ''' Topological sector (0 or 1) of each covering relative to reference

        The labeling is verified: every hole-to-boundary Z string must have
        one parity throughout each sector and the opposite parity in the
        other, and consecutive coverings must relate consistently.

        Raises:
            ValueError: reference not among the coverings
            SectorError: the labels are not a consistent 2-coloring
    '''
    coverings = [int(D) for D in coverings]
    if int(reference) not in coverings:
        raise ValueError('Reference covering is not in the list')
    labels = {D: int(sector_relation(lat, reference, D) == 'opposite') for D in coverings}
    for a, b in zip(coverings[:-1], coverings[1:]):
        rel = sector_relation(lat, a, b)
        if (rel == 'opposite') != (labels[a] != labels[b]):
            raise SectorError(f'Coverings {a:#x} and {b:#x} are {rel} but labeled '
                              f'{labels[a]} and {labels[b]}')
    strings = enumerate_loops(lat, 'hole-to-boundary')
    if not strings:
        logging.warning('No hole-to-boundary strings on %s; sector parities unchecked', lat)
    ref = {s.label: _string_parity(reference, s) for s in strings}
    for D, lab in labels.items():
        for s in strings:
            expect = ref[s.label] * (-1 if lab else 1)
            if _string_parity(D, s) != expect:
                raise SectorError(f'String {s.label} has parity {-expect} on covering {D:#x} '
                                  f'in sector {lab}')
    counts = np.bincount(list(labels.values()), minlength=2)
    logging.info('Sectors on %s: %d and %d coverings', lat, counts[0], counts[1])
    return labels


def as_snapshots(lat: RubyLattice, coverings: Sequence[BasisState],
                 endpoint: Optional[float] = None, seed: Optional[int] = None) -> SnapshotSet:
    ''' Coverings as a snapshot set, for file export and measurement '''
    if not coverings:
        raise ValueError('No coverings to export')
    for D in coverings:
        _check_state(lat, D)
    return SnapshotSet.from_states(coverings, lat.n_sites, endpoint=endpoint, seed=seed)
