''' Projective snapshots and string observables

    Every Z-type observable accepts either a StateVector (exact expectation
    over |amplitude|^2) or a SnapshotSet (sample mean with the standard
    error of the mean). X strings are evaluated exactly on wavefunctions, or
    on snapshots taken after the quench that maps them onto their dual Z
    strings.
'''

from __future__ import annotations
from typing import Optional, Sequence, Union, Iterable
from dataclasses import replace
import math
import logging

import numpy as np
import scipy.sparse as sp

from .rubytypes import Snapshot, ObservableReport, VertexStats, ScalingRoots, LogicalReport
from .lattice import RubyLattice, triangle_graph
from .hilbert import ConstrainedBasis, BasisState, enumerate_basis, pack, as_states, occupations
from .hamiltonian import SparseOperator
from .strings import (StringSpec, dual_string, enumerate_loops, z_loop, x_loop,
                      check_logical_string)
from .dynamics import StateVector, QuenchSpec, apply_quench

BFFM_EPS = 1E-3
JACKKNIFE_BLOCKS = 20


class SnapshotSet:
    ''' Projective measurement outcomes of one prepared state

        Args:
            occupations: Boolean array, shape (n_snapshots, n_sites)
            endpoint: Sweep endpoint (Delta/Omega) the state was prepared at
            seed: Sampling seed
            readout: 'prepared' for direct readout, 'quench' for readout
                after the X-to-Z quench
    '''
    def __init__(self, occupations: np.ndarray, endpoint: Optional[float] = None,
                 seed: Optional[int] = None, readout: str = 'prepared'):
        occupations = np.asarray(occupations, dtype=bool)
        if occupations.ndim != 2:
            raise ValueError(f'Snapshot array must be 2-dimensional, got shape {occupations.shape}')
        if readout not in ('prepared', 'quench'):
            raise ValueError(f'Unknown readout {readout!r}')
        self.occupations = occupations
        self.endpoint = endpoint
        self.seed = seed
        self.readout = readout

    def __repr__(self):
        return (f'<SnapshotSet {len(self)} x {self.n_sites} sites, '
                f'endpoint={self.endpoint}, readout={self.readout}>')

    def __len__(self):
        return len(self.occupations)

    def __getitem__(self, k: int) -> Snapshot:
        return Snapshot(''.join('1' if b else '0' for b in self.occupations[k]),
                        self.endpoint, self.seed)

    def __iter__(self):
        for k in range(len(self)):
            yield self[k]

    @property
    def n_sites(self) -> int:
        return self.occupations.shape[1]

    @property
    def states(self) -> np.ndarray:
        ''' Snapshots as basis-state integers '''
        return pack(self.occupations)

    @classmethod
    def from_states(cls, states: Sequence[BasisState], n_sites: int, **kwargs) -> 'SnapshotSet':
        ''' Snapshot set from basis-state integers (e.g. dimer coverings) '''
        return cls(occupations(as_states(states, n_sites), n_sites), **kwargs)


Target = Union[StateVector, SnapshotSet]


def _rows(target: Target) -> tuple[np.ndarray, Optional[np.ndarray]]:
    ''' Occupation rows and their exact weights (None for snapshots) '''
    if isinstance(target, StateVector):
        return target.basis.occupations, target.probabilities()
    if isinstance(target, SnapshotSet):
        if len(target) == 0:
            raise ValueError('Snapshot set is empty')
        return target.occupations, None
    raise TypeError(f'Expected a StateVector or SnapshotSet, got {type(target).__name__}')


def _check_sites(n_sites: int, s: StringSpec) -> None:
    if s.kind != 'Z':
        raise ValueError(f'Expected a Z string, got {s.kind} string {s.label!r}')
    bad = [i for i in s.sites if not 0 <= i < n_sites]
    if bad:
        raise ValueError(f'String {s.label!r} sites {bad} out of range for {n_sites} sites')


def _parities(occ: np.ndarray, strings: Sequence[StringSpec]) -> np.ndarray:
    ''' Z parity of every row for every string, shape (rows, strings) '''
    out = np.empty((len(occ), len(strings)))
    for k, s in enumerate(strings):
        _check_sites(occ.shape[1], s)
        odd = occ[:, list(s.sites)].sum(axis=1) % 2 if s.sites else np.zeros(len(occ), dtype=int)
        out[:, k] = 1 - 2*odd
    return out


def sample_snapshots(psi: StateVector, n: int, seed: int,
                     endpoint: Optional[float] = None, readout: str = 'prepared') -> SnapshotSet:
    ''' Draw n projective snapshots from |psi|^2 with a counter-based generator

        The same (psi, n, seed) always yields the same snapshots.
    '''
    if n < 0:
        raise ValueError(f'Number of snapshots must be nonnegative, got {n}')
    p = psi.probabilities()
    total = p.sum()
    if abs(total - 1) > 1E-9:
        logging.warning('Sampling a state with norm^2 %.12g; renormalizing', total)
    rng = np.random.Generator(np.random.Philox(seed))
    idx = rng.choice(psi.dim, size=n, p=p/total)
    return SnapshotSet(psi.basis.occupations[idx], endpoint=endpoint, seed=seed, readout=readout)


def apply_readout_errors(snaps: SnapshotSet, p01: float, p10: float, seed: int) -> SnapshotSet:
    ''' Independent bit-flip readout channel

        Args:
            snaps: Ideal snapshots
            p01: Probability a ground-state atom reads as excited
            p10: Probability an excited atom reads as ground
            seed: Seed of the flip pattern
    '''
    for p in (p01, p10):
        if not 0 <= p <= 1:
            raise ValueError(f'Readout error probability {p} outside [0, 1]')
    rng = np.random.Generator(np.random.Philox(seed))
    u = rng.random(snaps.occupations.shape)
    occ = snaps.occupations
    flip = np.where(occ, u < p10, u < p01)
    return SnapshotSet(occ ^ flip, endpoint=snaps.endpoint, seed=snaps.seed, readout=snaps.readout)


def z_parity_exact(psi: StateVector, s: StringSpec) -> float:
    ''' <psi| prod_{i in s} (1 - 2 n_i) |psi> '''
    return float(psi.probabilities() @ _parities(psi.basis.occupations, [s])[:, 0])


def z_parity_snap(snap: Union[Snapshot, str, np.ndarray], s: StringSpec) -> int:
    ''' Parity (+1 or -1) of Z string s in a single snapshot '''
    if isinstance(snap, Snapshot):
        snap = snap.occupation
    if isinstance(snap, str):
        snap = np.array([c == '1' for c in snap], dtype=bool)
    occ = np.asarray(snap, dtype=bool)[None, :]
    return int(_parities(occ, [s])[0, 0])


def z_operator(basis: ConstrainedBasis, s: StringSpec) -> SparseOperator:
    ''' Diagonal operator of Z string s '''
    return SparseOperator(sp.diags(_parities(basis.occupations, [s])[:, 0]), basis)


def apply_z_string(psi: StateVector, s: StringSpec) -> StateVector:
    ''' Z string acting on a state (an open string creates m-anyons) '''
    return StateVector(psi.basis, psi.amplitudes * _parities(psi.basis.occupations, [s])[:, 0])


def _x_image(lat: RubyLattice, occ: np.ndarray, s: StringSpec) -> tuple[np.ndarray, np.ndarray]:
    ''' Image rows and signs of occupation rows under X string s.

        Per triangle, stepping along edge e: the empty triangle and the
        triangle excited on e swap with sign -1, the other two single
        excitations swap with sign +1.
    '''
    if s.kind != 'X':
        raise ValueError(f'Expected an X string, got {s.kind} string {s.label!r}')
    if occ.shape[1] != lat.n_sites:
        raise ValueError(f'Occupations have {occ.shape[1]} sites, lattice has {lat.n_sites}')
    occ = occ.copy()
    sign = np.ones(len(occ))
    for t, e in s.steps:
        tri = lat.triangles[t].sites
        se, sa, sb = tri[e], tri[(e+1) % 3], tri[(e+2) % 3]
        oe, oa, ob = occ[:, se].copy(), occ[:, sa].copy(), occ[:, sb].copy()
        if (oe.astype(int) + oa + ob > 1).any():
            raise ValueError(f'Triangle {t} holds more than one excitation')
        occ[:, se] = ~(oe | oa | ob)
        occ[:, sa] = ob
        occ[:, sb] = oa
        sign *= np.where(oa | ob, 1.0, -1.0)
    return occ, sign


def x_image(lat: RubyLattice, state: BasisState, s: StringSpec) -> tuple[BasisState, int]:
    ''' X string acting on one occupation configuration: (image, sign) '''
    row = occupations(as_states([state], lat.n_sites), lat.n_sites)
    occ, sign = _x_image(lat, row, s)
    return int(pack(occ)[0]), int(sign[0])


def x_operator(lat: RubyLattice, s: StringSpec,
               basis: Optional[ConstrainedBasis] = None) -> SparseOperator:
    ''' Sparse matrix of X string s

        Args:
            lat: The lattice
            s: X string
            basis: Basis containing every image state. Defaults to the
                intra-triangle blockade basis of the lattice.
    '''
    basis = enumerate_basis(triangle_graph(lat)) if basis is None else basis
    occ, sign = _x_image(lat, basis.occupations, s)
    idx = basis.lookup(pack(occ))
    if (idx < 0).any():
        raise ValueError(f'X string {s.label!r} maps {int((idx < 0).sum())} basis states '
                         'outside the basis')
    mat = sp.coo_matrix((sign, (idx, np.arange(basis.dim))), shape=(basis.dim, basis.dim))
    return SparseOperator(mat, basis)


def x_parity_exact(psi: StateVector, lat: RubyLattice, s: StringSpec) -> float:
    ''' <psi|X_s|psi>. Images outside psi's basis carry no amplitude. '''
    occ, sign = _x_image(lat, psi.basis.occupations, s)
    idx = psi.basis.lookup(pack(occ))
    keep = idx >= 0
    amps = psi.amplitudes
    return float(np.sum(np.conj(amps[idx[keep]]) * sign[keep] * amps[keep]).real)


def _loop_report(values: np.ndarray, weights: Optional[np.ndarray], observable: str,
                 label: str, endpoint, seed) -> ObservableReport:
    ''' Average over loop instances within each row, then over rows '''
    per_row = values.mean(axis=1)
    if weights is not None:
        return ObservableReport(observable, label, endpoint, float(weights @ per_row), 0.0,
                                0, values.shape[1], seed)
    n = len(per_row)
    stderr = float(per_row.std(ddof=1) / math.sqrt(n)) if n > 1 else float('nan')
    return ObservableReport(observable, label, endpoint, float(per_row.mean()), stderr,
                            n, values.shape[1], seed)


def _meta(target: Target, endpoint):
    if isinstance(target, SnapshotSet):
        return (target.endpoint if endpoint is None else endpoint), target.seed
    return endpoint, None


def z_report(target: Target, strings: Sequence[StringSpec], label: str,
             observable: str = 'z-loop', endpoint: Optional[float] = None) -> ObservableReport:
    ''' Loop-averaged Z parity of a set of symmetry-equivalent strings '''
    if not strings:
        raise ValueError(f'No string instances for {label!r}')
    occ, weights = _rows(target)
    endpoint, seed = _meta(target, endpoint)
    return _loop_report(_parities(occ, strings), weights, observable, label, endpoint, seed)


def _quenched(target: Target, lat: RubyLattice, q: Optional[QuenchSpec]) -> Target:
    if isinstance(target, StateVector):
        return apply_quench(target, lat, q or QuenchSpec())
    if target.readout != 'quench':
        raise ValueError('X strings on snapshots need quench readout')
    return target


def x_report(target: Target, lat: RubyLattice, strings: Sequence[StringSpec], label: str,
             q: Optional[QuenchSpec] = None, n: Optional[int] = None,
             seed: Optional[int] = None, observable: str = 'x-loop',
             endpoint: Optional[float] = None) -> ObservableReport:
    ''' Loop-averaged X parity measured through the quench

        Args:
            target: Prepared state, or snapshots taken after the quench
            lat: The lattice
            strings: X strings
            label: Report label
            q: Quench pulse (default QuenchSpec())
            n: Number of snapshots to sample from the quenched state.
                None evaluates the quenched state exactly.
            seed: Sampling seed
    '''
    duals = [dual_string(lat, s) for s in strings]
    quenched = _quenched(target, lat, q)
    if n is not None and isinstance(quenched, StateVector):
        quenched = sample_snapshots(quenched, n, seed, endpoint=endpoint, readout='quench')
    return z_report(quenched, duals, label, observable, endpoint)


def x_parity_via_quench(psi: StateVector, lat: RubyLattice, q: QuenchSpec, s: StringSpec,
                        n: Optional[int] = None, seed: Optional[int] = None) -> ObservableReport:
    ''' X parity of one string from the dual Z string after the quench,
        exactly (n=None) or from n snapshots
    '''
    return x_report(psi, lat, [s], s.label, q, n, seed)


def phase_scan(psi: StateVector, lat: RubyLattice, s: StringSpec, phases: Iterable[float],
               q: Optional[QuenchSpec] = None) -> list[tuple[float, float]]:
    ''' Exact quench-path X parity of s for each quench drive phase '''
    q = q or QuenchSpec()
    out = []
    for phi in phases:
        rep = x_parity_via_quench(psi, lat, replace(q, phase=phi), s)
        out.append((float(phi), rep.estimate))
    return out


def bffm(open_estimate: float, closed_estimate: float) -> Optional[float]:
    ''' Open-string expectation normalized by the square root of its closed
        completion. Returns None when |closed| is below 1e-3.
    '''
    if abs(closed_estimate) < BFFM_EPS:
        logging.warning('Closed loop parity %.3g too small; BFFM undefined', closed_estimate)
        return None
    return open_estimate / math.sqrt(abs(closed_estimate))


def bffm_report(open_rep: ObservableReport, closed_rep: ObservableReport,
                observable: str = 'bffm') -> ObservableReport:
    ''' BFFM ratio of two reports, with first-order error propagation '''
    value = bffm(open_rep.estimate, closed_rep.estimate)
    if value is None:
        stderr = None
    else:
        c = abs(closed_rep.estimate)
        stderr = math.hypot(open_rep.stderr / math.sqrt(c),
                            open_rep.estimate * closed_rep.stderr / (2*c**1.5))
    return ObservableReport(observable, open_rep.label, open_rep.endpoint, value, stderr,
                            open_rep.n_samples, open_rep.n_loop_instances, open_rep.seed)


def bffm_pair(target: Target, lat: RubyLattice, template: str, kind: str = 'Z',
              q: Optional[QuenchSpec] = None, n: Optional[int] = None,
              seed: Optional[int] = None) -> tuple[ObservableReport, ObservableReport, ObservableReport]:
    ''' (open, closed, BFFM) reports for a half-loop template and its closures '''
    halves = enumerate_loops(lat, template, kind)
    if not halves:
        raise ValueError(f'Template {template!r} has no placements on {lat}')
    closures = list({s.closure.sites if kind == 'Z' else s.closure.steps: s.closure
                     for s in halves}.values())
    name = f'bffm-{kind.lower()}'
    if kind == 'Z':
        opened = z_report(target, halves, template, name + ':open')
        closed = z_report(target, closures, template, name + ':closed')
    else:
        quenched = _quenched(target, lat, q)
        if n is not None and isinstance(quenched, StateVector):
            quenched = sample_snapshots(quenched, n, seed, readout='quench')
        opened = z_report(quenched, [dual_string(lat, s) for s in halves], template, name + ':open')
        closed = z_report(quenched, [dual_string(lat, s) for s in closures], template, name + ':closed')
    return opened, closed, bffm_report(opened, closed, name)


def vertex_stats(target: Target, lat: RubyLattice) -> VertexStats:
    ''' Fractions of bulk vertices touching 0, 1 and 2+ excited links '''
    occ, weights = _rows(target)
    bulk = lat.bulk_vertices()
    if len(bulk) == 0:
        raise ValueError(f'{lat} has no bulk vertices at depth {lat.bulk_depth}')
    counts = occ.astype(np.int16) @ lat.incidence[:, bulk].astype(np.int16)
    fractions = []
    for cls in (counts == 0, counts == 1, counts >= 2):
        per_row = cls.mean(axis=1)
        fractions.append(float(per_row.mean() if weights is None else weights @ per_row))
    return VertexStats(*fractions)


def mean_density(target: Target, lat: RubyLattice,
                 region: str = 'bulk') -> Union[float, np.ndarray]:
    ''' Mean Rydberg density over bulk sites, all sites, or per site

        Args:
            region: 'bulk', 'all' or 'site' (returns one value per site)
    '''
    occ, weights = _rows(target)
    per_site = occ.mean(axis=0) if weights is None else weights @ occ
    if region == 'site':
        return np.asarray(per_site, dtype=float)
    if region == 'all':
        return float(per_site.mean())
    if region == 'bulk':
        bulk = lat.bulk_sites()
        if len(bulk) == 0:
            raise ValueError(f'{lat} has no bulk sites at depth {lat.bulk_depth}')
        return float(per_site[bulk].mean())
    raise ValueError(f'Unknown region {region!r}')


def _row_report(per_row: np.ndarray, weights: Optional[np.ndarray], observable: str,
                label: str, target: Target, endpoint) -> ObservableReport:
    endpoint, seed = _meta(target, endpoint)
    return _loop_report(per_row[:, None], weights, observable, label, endpoint, seed)


def density_report(target: Target, lat: RubyLattice,
                   endpoint: Optional[float] = None) -> ObservableReport:
    ''' Mean bulk density (all sites when there is no bulk) as a report '''
    occ, weights = _rows(target)
    sites = lat.bulk_sites()
    label = 'bulk'
    if len(sites) == 0:
        sites, label = np.arange(lat.n_sites), 'all'
    return _row_report(occ[:, sites].mean(axis=1), weights, 'density', label, target, endpoint)


def vertex_reports(target: Target, lat: RubyLattice,
                   endpoint: Optional[float] = None) -> list[ObservableReport]:
    ''' Monomer, single-dimer and double-dimer fractions of bulk vertices as reports '''
    occ, weights = _rows(target)
    bulk = lat.bulk_vertices()
    if len(bulk) == 0:
        raise ValueError(f'{lat} has no bulk vertices at depth {lat.bulk_depth}')
    counts = occ.astype(np.int16) @ lat.incidence[:, bulk].astype(np.int16)
    out = []
    for name, cls in zip(VertexStats._fields, (counts == 0, counts == 1, counts >= 2)):
        out.append(_row_report(cls.mean(axis=1), weights, 'vertex', name, target, endpoint))
    return out


def density_profile(target: Target, lat: RubyLattice) -> dict[int, float]:
    ''' Mean density of each site layer (distance from the boundary) '''
    per_site = mean_density(target, lat, 'site')
    layers = lat.site_layers
    return {int(k): float(per_site[layers == k].mean()) for k in np.unique(layers)}


def _correlator_instances(lat: RubyLattice, order: int, kind: str,
                          template: Optional[str] = None) -> list[tuple[str, list[StringSpec]]]:
    ''' Hexagon parities grouped by adjacent-hexagon template placements '''
    if order not in (2, 3):
        raise ValueError(f'Correlator order must be 2 or 3, got {order}')
    template = template or ('double-hexagon' if order == 2 else 'triple-hexagon')
    out = []
    for inst in enumerate_loops(lat, template, 'X'):
        faces = inst.enclosed_faces
        if len(faces) != order:
            raise ValueError(f'Template {template!r} encloses {len(faces)} hexagons, not {order}')
        if kind == 'Z':
            parts = [z_loop(lat, lat.faces[f].vertices) for f in faces]
            if any((lat.coordination[list(p.enclosed_vertices)] < 4).any() for p in parts):
                continue
        else:
            parts = [dual_string(lat, x_loop(lat, [f])) for f in faces]
        out.append((inst.label, parts))
    return out


def connected(values: np.ndarray, weights: np.ndarray) -> float:
    ''' Connected correlator (joint cumulant) of 2 or 3 parity columns '''
    def e(*cols):
        return float(weights @ np.prod(values[:, list(cols)], axis=1))
    if values.shape[1] == 2:
        return e(0, 1) - e(0)*e(1)
    p1, p2, p3 = e(0), e(1), e(2)
    g12 = e(0, 1) - p1*p2
    g13 = e(0, 2) - p1*p3
    g23 = e(1, 2) - p2*p3
    return e(0, 1, 2) - g12*p3 - g13*p2 - g23*p1 - p1*p2*p3


def connected_correlators(target: Target, lat: RubyLattice, order: int = 2, kind: str = 'Z',
                          q: Optional[QuenchSpec] = None, template: Optional[str] = None,
                          endpoint: Optional[float] = None) -> ObservableReport:
    ''' Connected two- or three-point correlator of adjacent hexagon parities,
        averaged over placements. Snapshot errors use a blocked jackknife.

        Args:
            target: State or snapshots (quench readout for kind 'X')
            lat: The lattice
            order: 2 or 3
            kind: 'Z', or 'X' (measured through the quench)
            q: Quench pulse for kind 'X' on a state
            template: Placement template (default double- or triple-hexagon)
    '''
    instances = _correlator_instances(lat, order, kind, template)
    if not instances:
        raise ValueError(f'No placements for the order-{order} correlator on {lat}')
    if kind == 'X':
        target = _quenched(target, lat, q)
    occ, weights = _rows(target)
    endpoint, seed = _meta(target, endpoint)
    values = [_parities(occ, parts) for _, parts in instances]

    def average(w):
        return float(np.mean([connected(v, w) for v in values]))

    name = f'g{order}-{kind.lower()}'
    label = f'g{order}'
    if weights is not None:
        return ObservableReport(name, label, endpoint, average(weights), 0.0, 0, len(values), seed)
    n = len(occ)
    blocks = np.array_split(np.arange(n), min(JACKKNIFE_BLOCKS, n))
    full = average(np.full(n, 1/n))
    stderr = float('nan')
    if len(blocks) > 1:
        loo = []
        for blk in blocks:
            w = np.full(n, 1/(n - len(blk)))
            w[blk] = 0
            loo.append(average(w))
        loo = np.array(loo)
        nb = len(blocks)
        stderr = float(math.sqrt((nb - 1)/nb * np.sum((loo - loo.mean())**2)))
    return ObservableReport(name, label, endpoint, full, stderr, n, len(values), seed)


def scaling_report(estimates: dict[str, float],
                   loops: dict[str, StringSpec]) -> dict[str, ScalingRoots]:
    ''' Per-area and per-perimeter roots |estimate|^(1/area), |estimate|^(1/perimeter)

        Area is the number of enclosed vertices (Z) or hexagons (X); perimeter
        the number of sites (Z) or steps (X) on the loop.
    '''
    out = {}
    for label, value in estimates.items():
        s = loops[label]
        area, perim = s.area, s.perimeter
        if area <= 0 or perim <= 0:
            raise ValueError(f'Loop {label!r} has area {area} and perimeter {perim}')
        if value == 0:
            logging.warning('Zero estimate for %s; scaling roots set to 0', label)
        mag = abs(value)
        out[label] = ScalingRoots(area, perim, mag**(1/area), mag**(1/perim))
    return out


def defect_model_parities(lat: RubyLattice, loops: Sequence[StringSpec], p: float,
                          n: int, seed: int, label: Optional[str] = None) -> list[ObservableReport]:
    ''' Z loop parities of a perfect covering with independent vertex defects

        Each vertex is flipped with probability p in each of n repetitions,
        so a loop enclosing A vertices has mean parity (-1)^A (1-2p)^A.
    '''
    if not 0 <= p <= 1:
        raise ValueError(f'Flip probability {p} outside [0, 1]')
    rng = np.random.Generator(np.random.Philox(seed))
    flips = rng.random((n, len(lat.vertices))) < p
    out = []
    for s in loops:
        if s.kind != 'Z' or not s.enclosed_vertices:
            raise ValueError(f'Loop {s.label!r} is not a Z loop around vertices')
        odd = (flips[:, list(s.enclosed_vertices)].sum(axis=1) + s.area) % 2
        out.append(_loop_report((1 - 2*odd)[:, None].astype(float), None, 'defect-model',
                                label or s.label, None, seed))
    return out


def logical_ops(target: Target, lat: RubyLattice,
                x_target: Optional[Target] = None,
                q: Optional[QuenchSpec] = None) -> LogicalReport:
    ''' Logical string expectations on a lattice with a hole

        Z_L strings run from the hole to the outer boundary; X_L loops wind
        the hole once. ZZ holds <Z_i Z_j> for every pair of Z_L strings.

        Args:
            target: State or prepared-readout snapshots for the Z strings
            lat: Lattice with a hole
            x_target: Source of X_L values: a state (exact), or quench
                readout snapshots. Defaults to target when it is a state.
            q: Quench pulse, used only with an explicit state x_target
    '''
    if lat.hole is None:
        raise ValueError(f'{lat} has no hole')
    zs = enumerate_loops(lat, 'hole-to-boundary')
    if not zs:
        raise ValueError(f'No hole-to-boundary strings fit on {lat}')
    for s in zs:
        check_logical_string(lat, s)
    occ, weights = _rows(target)
    vals = _parities(occ, zs)
    w = np.full(len(occ), 1/len(occ)) if weights is None else weights
    z_l = {s.label: float(w @ vals[:, k]) for k, s in enumerate(zs)}
    zz = {}
    for a in range(len(zs)):
        for b in range(a+1, len(zs)):
            zz[(zs[a].label, zs[b].label)] = float(w @ (vals[:, a]*vals[:, b]))
    x_l = {}
    if x_target is None and isinstance(target, StateVector):
        x_target = target
    if x_target is not None:
        for s in enumerate_loops(lat, 'hole-loop'):
            if isinstance(x_target, StateVector) and q is None:
                x_l[s.label] = x_parity_exact(x_target, lat, s)
            else:
                x_l[s.label] = x_report(x_target, lat, [s], s.label, q).estimate
    return LogicalReport(z_l, x_l, zz)
