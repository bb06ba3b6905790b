''' Ruby lattice geometry: atoms on the links of a kagome lattice '''

from __future__ import annotations
from typing import Optional, Union, Sequence, Iterable
from collections import deque
from functools import cached_property
from pathlib import Path
import math
import json
import logging

import numpy as np

from .config import config
from .rubytypes import Triangle, Vertex, Face, Interaction


SQRT3 = math.sqrt(3)
# Kagome bond length is 2a so that neighbouring ruby sites in a triangle are 1a apart
A1 = np.array([4.0, 0.0])
A2 = np.array([2.0, 2*SQRT3])
SUBLATTICE = {'A': np.array([0.0, 0.0]),
              'B': np.array([2.0, 0.0]),
              'C': np.array([1.0, SQRT3])}
SCHEMA = 'rubyqsl.lattice/1'
BOUNDARIES = ('open', 'torus')

HoleSpec = Union[None, int, str]
VertexKey = tuple[str, int, int]


def _corners(i: int, j: int, up: bool) -> list[VertexKey]:
    ''' Kagome vertices of the up or down triangle of cell (i, j).
        Edge k of a triangle joins corners k and k+1.
    '''
    if up:
        return [('A', i, j), ('B', i, j), ('C', i, j)]
    return [('B', i, j), ('A', i+1, j), ('C', i+1, j-1)]


def _vertexpos(key: VertexKey) -> np.ndarray:
    sub, i, j = key
    return SUBLATTICE[sub] + i*A1 + j*A2


def poskey(p: Sequence[float]) -> tuple[float, float]:
    ''' Hashable key for a (canonical) position '''
    return (round(float(p[0]), 6) + 0.0, round(float(p[1]), 6) + 0.0)


class BlockadeGraph:
    ''' Undirected graph of site pairs that cannot be simultaneously excited

        Args:
            n_sites: Number of sites
            edges: Iterable of (i, j) site pairs
            rb_over_a: Blockade radius the graph was built with, if any
    '''
    def __init__(self, n_sites: int, edges: Iterable[tuple[int, int]],
                 rb_over_a: Optional[float] = None):
        self.n_sites = int(n_sites)
        self.rb_over_a = rb_over_a
        pairs = set()
        for i, j in edges:
            i, j = int(i), int(j)
            if i == j:
                raise ValueError(f'Self-edge at site {i}')
            if not (0 <= i < self.n_sites and 0 <= j < self.n_sites):
                raise ValueError(f'Edge ({i}, {j}) outside {self.n_sites} sites')
            pairs.add((min(i, j), max(i, j)))
        self.edges = frozenset(pairs)

    def __repr__(self):
        return f'<BlockadeGraph {self.n_sites} sites, {len(self.edges)} edges>'

    def __eq__(self, other):
        return (isinstance(other, BlockadeGraph) and self.n_sites == other.n_sites
                and self.edges == other.edges)

    def __hash__(self):
        return hash((self.n_sites, self.edges))

    @cached_property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        ''' Sorted neighbour list of every site '''
        nbrs: list[list[int]] = [[] for _ in range(self.n_sites)]
        for i, j in self.edges:
            nbrs[i].append(j)
            nbrs[j].append(i)
        return tuple(tuple(sorted(n)) for n in nbrs)

    def neighbors(self, i: int) -> tuple[int, ...]:
        ''' Sites blockaded by site i '''
        return self.adjacency[i]

    def degree(self, i: int) -> int:
        return len(self.adjacency[i])


class RubyLattice:
    ''' Atom sites on the links of a kagome lattice, with the kagome vertices,
        triangles and hexagonal faces they bound. Use `build_ruby_lattice`
        or `load_lattice` rather than instantiating directly.

        Args:
            rows: Number of unit-cell rows
            cols: Number of unit-cell columns
            boundary: 'open' or 'torus'
            sites: Site positions, shape (n, 2), in units of the lattice spacing
            triangles: Triangle records (site indices, corner vertex indices,
                orientation, center)
            vertices: Vertex records (position, adjacent sites, adjacent triangles)
            faces: Complete and partial hexagonal faces
            hole: Index of the removed triangle, before renumbering
            hole_center: Position of the removed triangle's center
            removed: Original indices of the removed sites
            bulk_depth: Number of boundary layers excluded from bulk statistics
    '''
    def __init__(self, rows: int, cols: int, boundary: str,
                 sites: np.ndarray,
                 triangles: Sequence[Triangle],
                 vertices: Sequence[Vertex],
                 faces: Sequence[Face],
                 hole: Optional[int] = None,
                 hole_center: Optional[Sequence[float]] = None,
                 removed: Sequence[int] = (),
                 bulk_depth: Optional[int] = None):
        if boundary not in BOUNDARIES:
            raise ValueError(f'Unknown boundary {boundary!r}')
        self.rows = rows
        self.cols = cols
        self.boundary = boundary
        self.sites = np.asarray(sites, dtype=float).reshape(-1, 2)
        self.sites.setflags(write=False)
        self.triangles = tuple(triangles)
        self.vertices = tuple(vertices)
        self.faces = tuple(faces)
        self.hole = hole
        self.hole_center = None if hole_center is None else tuple(float(x) for x in hole_center)
        self.removed = tuple(int(r) for r in removed)
        self.bulk_depth = config.bulk_depth if bulk_depth is None else int(bulk_depth)
        self._check()

    def _check(self) -> None:
        ''' Verify every site belongs to exactly one triangle and two vertices '''
        owner = np.full(self.n_sites, -1)
        for t, tri in enumerate(self.triangles):
            for s in tri.sites:
                if owner[s] != -1:
                    raise ValueError(f'Site {s} belongs to triangles {owner[s]} and {t}')
                owner[s] = t
        if (owner < 0).any():
            raise ValueError(f'Sites {np.flatnonzero(owner < 0).tolist()} belong to no triangle')
        count = np.zeros(self.n_sites, dtype=int)
        for v in self.vertices:
            count[list(v.sites)] += 1
        if (count != 2).any():
            raise ValueError('Every site must touch exactly two vertices')

    def __repr__(self):
        hole = ', holed' if self.hole is not None else ''
        return f'<RubyLattice {self.rows}x{self.cols} {self.boundary}{hole}: {self.n_sites} sites>'

    @property
    def n_sites(self) -> int:
        return len(self.sites)

    @property
    def torus(self) -> bool:
        return self.boundary == 'torus'

    @property
    def periods(self) -> Optional[tuple[np.ndarray, np.ndarray]]:
        ''' Torus period vectors, or None for open boundaries '''
        if not self.torus:
            return None
        return (self.cols*A1, self.rows*A2)

    @property
    def hexagons(self) -> tuple[Face, ...]:
        ''' Complete hexagonal plaquettes (all six bounding sites present) '''
        return tuple(f for f in self.faces if f.complete)

    def minimage(self, d: np.ndarray) -> np.ndarray:
        ''' Shortest periodic image of displacement vectors d (shape (..., 2)) '''
        d = np.asarray(d, dtype=float)
        if not self.torus:
            return d
        basis = np.column_stack(self.periods)
        frac = d @ np.linalg.inv(basis).T
        frac = frac - np.round(frac)
        shifts = np.array([(m, n) for m in (-1, 0, 1) for n in (-1, 0, 1)], dtype=float)
        cands = (frac[..., None, :] + shifts) @ basis.T
        best = np.argmin(np.linalg.norm(cands, axis=-1), axis=-1)
        idx = np.broadcast_to(best[..., None, None], best.shape + (1, 2))
        return np.take_along_axis(cands, idx, axis=-2)[..., 0, :]

    def canonical(self, p: Sequence[float]) -> np.ndarray:
        ''' Position folded into the fundamental cell (torus) '''
        return _canonical(np.asarray(p, dtype=float), self.periods)

    @cached_property
    def distances(self) -> np.ndarray:
        ''' Minimum-image distance between every pair of sites '''
        d = self.sites[None, :, :] - self.sites[:, None, :]
        dist = np.linalg.norm(self.minimage(d), axis=-1)
        dist.setflags(write=False)
        return dist

    @cached_property
    def site_triangle(self) -> np.ndarray:
        ''' Triangle index of each site '''
        out = np.empty(self.n_sites, dtype=int)
        for t, tri in enumerate(self.triangles):
            out[list(tri.sites)] = t
        return out

    @cached_property
    def site_edge(self) -> np.ndarray:
        ''' Edge index (0-2) of each site within its triangle '''
        out = np.empty(self.n_sites, dtype=int)
        for tri in self.triangles:
            out[list(tri.sites)] = [0, 1, 2]
        return out

    @cached_property
    def site_vertices(self) -> np.ndarray:
        ''' The two kagome vertices joined by each link site, shape (n, 2) '''
        out = np.empty((self.n_sites, 2), dtype=int)
        for tri in self.triangles:
            for e, s in enumerate(tri.sites):
                out[s] = (tri.corners[e], tri.corners[(e+1) % 3])
        return out

    @cached_property
    def coordination(self) -> np.ndarray:
        ''' Number of link sites touching each vertex '''
        return np.array([len(v.sites) for v in self.vertices], dtype=int)

    @cached_property
    def vertex_layers(self) -> np.ndarray:
        ''' Graph distance of each vertex from the nearest boundary vertex
            (a vertex with fewer than four links). Without boundaries every
            vertex is assigned the vertex count.
        '''
        nvert = len(self.vertices)
        layers = np.full(nvert, nvert, dtype=int)
        queue = deque(np.flatnonzero(self.coordination < 4).tolist())
        layers[list(queue)] = 0
        nbrs: list[list[int]] = [[] for _ in range(nvert)]
        for u, w in self.site_vertices:
            nbrs[u].append(w)
            nbrs[w].append(u)
        while queue:
            v = queue.popleft()
            for w in nbrs[v]:
                if layers[w] > layers[v] + 1:
                    layers[w] = layers[v] + 1
                    queue.append(w)
        return layers

    @cached_property
    def site_layers(self) -> np.ndarray:
        ''' Layer of each site: the smaller layer of its two vertices '''
        return self.vertex_layers[self.site_vertices].min(axis=1)

    def bulk_vertices(self) -> np.ndarray:
        ''' Vertices at least `bulk_depth` layers from any boundary '''
        return np.flatnonzero(self.vertex_layers >= self.bulk_depth)

    def bulk_sites(self) -> np.ndarray:
        ''' Sites at least `bulk_depth` layers from any boundary '''
        return np.flatnonzero(self.site_layers >= self.bulk_depth)

    def covered_vertices(self, rule: str = 'exempt') -> np.ndarray:
        ''' Vertices that must touch exactly one dimer in a perfect covering.

            Args:
                rule: 'exempt' releases boundary vertices (fewer than four
                    links), 'strict' constrains every vertex.
        '''
        if rule == 'strict':
            return np.arange(len(self.vertices))
        if rule == 'exempt':
            return np.flatnonzero(self.coordination == 4)
        raise ValueError(f'Unknown boundary rule {rule!r}')

    @cached_property
    def incidence(self) -> np.ndarray:
        ''' Site-vertex incidence matrix, shape (n_sites, n_vertices) '''
        inc = np.zeros((self.n_sites, len(self.vertices)), dtype=np.int8)
        for v, vert in enumerate(self.vertices):
            inc[list(vert.sites), v] = 1
        return inc

    @cached_property
    def hole_vertices(self) -> tuple[int, ...]:
        ''' Vertices on the inner boundary left by the hole '''
        if self.hole_center is None:
            return ()
        c = np.array(self.hole_center)
        out = []
        for v, vert in enumerate(self.vertices):
            if np.linalg.norm(self.minimage(np.array(vert.pos) - c)) < 1.2:
                out.append(v)
        return tuple(out)

    def inner_boundary_sites(self) -> tuple[int, ...]:
        ''' Sites touching the hole '''
        hv = set(self.hole_vertices)
        return tuple(s for s in range(self.n_sites)
                     if hv.intersection(self.site_vertices[s].tolist()))

    @cached_property
    def _vertexlookup(self) -> dict:
        return {poskey(v.pos): k for k, v in enumerate(self.vertices)}

    @cached_property
    def _facelookup(self) -> dict:
        return {poskey(f.center): k for k, f in enumerate(self.faces)}

    def vertex_at(self, p: Sequence[float]) -> Optional[int]:
        ''' Index of the vertex at position p, or None '''
        return self._vertexlookup.get(poskey(self.canonical(p)))

    def face_at(self, p: Sequence[float]) -> Optional[int]:
        ''' Index of the face centered at position p, or None '''
        return self._facelookup.get(poskey(self.canonical(p)))

    def site_between(self, u: int, w: int) -> Optional[int]:
        ''' Link site joining vertices u and w, or None '''
        common = set(self.vertices[u].sites).intersection(self.vertices[w].sites)
        for s in sorted(common):
            if sorted(self.site_vertices[s].tolist()) == sorted((u, w)):
                return s
        return None

    def draw(self, strings: Sequence = (), occupation: Optional[int] = None, **kwargs):
        ''' Draw the lattice, optionally highlighting strings and occupied sites '''
        from .latticeinspect import LatticeDrawing
        return LatticeDrawing(self, strings=strings, occupation=occupation, **kwargs)

    def to_dict(self) -> dict:
        ''' Lattice as a JSON-compatible document '''
        def pt(p):
            return [float(p[0]), float(p[1])]
        return {
            'schema': SCHEMA,
            'rows': self.rows,
            'cols': self.cols,
            'boundary': self.boundary,
            'hole': self.hole,
            'hole_center': None if self.hole_center is None else list(self.hole_center),
            'removed': list(self.removed),
            'bulk_depth': self.bulk_depth,
            'sites': [pt(p) for p in self.sites],
            'triangles': [{'sites': list(t.sites), 'corners': list(t.corners),
                           'up': t.up, 'center': pt(t.center)} for t in self.triangles],
            'vertices': [{'pos': pt(v.pos), 'sites': list(v.sites),
                          'triangles': list(v.triangles)} for v in self.vertices],
            'faces': [{'center': pt(f.center), 'sites': list(f.sites),
                       'steps': [list(s) for s in f.steps], 'vertices': list(f.vertices),
                       'complete': f.complete, 'hole_adjacent': f.hole_adjacent}
                      for f in self.faces],
            'hexagons': [k for k, f in enumerate(self.faces) if f.complete],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> 'RubyLattice':
        ''' Rebuild a lattice from `to_dict` output '''
        if doc.get('schema') != SCHEMA:
            raise ValueError(f'Unsupported lattice schema {doc.get("schema")!r}')
        triangles = [Triangle(tuple(t['sites']), tuple(t['corners']), bool(t['up']),
                              tuple(t['center'])) for t in doc['triangles']]
        vertices = [Vertex(tuple(v['pos']), tuple(v['sites']), tuple(v['triangles']))
                    for v in doc['vertices']]
        faces = [Face(tuple(f['center']), tuple(f['sites']),
                      tuple(tuple(s) for s in f['steps']), tuple(f['vertices']),
                      bool(f['complete']), bool(f['hole_adjacent'])) for f in doc['faces']]
        return cls(doc['rows'], doc['cols'], doc['boundary'], np.array(doc['sites']),
                   triangles, vertices, faces, hole=doc['hole'],
                   hole_center=doc['hole_center'], removed=doc['removed'],
                   bulk_depth=doc['bulk_depth'])


def _canonical(p: np.ndarray, periods) -> np.ndarray:
    if periods is None:
        return p
    basis = np.column_stack(periods)
    frac = np.linalg.solve(basis, p)
    frac = frac - np.floor(frac + 1E-9)
    return basis @ frac


def _resolve_hole(hole: HoleSpec, centers: np.ndarray, torus: bool,
                  rows: int, cols: int) -> Optional[int]:
    ''' Raw index of the triangle removed by the hole specification '''
    if hole is None:
        return None
    if torus and (rows < 2 or cols < 2):
        raise ValueError(f'Hole on a {rows}x{cols} torus has ambiguous winding; '
                         'use at least 2x2')
    if isinstance(hole, str):
        if hole != 'center':
            raise ValueError(f'Unknown hole specification {hole!r}')
        target = centers.mean(axis=0)
        return int(np.argmin(np.linalg.norm(centers - target, axis=1)))
    if isinstance(hole, (int, np.integer)) and not isinstance(hole, bool):
        if not 0 <= hole < len(centers):
            raise ValueError(f'Hole triangle {hole} does not exist '
                             f'(lattice has {len(centers)} triangles)')
        return int(hole)
    raise ValueError(f'Unknown hole specification {hole!r}')


def _angular(center: np.ndarray, points: np.ndarray, lat_minimage) -> np.ndarray:
    ''' Order of points by angle around center '''
    d = lat_minimage(points - center)
    return np.argsort(np.arctan2(d[:, 1], d[:, 0]), kind='stable')


def build_ruby_lattice(rows: int, cols: int, boundary: str = 'open',
                       hole: HoleSpec = None, bulk_depth: Optional[int] = None) -> RubyLattice:
    ''' Build a ruby lattice of rows x cols kagome unit cells (6 sites per cell)

        Parameters
        ----------
        rows: Number of unit-cell rows (along a2)
        cols: Number of unit-cell columns (along a1)
        boundary: 'open' or 'torus'
        hole: None, a triangle index, or 'center' for the triangle nearest
            the lattice centroid. The three sites of that triangle are removed.
        bulk_depth: Boundary layers excluded from bulk statistics

        Returns
        -------
        RubyLattice
    '''
    if rows < 1 or cols < 1:
        raise ValueError(f'Lattice needs at least one row and column, got {rows}x{cols}')
    if boundary not in BOUNDARIES:
        raise ValueError(f'Unknown boundary {boundary!r}; use one of {BOUNDARIES}')
    torus = boundary == 'torus'
    periods = (cols*A1, rows*A2) if torus else None

    def wrap(key: VertexKey) -> VertexKey:
        if not torus:
            return key
        sub, i, j = key
        return (sub, i % cols, j % rows)

    rawkeys = []
    rawpos = []
    for j in range(rows):
        for i in range(cols):
            for up in (True, False):
                keys = _corners(i, j, up)
                rawkeys.append([wrap(k) for k in keys])
                rawpos.append(np.array([_vertexpos(k) for k in keys]))
    centers = np.array([p.mean(axis=0) for p in rawpos])
    removed_tri = _resolve_hole(hole, centers, torus, rows, cols)

    def facecenter(t: int, e: int) -> np.ndarray:
        p = rawpos[t]
        mid = (p[e] + p[(e+1) % 3]) / 2
        return _canonical(mid + 3*(mid - centers[t]), periods)

    holefaces = set()
    if removed_tri is not None:
        holefaces = {poskey(facecenter(removed_tri, e)) for e in range(3)}

    # Sites and vertices of the kept triangles
    vindex: dict[VertexKey, int] = {}
    vpos = []
    sitepos = []
    removed = []
    tri_sites = []
    tri_corners = []
    tri_up = []
    tri_center = []
    keep = []
    for t in range(len(rawkeys)):
        if t == removed_tri:
            removed.extend(3*t + e for e in range(3))
            continue
        keep.append(t)
        corners = []
        for key in rawkeys[t]:
            if key not in vindex:
                vindex[key] = len(vpos)
                vpos.append(_canonical(_vertexpos(key), periods))
            corners.append(vindex[key])
        sites = []
        for e in range(3):
            p = rawpos[t]
            sites.append(len(sitepos))
            sitepos.append(_canonical((p[e] + p[(e+1) % 3])/2, periods))
        tri_sites.append(tuple(sites))
        tri_corners.append(tuple(corners))
        tri_up.append(t % 2 == 0)
        tri_center.append(tuple(_canonical(centers[t], periods)))

    triangles = [Triangle(s, c, u, cen) for s, c, u, cen
                 in zip(tri_sites, tri_corners, tri_up, tri_center)]

    vsites: list[list[int]] = [[] for _ in vpos]
    vtris: list[list[int]] = [[] for _ in vpos]
    for t, tri in enumerate(triangles):
        for e, s in enumerate(tri.sites):
            vsites[tri.corners[e]].append(s)
            vsites[tri.corners[(e+1) % 3]].append(s)
        for c in tri.corners:
            vtris[c].append(t)
    vertices = [Vertex(tuple(p), tuple(sorted(s)), tuple(sorted(set(tr))))
                for p, s, tr in zip(vpos, vsites, vtris)]

    lattice = RubyLattice(rows, cols, boundary, np.array(sitepos), triangles, vertices, [],
                          hole=removed_tri,
                          hole_center=None if removed_tri is None else _canonical(centers[removed_tri], periods),
                          removed=removed, bulk_depth=bulk_depth)

    # Hexagonal faces, one per link on the side away from its triangle
    facesites: dict[tuple[float, float], list[int]] = {}
    facecenters: dict[tuple[float, float], np.ndarray] = {}
    for t, raw in enumerate(keep):
        for e in range(3):
            c = facecenter(raw, e)
            key = poskey(c)
            facecenters.setdefault(key, c)
            facesites.setdefault(key, []).append(triangles[t].sites[e])
    faces = []
    for key, fsites in facesites.items():
        c = facecenters[key]
        order = _angular(c, lattice.sites[fsites], lattice.minimage)
        fsites = [fsites[k] for k in order]
        steps = tuple((int(lattice.site_triangle[s]), int(lattice.site_edge[s])) for s in fsites)
        fverts = sorted({int(v) for s in fsites for v in lattice.site_vertices[s]})
        vorder = _angular(c, np.array([vertices[v].pos for v in fverts]), lattice.minimage)
        faces.append(Face(tuple(c), tuple(fsites), steps, tuple(fverts[k] for k in vorder),
                          len(fsites) == 6, key in holefaces))
    lattice.faces = tuple(faces)
    logging.debug('Built %s with %d vertices, %d faces', lattice, len(vertices), len(faces))
    return lattice


def blockade_graph(lat: RubyLattice, rb_over_a: float) -> BlockadeGraph:
    ''' Pairs of sites within the blockade radius (minimum-image distance) '''
    if rb_over_a <= 0:
        raise ValueError(f'Blockade radius must be positive, got {rb_over_a}')
    cut = rb_over_a * (1 + config.distance_tol)
    i, j = np.nonzero(np.triu(lat.distances <= cut, k=1))
    return BlockadeGraph(lat.n_sites, zip(i.tolist(), j.tolist()), rb_over_a)


def triangle_graph(lat: RubyLattice) -> BlockadeGraph:
    ''' Blockade graph containing only pairs within the same triangle '''
    edges = []
    for tri in lat.triangles:
        a, b, c = tri.sites
        edges.extend([(a, b), (b, c), (a, c)])
    return BlockadeGraph(lat.n_sites, edges)


def interaction_list(lat: RubyLattice, rb_over_a: float,
                     r_trunc_over_a: float) -> list[Interaction]:
    ''' Van der Waals couplings V/Omega = (Rb/d)^6 for pairs within the truncation
        distance. Pairs in the same triangle are flagged as hard-blockaded.
    '''
    if r_trunc_over_a < 0:
        raise ValueError(f'Truncation distance must be nonnegative, got {r_trunc_over_a}')
    if rb_over_a <= 0:
        raise ValueError(f'Blockade radius must be positive, got {rb_over_a}')
    cut = r_trunc_over_a * (1 + config.distance_tol)
    i, j = np.nonzero(np.triu(lat.distances <= cut, k=1))
    tri = lat.site_triangle
    return [Interaction(int(a), int(b), (rb_over_a / lat.distances[a, b])**6,
                        bool(tri[a] == tri[b]))
            for a, b in zip(i, j)]


def save_lattice(lat: RubyLattice, fname: Union[str, Path]) -> None:
    ''' Write the lattice document as JSON '''
    Path(fname).write_text(json.dumps(lat.to_dict(), indent=1))


def load_lattice(fname: Union[str, Path]) -> RubyLattice:
    ''' Read a lattice document written by `save_lattice` '''
    return RubyLattice.from_dict(json.loads(Path(fname).read_text()))
