''' Z and X string operators on the ruby lattice, and loop templates

    A Z string is a product of (1 - 2n) over a set of sites. An X string is
    a product of per-triangle resonance operators, one per visited triangle,
    each acting along one triangle edge. In each triangle the X operators
    (and the pairs of Z operators) multiply like the Klein four-group, so
    products are tracked with integer codes 1, 2, 3 (edge + 1) combined by XOR.
'''

from __future__ import annotations
from typing import Optional, Sequence, Union, Iterable
from dataclasses import dataclass, field
from functools import lru_cache
import importlib.resources as pkg_resources
import math
import json
import logging

import numpy as np

from .lattice import RubyLattice, A1, A2, SQRT3, _vertexpos

KINDS = ('Z', 'X')
ANCHOR = np.array([3.0, SQRT3])  # Center of the hexagon of cell (0, 0)
NEIGHBOR_STEPS = (A1, A2, A2 - A1, -A1, -A2, A1 - A2)


@dataclass(frozen=True)
class StringSpec:
    ''' A Z string (site list) or X string (triangle-edge steps)

        Args:
            kind: 'Z' or 'X'
            sites: Site indices of a Z string
            steps: (triangle, edge) pairs of an X string
            closed: Whether the string is a closed loop
            label: Free-text name
            enclosed_vertices: Vertices enclosed by a closed Z loop
            enclosed_faces: Faces enclosed by a closed loop, or the face
                path of an open dual string
            closure: For open half-loops, the closed loop they complete
    '''
    kind: str
    sites: tuple[int, ...] = ()
    steps: tuple[tuple[int, int], ...] = ()
    closed: bool = True
    label: str = ''
    enclosed_vertices: tuple[int, ...] = ()
    enclosed_faces: tuple[int, ...] = ()
    closure: Optional['StringSpec'] = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f'Unknown string kind {self.kind!r}')
        if self.kind == 'Z':
            if self.steps:
                raise ValueError('Z strings have sites, not steps')
            if len(set(self.sites)) != len(self.sites):
                raise ValueError(f'Z string {self.label!r} repeats a site')
        else:
            if self.sites:
                raise ValueError('X strings have steps, not sites')
            tris = [t for t, _ in self.steps]
            if len(set(tris)) != len(tris):
                raise ValueError(f'X string {self.label!r} visits a triangle twice')
            if any(e not in (0, 1, 2) for _, e in self.steps):
                raise ValueError(f'X string {self.label!r} has an edge outside 0-2')

    def __repr__(self):
        n = len(self.sites) if self.kind == 'Z' else len(self.steps)
        unit = 'sites' if self.kind == 'Z' else 'steps'
        state = 'closed' if self.closed else 'open'
        return f'<StringSpec {self.kind} {self.label!r} {state}, {n} {unit}>'

    def __len__(self):
        return len(self.sites) if self.kind == 'Z' else len(self.steps)

    @property
    def area(self) -> int:
        ''' Enclosed vertices (Z) or enclosed hexagons (X) '''
        return len(self.enclosed_vertices) if self.kind == 'Z' else len(self.enclosed_faces)

    @property
    def perimeter(self) -> int:
        ''' Sites on the loop (Z) or steps (X) '''
        return len(self)


def support(lat: RubyLattice, s: StringSpec) -> tuple[int, ...]:
    ''' Sites acted on: Z sites, or the step edge of each X step '''
    if s.kind == 'Z':
        return tuple(sorted(s.sites))
    return tuple(sorted(lat.triangles[t].sites[e] for t, e in s.steps))


def _steps_from_codes(codes: dict[int, int]) -> tuple[tuple[int, int], ...]:
    return tuple((t, c - 1) for t, c in sorted(codes.items()) if c)


def x_endpoints(lat: RubyLattice, steps: Iterable[tuple[int, int]]) -> tuple[int, ...]:
    ''' Vertices touched by an odd number of step edges (e-anyon positions) '''
    parity = np.zeros(len(lat.vertices), dtype=int)
    for t, e in steps:
        site = lat.triangles[t].sites[e]
        parity[lat.site_vertices[site]] ^= 1
    return tuple(np.flatnonzero(parity).tolist())


def z_endpoints(lat: RubyLattice, sites: Iterable[int]) -> tuple[int, ...]:
    ''' Faces holding an odd number of string sites (m-anyon positions) '''
    sites = set(sites)
    return tuple(k for k, f in enumerate(lat.faces)
                 if len(sites.intersection(f.sites)) % 2)


def _z_closed(lat: RubyLattice, sites: Sequence[int]) -> bool:
    per_triangle = np.bincount(lat.site_triangle[list(sites)], minlength=len(lat.triangles))
    return not (per_triangle % 2).any() and not z_endpoints(lat, sites)


def z_string(lat: RubyLattice, sites: Iterable[int], label: str = '') -> StringSpec:
    ''' Z string over an explicit site list '''
    sites = tuple(int(s) for s in sites)
    bad = [s for s in sites if not 0 <= s < lat.n_sites]
    if bad:
        raise ValueError(f'Sites {bad} out of range for {lat.n_sites}-site lattice')
    return StringSpec('Z', sites=sites, closed=_z_closed(lat, sites), label=label)


def z_loop(lat: RubyLattice, vertices: Iterable[int], label: str = '') -> StringSpec:
    ''' Closed Z loop around a set of vertices: the links with exactly
        one endpoint inside the set. Equals the product of the single-vertex
        loops of the enclosed vertices.
    '''
    verts = sorted({int(v) for v in vertices})
    if not verts:
        return StringSpec('Z', closed=True, label=label)
    inside = lat.incidence[:, verts].sum(axis=1)
    sites = tuple(np.flatnonzero(inside == 1).tolist())
    return StringSpec('Z', sites=sites, closed=True, label=label,
                      enclosed_vertices=tuple(verts))


def _shared_triangles(lat: RubyLattice, fa: int, fb: int) -> list[tuple[int, int, int]]:
    ''' Triangles with an edge on both faces, as (triangle, edge on fa, edge on fb) '''
    edges_a = dict(lat.faces[fa].steps)
    out = []
    for t, eb in lat.faces[fb].steps:
        if t in edges_a:
            out.append((t, edges_a[t], eb))
    return sorted(out)


def z_string_from_faces(lat: RubyLattice, faces: Sequence[int], label: str = '') -> StringSpec:
    ''' Z string along a dual path of faces. Each step from one face to the next
        passes through a triangle shared by both, and the string takes that
        triangle's edges lying on the two faces.
    '''
    codes: dict[int, int] = {}
    for fa, fb in zip(faces[:-1], faces[1:]):
        shared = _shared_triangles(lat, fa, fb)
        if not shared:
            raise ValueError(f'Faces {fa} and {fb} share no triangle')
        t, ea, eb = shared[0]
        third = 3 - ea - eb
        codes[t] = codes.get(t, 0) ^ (third + 1)
    sites = []
    for t, c in sorted(codes.items()):
        if c:
            sites.extend(s for e, s in enumerate(lat.triangles[t].sites) if e != c - 1)
    sites = tuple(sites)
    return StringSpec('Z', sites=sites, closed=_z_closed(lat, sites), label=label,
                      enclosed_faces=tuple(faces))


def x_loop(lat: RubyLattice, faces: Iterable[int], label: str = '') -> StringSpec:
    ''' X loop enclosing a set of faces: the product of the single-face loops '''
    faces = sorted({int(f) for f in faces})
    codes: dict[int, int] = {}
    for f in faces:
        for t, e in lat.faces[f].steps:
            codes[t] = codes.get(t, 0) ^ (e + 1)
    steps = _steps_from_codes(codes)
    return StringSpec('X', steps=steps, closed=not x_endpoints(lat, steps), label=label,
                      enclosed_faces=tuple(faces))


def x_string_from_path(lat: RubyLattice, path: Sequence[int], label: str = '') -> StringSpec:
    ''' X string along a path of kagome vertices. Steps in a triangle visited
        twice combine into its third edge.
    '''
    codes: dict[int, int] = {}
    for u, w in zip(path[:-1], path[1:]):
        site = lat.site_between(u, w)
        if site is None:
            raise ValueError(f'Vertices {u} and {w} are not joined by a link')
        t = int(lat.site_triangle[site])
        codes[t] = codes.get(t, 0) ^ (int(lat.site_edge[site]) + 1)
    steps = _steps_from_codes(codes)
    return StringSpec('X', steps=steps, closed=not x_endpoints(lat, steps), label=label)


def dual_string(lat: RubyLattice, s: StringSpec) -> StringSpec:
    ''' Z string taking, in each triangle visited by X string s, the two
        edges other than the step edge
    '''
    if s.kind != 'X':
        raise ValueError(f'Dual strings are defined for X strings, got {s.kind}')
    sites = []
    for t, e in s.steps:
        sites.extend(site for k, site in enumerate(lat.triangles[t].sites) if k != e)
    return StringSpec('Z', sites=tuple(sites), closed=s.closed, label=s.label,
                      enclosed_faces=s.enclosed_faces)


def undual_string(lat: RubyLattice, z: StringSpec) -> StringSpec:
    ''' X string whose dual is the pair-structured Z string z '''
    if z.kind != 'Z':
        raise ValueError(f'Expected a Z string, got {z.kind}')
    bytri: dict[int, list[int]] = {}
    for site in z.sites:
        bytri.setdefault(int(lat.site_triangle[site]), []).append(int(lat.site_edge[site]))
    steps = []
    for t, edges in sorted(bytri.items()):
        if len(edges) != 2:
            raise ValueError(f'Z string holds {len(edges)} sites of triangle {t}; '
                             'a dual needs exactly two')
        steps.append((t, 3 - sum(edges)))
    return StringSpec('X', steps=tuple(steps), closed=z.closed, label=z.label,
                      enclosed_faces=z.enclosed_faces)


def string_anticommutes(lat: RubyLattice, x: StringSpec, z: StringSpec) -> bool:
    ''' Whether X string x anticommutes with the pair-structured Z string z.
        In a shared triangle, the step edge e and the Z pair missing edge f
        anticommute unless e == f.
    '''
    if x.kind != 'X' or z.kind != 'Z':
        raise ValueError('Expected an X string and a Z string')
    bytri: dict[int, list[int]] = {}
    for site in z.sites:
        bytri.setdefault(int(lat.site_triangle[site]), []).append(int(lat.site_edge[site]))
    flips = 0
    for t, e in x.steps:
        edges = bytri.get(t)
        if not edges:
            continue
        if len(edges) != 2:
            raise ValueError(f'Z string holds {len(edges)} sites of triangle {t}; '
                             'the commutation sign is not defined')
        if e != 3 - sum(edges):
            flips += 1
    return bool(flips % 2)


# --- Loop templates ---

@dataclass(frozen=True)
class LoopTemplate:
    ''' Loop shape read from a template file

        Faces are (i, j) offsets of hexagon centers in units of the kagome
        lattice vectors; vertices are (sublattice, i, j) kagome vertices.
        Both are relative to the hexagon of cell (0, 0).
    '''
    name: str
    kinds: tuple[str, ...]
    description: str = ''
    faces: tuple[tuple[int, int], ...] = ()
    vertices: tuple[tuple[str, int, int], ...] = ()
    half: bool = False
    closure: Optional[str] = None
    generator: Optional[str] = None


@lru_cache(maxsize=None)
def load_templates() -> dict[str, LoopTemplate]:
    ''' All catalogued loop templates, by name '''
    templates = {}
    for entry in sorted(pkg_resources.files('rubyqsl.templates').iterdir(), key=lambda p: p.name):
        if not entry.name.endswith('.json'):
            continue
        doc = json.loads(entry.read_text())
        tmp = LoopTemplate(
            name=doc['name'],
            kinds=tuple(doc['kinds']),
            description=doc.get('description', ''),
            faces=tuple(tuple(f) for f in doc.get('faces', [])),
            vertices=tuple((v[0], v[1], v[2]) for v in doc.get('vertices', [])),
            half=doc.get('half', False),
            closure=doc.get('closure'),
            generator=doc.get('generator'))
        templates[tmp.name] = tmp
    logging.debug('Loaded %d loop templates', len(templates))
    return templates


def get_template(name: Union[str, LoopTemplate]) -> LoopTemplate:
    ''' Look up a template by name '''
    if isinstance(name, LoopTemplate):
        return name
    templates = load_templates()
    if name not in templates:
        raise ValueError(f'Unknown loop template {name!r}. Available: {sorted(templates)}')
    return templates[name]


def _symmetry_ops() -> list[np.ndarray]:
    ''' Rotations by multiples of 60 degrees, with and without a mirror '''
    ops = []
    mirror = np.array([[1., 0.], [0., -1.]])
    for refl in (False, True):
        for k in range(6):
            c, s = math.cos(k*math.pi/3), math.sin(k*math.pi/3)
            rot = np.array([[c, -s], [s, c]])
            ops.append(rot @ mirror if refl else rot)
    return ops


def _half(lat: RubyLattice, loop: StringSpec, center: np.ndarray,
          direction: np.ndarray, label: str) -> StringSpec:
    ''' Open string keeping the loop's triangles in one half-plane around center '''
    def keep(t: int) -> bool:
        r = lat.minimage(np.array(lat.triangles[t].center) - center)
        ang = math.atan2(r[1], r[0]) - math.atan2(direction[1], direction[0])
        return ang % (2*math.pi) < math.pi
    if loop.kind == 'Z':
        sites = tuple(s for s in loop.sites if keep(int(lat.site_triangle[s])))
        return StringSpec('Z', sites=sites, closed=False, label=label, closure=loop)
    steps = tuple(st for st in loop.steps if keep(st[0]))
    return StringSpec('X', steps=steps, closed=False, label=label, closure=loop)


def _interior(lat: RubyLattice, s: StringSpec) -> bool:
    ''' Loop stays clear of every boundary, outer or hole '''
    if s.kind == 'Z':
        return bool((lat.coordination[list(s.enclosed_vertices)] == 4).all())
    return all(lat.faces[f].complete for f in s.enclosed_faces)


def _instantiate(lat: RubyLattice, tmp: LoopTemplate, kind: str) -> list[StringSpec]:
    fvecs = [i*A1 + j*A2 for i, j in tmp.faces]
    vvecs = [_vertexpos(v) - ANCHOR for v in tmp.vertices]
    tipvec = np.mean(fvecs + vvecs, axis=0)
    seen = set()
    found = []
    for anchor in lat.faces:
        center = np.array(anchor.center)
        for op in _symmetry_ops():
            faces = [lat.face_at(center + op @ v) for v in fvecs]
            verts = [lat.vertex_at(center + op @ v) for v in vvecs]
            if None in faces or None in verts:
                continue
            if len(set(faces)) != len(faces) or len(set(verts)) != len(verts):
                continue
            if not all(lat.faces[f].complete for f in faces):
                continue
            if kind == 'Z':
                enclosed = set(verts)
                for f in faces:
                    enclosed.update(lat.faces[f].vertices)
                loop = z_loop(lat, enclosed)
                if not loop.sites:
                    continue
            else:
                loop = x_loop(lat, faces)
                if not loop.steps:
                    continue
            if not _interior(lat, loop):
                continue
            if tmp.half:
                loop = _half(lat, loop, center + op @ tipvec,
                             op @ np.array([math.cos(0.1), math.sin(0.1)]), '')
            key = support(lat, loop)
            if key in seen:
                continue
            seen.add(key)
            found.append(loop)
    return found


def _hole_to_boundary(lat: RubyLattice) -> list[StringSpec]:
    ''' Straight dual paths from each face next to the hole out to the outer boundary '''
    if lat.hole_center is None or lat.torus:
        raise ValueError('Hole-to-boundary strings need an open lattice with a hole')
    hole = np.array(lat.hole_center)
    found = []
    seen = set()
    for f0, face in enumerate(lat.faces):
        if not face.hole_adjacent:
            continue
        outward = lat.minimage(np.array(face.center) - hole)
        for d in NEIGHBOR_STEPS:
            if np.dot(d, outward) <= 0:
                continue
            path = [f0]
            while True:
                nxt = lat.face_at(np.array(lat.faces[path[-1]].center) + d)
                if nxt is None or lat.faces[nxt].hole_adjacent or not _shared_triangles(lat, path[-1], nxt):
                    break
                path.append(nxt)
                if not lat.faces[nxt].complete:
                    break
            last = lat.faces[path[-1]]
            if len(path) < 2 or last.complete or last.hole_adjacent:
                continue
            zs = z_string_from_faces(lat, path)
            key = tuple(sorted(zs.sites))
            if key not in seen:
                seen.add(key)
                found.append(zs)
    return found


def _hole_loops(lat: RubyLattice) -> list[StringSpec]:
    ''' X loops around the faces next to the hole, and around the next ring of faces '''
    if lat.hole_center is None:
        raise ValueError('Hole-encircling loops need a lattice with a hole')
    inner = [k for k, f in enumerate(lat.faces) if f.hole_adjacent]
    if any(len(lat.faces[k].sites) != 5 for k in inner):
        raise ValueError(f'The hole of {lat} touches the outer boundary; no loop encircles it')
    found = [x_loop(lat, inner)]
    ring = set(inner)
    for k in inner:
        verts = set(lat.faces[k].vertices)
        ring.update(j for j, f in enumerate(lat.faces) if verts.intersection(f.vertices))
    if all(lat.faces[j].complete for j in ring.difference(inner)):
        found.append(x_loop(lat, ring))
    found = [s for s in found if s.closed and s.steps]
    if not found:
        raise ValueError(f'No closed loop encircles the hole of {lat}')
    return found


def check_logical_string(lat: RubyLattice, s: StringSpec) -> None:
    ''' Raise ValueError unless Z string s runs from the hole to the outer boundary '''
    ends = z_endpoints(lat, s.sites)
    kinds = sorted('hole' if lat.faces[f].hole_adjacent else
                   ('outer' if not lat.faces[f].complete else 'bulk') for f in ends)
    if kinds != ['hole', 'outer']:
        raise ValueError(f'String {s.label!r} ends on {kinds}, not on the hole '
                         'and the outer boundary')


def enumerate_loops(lat: RubyLattice, shape: Union[str, LoopTemplate],
                    kind: Optional[str] = None) -> list[StringSpec]:
    ''' All placements of a loop template on the lattice

        Args:
            lat: The lattice
            shape: Template name or template
            kind: 'Z' or 'X'. Defaults to the template's first kind.

        Returns:
            Strings sorted by their site support, labeled 'name[k]'.
            Loops touching an open boundary or the hole are excluded,
            except for the hole templates.
    '''
    tmp = get_template(shape)
    kind = kind or tmp.kinds[0]
    if kind not in tmp.kinds:
        raise ValueError(f'Template {tmp.name!r} has no {kind} form')
    if tmp.generator == 'hole-to-boundary':
        loops = _hole_to_boundary(lat)
    elif tmp.generator == 'hole-loop':
        loops = _hole_loops(lat)
    elif tmp.generator:
        raise ValueError(f'Unknown template generator {tmp.generator!r}')
    else:
        loops = _instantiate(lat, tmp, kind)
    loops.sort(key=lambda s: support(lat, s))
    out = []
    for k, s in enumerate(loops):
        closure = s.closure
        if closure is not None:
            closure = StringSpec(closure.kind, closure.sites, closure.steps, closure.closed,
                                 f'{tmp.closure or tmp.name}<{tmp.name}[{k}]>',
                                 closure.enclosed_vertices, closure.enclosed_faces)
        out.append(StringSpec(s.kind, s.sites, s.steps, s.closed, f'{tmp.name}[{k}]',
                              s.enclosed_vertices, s.enclosed_faces, closure))
    logging.debug('Template %s (%s): %d placements on %s', tmp.name, kind, len(out), lat)
    return out
