''' String operator and loop template tests '''
import pytest
import numpy as np

from rubyqsl.lattice import build_ruby_lattice, triangle_graph
from rubyqsl.hilbert import enumerate_basis
from rubyqsl.measure import x_image, x_operator
from rubyqsl.strings import (StringSpec, z_string, z_loop, x_loop, dual_string, undual_string,
                             string_anticommutes, support, enumerate_loops, get_template,
                             check_logical_string, x_endpoints)


@pytest.fixture
def torus():
    return build_ruby_lattice(3, 2, 'torus')


def test_vertex_loops(torus):
    loops = enumerate_loops(torus, 'vertex')
    assert len(loops) == 18
    assert all(len(s) == 4 and s.closed and s.area == 1 for s in loops)
    assert loops[0].label == 'vertex[0]'


def test_hexagon_loops(torus):
    zs = enumerate_loops(torus, 'hexagon', 'Z')
    xs = enumerate_loops(torus, 'hexagon', 'X')
    assert len(zs) == len(xs) == 6
    assert all(len(s) == 12 and s.area == 6 for s in zs)
    assert all(len(s) == 6 and s.area == 1 and s.closed for s in xs)


def test_dual_of_hexagon(torus):
    face = torus.hexagons[0]
    x = x_loop(torus, [torus.faces.index(face)])
    z = z_loop(torus, face.vertices)
    assert support(torus, dual_string(torus, x)) == support(torus, z)
    assert undual_string(torus, dual_string(torus, x)).steps == x.steps
    assert not string_anticommutes(torus, x, dual_string(torus, x))


def test_open_x_string_endpoints():
    lat = build_ruby_lattice(1, 1)
    s = StringSpec('X', steps=((0, 0),), closed=False)
    assert len(x_endpoints(lat, s.steps)) == 2
    assert support(lat, s) == (lat.triangles[0].sites[0],)


def test_half_loops(torus):
    halves = enumerate_loops(torus, 'half-hexagon', 'Z')
    assert halves
    for h in halves:
        assert not h.closed
        assert h.closure is not None and h.closure.closed
        assert set(h.sites) < set(h.closure.sites)
        assert h.closure.label.startswith('hexagon<')


def test_loops_avoid_open_boundary():
    lat = build_ruby_lattice(3, 3)
    for s in enumerate_loops(lat, 'vertex'):
        assert (lat.coordination[list(s.enclosed_vertices)] == 4).all()
    for s in enumerate_loops(lat, 'hexagon', 'X'):
        assert all(lat.faces[f].complete for f in s.enclosed_faces)


def test_hole_strings():
    lat = build_ruby_lattice(4, 4, hole='center')
    assert lat.n_sites == 93
    zs = enumerate_loops(lat, 'hole-to-boundary')
    assert zs
    for s in zs:
        check_logical_string(lat, s)
    xs = enumerate_loops(lat, 'hole-loop')
    assert len(xs) == 1
    assert all(s.closed and s.kind == 'X' for s in xs)
    # Every hole-to-boundary string crosses the encircling loop once
    assert all(string_anticommutes(lat, xs[0], z) for z in zs)


def _random_configuration(lat, rng):
    ''' At most one excitation per triangle '''
    state = 0
    for tri in lat.triangles:
        k = int(rng.integers(4))
        if k:
            state |= 1 << tri.sites[k - 1]
    return state


def test_double_hexagon_x_product():
    lat = build_ruby_lattice(4, 4)
    rng = np.random.Generator(np.random.Philox(7))
    states = [_random_configuration(lat, rng) for _ in range(200)]
    doubles = enumerate_loops(lat, 'double-hexagon', 'X')
    assert doubles
    for d in doubles:
        a, b = (x_loop(lat, [f]) for f in d.enclosed_faces)
        for D in states:
            mid, sign_b = x_image(lat, D, b)
            end, sign_a = x_image(lat, mid, a)
            assert x_image(lat, D, d) == (end, sign_a*sign_b)


def test_double_hexagon_x_product_matrix():
    lat = build_ruby_lattice(2, 2, 'torus')
    basis = enumerate_basis(triangle_graph(lat))
    d = enumerate_loops(lat, 'double-hexagon', 'X')[0]
    a, b = (x_operator(lat, x_loop(lat, [f]), basis) for f in d.enclosed_faces)
    diff = x_operator(lat, d, basis).matrix - (a @ b).matrix
    assert diff.count_nonzero() == 0


def test_double_hexagon_z_product():
    # Z around two hexagons = Z_a Z_b times the vertex loop of their shared vertex
    lat = build_ruby_lattice(4, 4)
    hexagons = enumerate_loops(lat, 'hexagon', 'Z')
    doubles = enumerate_loops(lat, 'double-hexagon', 'Z')
    assert doubles
    for d in doubles:
        assert d.area == 11
        a, b = [h for h in hexagons if set(h.enclosed_vertices) <= set(d.enclosed_vertices)]
        shared = set(a.enclosed_vertices) & set(b.enclosed_vertices)
        assert len(shared) == 1
        v = z_loop(lat, shared)
        assert set(d.sites) == set(a.sites) ^ set(b.sites) ^ set(v.sites)


@pytest.mark.parametrize('rows, cols', [(3, 3), (4, 3)])
def test_hole_on_outer_edge(rows, cols):
    lat = build_ruby_lattice(rows, cols, hole='center')
    with pytest.raises(ValueError, match='hole'):
        enumerate_loops(lat, 'hole-loop')


def test_bad_strings(torus):
    with pytest.raises(ValueError):
        StringSpec('Y')
    with pytest.raises(ValueError):
        StringSpec('Z', sites=(1, 1))
    with pytest.raises(ValueError):
        z_string(torus, [100])
    with pytest.raises(ValueError):
        dual_string(torus, z_string(torus, [0]))
    with pytest.raises(ValueError):
        get_template('octagon')
    with pytest.raises(ValueError):
        enumerate_loops(torus, 'vertex', 'X')
    with pytest.raises(ValueError):
        enumerate_loops(torus, 'hole-to-boundary')
