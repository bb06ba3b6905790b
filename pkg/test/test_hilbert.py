''' Constrained basis tests '''
import pytest
import numpy as np

from rubyqsl.rubytypes import CapacityError
from rubyqsl.lattice import BlockadeGraph, build_ruby_lattice, blockade_graph, triangle_graph
from rubyqsl.hilbert import (enumerate_basis, state_from_sites, occupied_sites, state_to_string,
                             state_from_string, dimer_sector, sector_population, occupations, pack,
                             as_states)


TRIANGLE = BlockadeGraph(3, [(0, 1), (1, 2), (0, 2)])


def test_triangle_basis():
    b = enumerate_basis(TRIANGLE)
    assert b.dim == 4
    assert b.states.tolist() == [0, 1, 2, 4]
    assert b.index_of(0) == 0
    assert b.excitations.tolist() == [0, 1, 1, 1]


def test_single_cell_dimensions():
    lat = build_ruby_lattice(1, 1)
    assert enumerate_basis(triangle_graph(lat)).dim == 16
    assert enumerate_basis(blockade_graph(lat, 2.4)).dim == 12


def test_no_edges():
    b = enumerate_basis(BlockadeGraph(5, []))
    assert b.dim == 32


def test_lookup():
    b = enumerate_basis(TRIANGLE)
    assert b.lookup(as_states([4, 3, 1], 3)).tolist() == [3, -1, 1]
    assert b.contains(2)
    assert not b.contains(3)
    with pytest.raises(ValueError):
        b.index_of(3)
    with pytest.raises(ValueError):
        b.index_of(8)
    with pytest.raises(ValueError):
        b.state_of(4)


def test_capacity():
    lat = build_ruby_lattice(2, 2)
    with pytest.raises(CapacityError):
        enumerate_basis(triangle_graph(lat), cap=100)


def test_state_strings():
    s = state_from_sites([0, 3])
    assert s == 9
    assert occupied_sites(s) == (0, 3)
    assert state_to_string(s, 5) == '10010'
    assert state_from_string('10010') == 9
    with pytest.raises(ValueError):
        state_from_string('10x')


def test_wide_states():
    # More than 64 sites switches to Python integers
    n = 70
    states = as_states([0, 1 << 69, (1 << 65) | 1], n)
    occ = occupations(states, n)
    assert occ.shape == (3, n)
    assert occ[1, 69] and occ[2, 65] and occ[2, 0]
    assert [int(s) for s in pack(occ)] == [0, 1 << 69, (1 << 65) | 1]


def test_dimer_sector():
    lat = build_ruby_lattice(1, 1)
    b = enumerate_basis(blockade_graph(lat, 2.4))
    assert len(dimer_sector(b, lat, 'exempt')) == 8
    assert len(dimer_sector(b, lat, 'strict')) == 0
    p = np.zeros(b.dim)
    p[dimer_sector(b, lat)] = 1/8
    assert sector_population(p, b, lat) == pytest.approx(1)
