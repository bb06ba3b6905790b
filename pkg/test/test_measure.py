''' Observable and estimator tests '''
import math
import pytest
import numpy as np

from rubyqsl.lattice import build_ruby_lattice, blockade_graph, triangle_graph
from rubyqsl.hilbert import enumerate_basis
from rubyqsl.strings import (enumerate_loops, StringSpec, z_string, dual_string,
                             string_anticommutes)
from rubyqsl.dynamics import StateVector, QuenchSpec, apply_quench
from rubyqsl.dimer import enumerate_perfect_coverings, as_snapshots
from rubyqsl.measure import (SnapshotSet, sample_snapshots, apply_readout_errors, z_parity_exact,
                             z_parity_snap, z_report, x_report, x_operator, x_parity_exact, bffm,
                             bffm_report, bffm_pair, vertex_stats, mean_density, density_report,
                             vertex_reports, density_profile, connected, connected_correlators,
                             scaling_report, defect_model_parities, apply_z_string, z_operator,
                             phase_scan, x_parity_via_quench)


@pytest.fixture(scope='module')
def torus():
    return build_ruby_lattice(3, 2, 'torus')


@pytest.fixture(scope='module')
def coverings(torus):
    return enumerate_perfect_coverings(torus)


def test_sampling_deterministic():
    lat = build_ruby_lattice(1, 1)
    psi = StateVector.random(enumerate_basis(blockade_graph(lat, 2.4)), seed=4)
    a = sample_snapshots(psi, 500, seed=11, endpoint=2.0)
    b = sample_snapshots(psi, 500, seed=11, endpoint=2.0)
    assert np.array_equal(a.occupations, b.occupations)
    assert a.occupations.shape == (500, 6)
    assert a.endpoint == 2.0 and a.seed == 11
    c = sample_snapshots(psi, 500, seed=12)
    assert not np.array_equal(a.occupations, c.occupations)


def test_snapshot_access():
    snaps = SnapshotSet.from_states([0b101, 0b010], 3, endpoint=1.0)
    assert len(snaps) == 2
    assert snaps[0].occupation == '101'
    assert [s.occupation for s in snaps] == ['101', '010']
    assert snaps.states.tolist() == [5, 2]
    with pytest.raises(ValueError):
        SnapshotSet(np.zeros(3))
    with pytest.raises(ValueError):
        SnapshotSet(np.zeros((1, 3)), readout='sideways')


def test_vacuum_parities():
    lat = build_ruby_lattice(1, 1)
    psi = StateVector.vacuum(enumerate_basis(triangle_graph(lat)))
    s = z_string(lat, [0, 4])
    assert z_parity_exact(psi, s) == 1
    snaps = sample_snapshots(psi, 20, seed=0)
    rep = z_report(snaps, [s], 'pair')
    assert rep.estimate == 1 and rep.stderr == 0 and rep.n_samples == 20
    assert z_parity_snap('100000', s) == -1
    assert z_parity_snap(snaps[0], s) == 1


def test_exact_and_sampled_agree():
    lat = build_ruby_lattice(1, 1)
    psi = StateVector.random(enumerate_basis(triangle_graph(lat)), seed=8)
    s = z_string(lat, [0, 1, 4])
    exact = z_report(psi, [s], 's')
    assert exact.n_samples == 0 and exact.stderr == 0
    sampled = z_report(sample_snapshots(psi, 4000, seed=3), [s], 's')
    assert abs(sampled.estimate - exact.estimate) < 4*sampled.stderr + 1E-12


def test_z_operator_matches_parity():
    lat = build_ruby_lattice(1, 1)
    psi = StateVector.random(enumerate_basis(triangle_graph(lat)), seed=6)
    s = z_string(lat, [2, 3])
    assert psi.expectation(z_operator(psi.basis, s)) == pytest.approx(z_parity_exact(psi, s))
    flipped = apply_z_string(psi, s)
    assert flipped.norm() == pytest.approx(1)


def test_x_operator():
    lat = build_ruby_lattice(1, 1)
    psi = StateVector.random(enumerate_basis(triangle_graph(lat)), seed=9)
    s = StringSpec('X', steps=((0, 2),), closed=False)
    X = x_operator(lat, s)
    assert X.is_hermitian()
    assert np.allclose((X @ X).toarray(), np.eye(X.dim))
    assert psi.expectation(X) == pytest.approx(x_parity_exact(psi, lat, s))


def test_x_needs_quench_readout():
    lat = build_ruby_lattice(1, 1)
    s = StringSpec('X', steps=((0, 0),), closed=False)
    snaps = SnapshotSet(np.zeros((5, 6), dtype=bool))
    with pytest.raises(ValueError):
        x_report(snaps, lat, [s], 's')
    quench = SnapshotSet(np.zeros((5, 6), dtype=bool), readout='quench')
    assert x_report(quench, lat, [s], 's').estimate == 1


def test_phase_scan():
    lat = build_ruby_lattice(1, 1)
    psi = StateVector.random(enumerate_basis(triangle_graph(lat)), seed=2)
    s = StringSpec('X', steps=((1, 1),), closed=False)
    scan = phase_scan(psi, lat, s, [math.pi/2, 0.0], QuenchSpec(omega_q=1.0))
    assert scan[0][1] == pytest.approx(x_parity_exact(psi, lat, s), abs=1E-8)
    assert len(scan) == 2


def test_x_parity_via_quench():
    lat = build_ruby_lattice(1, 1)
    psi = StateVector.random(enumerate_basis(triangle_graph(lat)), seed=4)
    s = StringSpec('X', steps=((0, 1),), closed=False, label='x01')
    q = QuenchSpec(omega_q=1.0)
    exact = x_parity_via_quench(psi, lat, q, s)
    assert exact.label == 'x01'
    assert exact.n_samples == 0
    sampled = x_parity_via_quench(psi, lat, q, s, n=4000, seed=8)
    assert sampled.n_samples == 4000
    assert abs(sampled.estimate - exact.estimate) < 5*sampled.stderr


def test_single_triangle_parities():
    # Order: empty, then one excitation on edge 0, 1, 2 of triangle 0
    lat = build_ruby_lattice(1, 1)
    b = enumerate_basis(triangle_graph(lat))
    tri = lat.triangles[0].sites
    idx = [b.index_of(st) for st in (0, 1 << tri[0], 1 << tri[1], 1 << tri[2])]
    s = StringSpec('X', steps=((0, 0),), closed=False)
    X = x_operator(lat, s, b).toarray()[np.ix_(idx, idx)]
    Z = z_operator(b, dual_string(lat, s)).toarray()[np.ix_(idx, idx)]
    assert np.array_equal(X, [[0, -1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])
    assert np.array_equal(Z, np.diag([1, 1, -1, -1]))


def test_open_z_string_flips_x_loop():
    lat = build_ruby_lattice(2, 2, 'torus')
    b = enumerate_basis(triangle_graph(lat))
    loop = enumerate_loops(lat, 'hexagon', 'X')[0]
    X = x_operator(lat, loop, b)
    raw = StateVector.random(b, seed=3).amplitudes
    psi = StateVector(b, raw + X.matrix @ raw).normalized()
    assert psi.expectation(X) == pytest.approx(1)
    # Pair of Z sites in one triangle of the loop, avoiding the pair dual to its step
    t, e = loop.steps[0]
    tri = lat.triangles[t].sites
    z = z_string(lat, [tri[e], tri[(e+1) % 3]])
    assert string_anticommutes(lat, loop, z)
    assert apply_z_string(psi, z).expectation(X) == pytest.approx(-1)
    vertex = enumerate_loops(lat, 'vertex')[0]
    assert not string_anticommutes(lat, loop, vertex)
    assert apply_z_string(psi, vertex).expectation(X) == pytest.approx(1)


def test_readout_errors():
    snaps = SnapshotSet(np.array([[0, 1, 0], [1, 1, 0]], dtype=bool), seed=3)
    assert np.array_equal(apply_readout_errors(snaps, 0, 0, 1).occupations, snaps.occupations)
    assert apply_readout_errors(snaps, 1, 0, 1).occupations.all()
    assert not apply_readout_errors(snaps, 0, 1, 1).occupations[:, :2].any()
    with pytest.raises(ValueError):
        apply_readout_errors(snaps, 1.5, 0, 1)


def test_empty_snapshots():
    lat = build_ruby_lattice(1, 1)
    empty = SnapshotSet(np.zeros((0, 6), dtype=bool))
    with pytest.raises(ValueError):
        z_report(empty, [z_string(lat, [0])], 'x')


def test_bffm():
    assert bffm(0.5, 0.25) == pytest.approx(1.0)
    assert bffm(0.5, -0.25) == pytest.approx(1.0)
    assert bffm(0.1, 5E-4) is None


def test_bffm_report_undefined(torus):
    from rubyqsl.rubytypes import ObservableReport
    a = ObservableReport('o', 'l', None, 0.1, 0.01, 10, 1, None)
    b = ObservableReport('c', 'l', None, 0.0, 0.01, 10, 1, None)
    rep = bffm_report(a, b)
    assert rep.estimate is None and rep.stderr is None


def test_parity_law(torus, coverings):
    # Every perfect covering: a Z loop has parity (-1)^(enclosed vertices)
    snaps = as_snapshots(torus, coverings)
    for name in ('vertex', 'hexagon', 'double-hexagon'):
        for s in enumerate_loops(torus, name, 'Z'):
            rep = z_report(snaps, [s], s.label)
            assert rep.estimate == (-1)**s.area


def test_parity_law_open():
    lat = build_ruby_lattice(2, 2)
    snaps = as_snapshots(lat, enumerate_perfect_coverings(lat))
    loops = enumerate_loops(lat, 'vertex')
    assert loops
    for s in loops:
        assert z_report(snaps, [s], s.label).estimate == (-1)**s.area


def test_vertex_statistics(torus, coverings):
    snaps = as_snapshots(torus, coverings[:20])
    lat = build_ruby_lattice(3, 2, 'torus', bulk_depth=0)
    assert tuple(vertex_stats(snaps, lat)) == (0, 1, 0)
    assert mean_density(snaps, lat) == pytest.approx(0.25)
    rep = density_report(snaps, lat)
    assert rep.label == 'bulk' and rep.estimate == pytest.approx(0.25)
    assert [r.label for r in vertex_reports(snaps, lat)] == ['monomer', 'dimer', 'double']


def test_no_bulk():
    lat = build_ruby_lattice(1, 1)
    psi = StateVector.vacuum(enumerate_basis(triangle_graph(lat)))
    with pytest.raises(ValueError):
        vertex_stats(psi, lat)
    with pytest.raises(ValueError):
        mean_density(psi, lat, 'bulk')
    assert density_report(psi, lat).label == 'all'
    assert mean_density(psi, lat, 'all') == 0
    assert set(density_profile(psi, lat).values()) == {0.0}


def test_connected():
    w = np.full(4, 0.25)
    independent = np.array([[1, 1], [1, -1], [-1, 1], [-1, -1]], dtype=float)
    assert connected(independent, w) == pytest.approx(0)
    locked = np.array([[1, 1], [-1, -1]], dtype=float)
    assert connected(locked, np.full(2, 0.5)) == pytest.approx(1)
    constant = np.ones((3, 3))
    assert connected(constant, np.full(3, 1/3)) == pytest.approx(0)


def _parity_columns(n):
    ''' Z parity of each qubit for every computational basis state '''
    bits = (np.arange(2**n)[:, None] >> np.arange(n)[::-1]) & 1
    return 1.0 - 2*bits


def test_connected_product_and_ghz():
    # Biased product state: each qubit cos(a)|0> + sin(a)|1>
    amps = [1.0]
    for a in (0.3, 0.7, 1.1):
        amps = np.kron(amps, [math.cos(a), math.sin(a)])
    probs = np.abs(amps)**2
    assert connected(_parity_columns(3), probs) == pytest.approx(0, abs=1E-12)
    assert connected(_parity_columns(3)[:, :2], probs) == pytest.approx(0, abs=1E-12)
    ghz = np.zeros(4)
    ghz[[0, 3]] = 1/math.sqrt(2)
    assert connected(_parity_columns(2), np.abs(ghz)**2) == pytest.approx(1)


def test_correlators_on_coverings(torus, coverings):
    # Hexagon Z parities are fixed by the covering constraint: no fluctuations
    snaps = as_snapshots(torus, coverings)
    rep = connected_correlators(snaps, torus, 2, 'Z')
    assert rep.estimate == pytest.approx(0, abs=1E-12)
    assert rep.observable == 'g2-z' and rep.n_samples == len(coverings)
    assert rep.n_loop_instances > 0


def test_scaling():
    loops = {'a': StringSpec('Z', sites=(0, 1, 2, 3), enclosed_vertices=(0, 1))}
    roots = scaling_report({'a': 0.25}, loops)['a']
    assert roots.area == 2 and roots.perimeter == 4
    assert roots.area_root == pytest.approx(0.5)
    assert roots.perimeter_root == pytest.approx(0.25**0.25)


def test_defect_model(torus):
    loops = enumerate_loops(torus, 'hexagon', 'Z')[:1]
    clean = defect_model_parities(torus, loops, 0.0, 100, seed=1)[0]
    assert clean.estimate == 1 and clean.stderr == 0
    noisy = defect_model_parities(torus, loops, 0.1, 20000, seed=1)[0]
    assert abs(noisy.estimate - 0.8**6) < 4*noisy.stderr


@pytest.mark.parametrize('p', [0.05, 0.1])
def test_defect_model_area_roots(p):
    lat = build_ruby_lattice(4, 4)
    loops = {s.label: s for s in (enumerate_loops(lat, name, 'Z')[0]
                                  for name in ('vertex', 'hexagon', 'double-hexagon'))}
    assert sorted(s.area for s in loops.values()) == [1, 6, 11]
    reports = defect_model_parities(lat, list(loops.values()), p, 100000, seed=9)
    roots = scaling_report({r.label: r.estimate for r in reports}, loops)
    area_roots = [r.area_root for r in roots.values()]
    assert max(area_roots) < 1.02*min(area_roots)
    assert area_roots == pytest.approx([1 - 2*p]*3, rel=0.02)


def test_bffm_pair_on_coverings(torus, coverings):
    snaps = as_snapshots(torus, coverings)
    opened, closed, ratio = bffm_pair(snaps, torus, 'half-hexagon', 'Z')
    assert closed.estimate == 1
    assert ratio.estimate == pytest.approx(opened.estimate)


@pytest.mark.slow
def test_estimators_converge():
    lat = build_ruby_lattice(2, 2, 'torus')
    b = enumerate_basis(triangle_graph(lat))
    psi = StateVector.random(b, seed=21)
    zs = enumerate_loops(lat, 'hexagon', 'Z')
    xs = enumerate_loops(lat, 'hexagon', 'X')
    q = QuenchSpec(omega_q=1.0)
    exact = z_report(psi, zs, 'hexagon').estimate
    sampled = z_report(sample_snapshots(psi, 100000, seed=5), zs, 'hexagon')
    assert sampled.n_samples == 100000
    assert abs(sampled.estimate - exact) < 3*sampled.stderr
    exact = x_report(psi, lat, xs, 'hexagon', q).estimate
    assert exact == pytest.approx(np.mean([x_parity_exact(psi, lat, s) for s in xs]), abs=1E-8)
    snaps = sample_snapshots(apply_quench(psi, lat, q), 100000, seed=6, readout='quench')
    sampled = x_report(snaps, lat, xs, 'hexagon')
    assert abs(sampled.estimate - exact) < 3*sampled.stderr
