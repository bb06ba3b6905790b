''' Command line tests '''
import json
import pytest

from rubyqsl.config import config
from rubyqsl.reports import read_csv
from rubyqsl.cli import main, EXIT_CONFIG, EXIT_CAPACITY


TORUS = {'lattice': {'rows': 3, 'cols': 2, 'boundary': 'torus'},
         'observables': [{'name': 'z-loop', 'template': 'vertex'}]}

SMALL = {'lattice': {'rows': 1, 'cols': 1},
         'model': {'model': 'pxp', 'rb_over_a': 2.4},
         'schedule': {'total': 3.0, 'delta_min': -2.0, 'delta_max': 2.0, 'endpoints': [0.5, 2.0]},
         'observables': [{'name': 'density'}],
         'samples': 50,
         'seed': 3}


def write(tmp_path, doc, name='run.json'):
    fname = tmp_path / name
    fname.write_text(json.dumps({**doc, 'output': str(tmp_path / 'out')}))
    return fname


def test_lattice(tmp_path, capsys):
    assert main(['lattice', str(write(tmp_path, TORUS))]) == 0
    assert capsys.readouterr().out.startswith('36 sites, 12 triangles, 18 vertices, 6 hexagons')
    doc = json.loads((tmp_path / 'out' / 'lattice.json').read_text())
    assert doc


def test_bad_config(tmp_path, capsys):
    fname = write(tmp_path, {**TORUS, 'observables': [{'name': 'entropy'}]})
    assert main(['lattice', str(fname)]) == EXIT_CONFIG
    assert 'entropy' in capsys.readouterr().err


def test_missing_config(tmp_path):
    assert main(['lattice', str(tmp_path / 'nothing.json')]) == EXIT_CONFIG


def test_sweep_needs_schedule(tmp_path):
    assert main(['sweep', str(write(tmp_path, TORUS))]) == EXIT_CONFIG


def test_capacity(tmp_path, monkeypatch):
    monkeypatch.setattr(config, 'covering_cap', 1)
    assert main(['dimer-enum', str(write(tmp_path, TORUS))]) == EXIT_CAPACITY


def test_coverings_measure(tmp_path, capsys):
    fname = write(tmp_path, TORUS)
    assert main(['dimer-enum', str(fname)]) == 0
    assert 'exempt coverings' in capsys.readouterr().out
    covers = tmp_path / 'out' / 'coverings.txt'
    assert main(['measure', str(fname), '--snapshots', str(covers)]) == 0
    _, rows = read_csv(tmp_path / 'out' / 'report.csv')
    assert len(rows) == 1
    assert rows[0]['observable'].startswith('z-loop')
    assert float(rows[0]['estimate']) == -1
    report = json.loads((tmp_path / 'out' / 'report.json').read_text())
    assert report['inputs'] == [str(covers)]


def test_sweep_reproducible(tmp_path):
    fname = write(tmp_path, SMALL)
    assert main(['sweep', str(fname)]) == 0
    out = tmp_path / 'out'
    first = {p.name: p.read_bytes() for p in out.glob('snapshots_*.txt')}
    assert sorted(first) == ['snapshots_0.5.txt', 'snapshots_2.txt']
    _, rows = read_csv(out / 'sweep.csv')
    assert [r['endpoint'] for r in rows] == ['0.5', '2']
    assert all(r['dim'] == '12' for r in rows)
    assert all(abs(float(r['norm']) - 1) < 1E-6 for r in rows)

    assert main(['sweep', str(fname)]) == 0
    assert {p.name: p.read_bytes() for p in out.glob('snapshots_*.txt')} == first


def test_measure_from_sweep(tmp_path):
    fname = write(tmp_path, SMALL)
    assert main(['measure', str(fname)]) == 0
    _, rows = read_csv(tmp_path / 'out' / 'report.csv')
    exact = [r for r in rows if r['n_samples'] == '0']
    sampled = [r for r in rows if r['n_samples'] == '50']
    assert exact and sampled
    assert {r['endpoint'] for r in rows} == {'0.5', '2'}
