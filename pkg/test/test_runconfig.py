''' Run configuration parsing tests '''
import json
import pytest

from rubyqsl.rubytypes import ConfigError
from rubyqsl.runconfig import load_run_config, parse_run_config, config_hash


BASE = {'lattice': {'rows': 3, 'cols': 2, 'boundary': 'torus'},
        'model': {'model': 'pxp', 'rb_over_a': 2.4},
        'schedule': {'total': 4.0, 'endpoints': [1.0, 2.0]},
        'observables': [{'name': 'z-loop', 'template': 'hexagon', 'scaling': True},
                        {'name': 'density'}],
        'samples': 100,
        'seed': 5}


def write(tmp_path, doc, name='run.json'):
    fname = tmp_path / name
    fname.write_text(json.dumps(doc, indent=1))
    return fname


def test_parse(tmp_path):
    cfg = load_run_config(write(tmp_path, BASE))
    assert cfg.lattice.build().n_sites == 36
    assert cfg.model.rb_over_a == 2.4
    assert cfg.endpoints == [1.0, 2.0]
    assert cfg.schedule.omega_max == 1.0
    assert [oc.name for oc in cfg.observables] == ['z-loop', 'density']
    assert cfg.observables[0].scaling
    assert cfg.samples == 100 and cfg.seed == 5
    assert len(cfg.hash) == 16


def test_hash():
    reordered = dict(reversed(list(BASE.items())))
    assert config_hash(BASE) == config_hash(reordered)
    assert config_hash(BASE) != config_hash({**BASE, 'seed': 6})


def test_overrides_change_hash(tmp_path):
    fname = write(tmp_path, BASE)
    a = load_run_config(fname)
    b = load_run_config(fname, seed=9, samples=10, output=str(tmp_path / 'out'))
    assert b.seed == 9 and b.samples == 10
    assert b.output == str(tmp_path / 'out')
    assert a.hash != b.hash
    assert load_run_config(fname).hash == a.hash


@pytest.mark.parametrize('change', [
    {'colour': 1},
    {'observables': [{'name': 'entropy'}]},
    {'observables': [{'name': 'z-loop'}]},
    {'observables': [{'name': 'x-loop', 'template': 'vertex'}]},
    {'seed': None},
    {'samples': -1},
    {'lattice': {'rows': 3}},
    {'lattice': {'rows': '3', 'cols': 2}},
    {'model': {'model': 'ising'}},
    {'schedule': {'total': -1.0}},
])
def test_schema_errors(change):
    with pytest.raises(ConfigError):
        parse_run_config({**BASE, **change})


def test_error_names_line(tmp_path):
    doc = {**BASE, 'lattice': {'rows': 3, 'cols': 2, 'shape': 'round'}}
    with pytest.raises(ConfigError, match=r'lattice\.shape.*line'):
        load_run_config(write(tmp_path, doc))


def test_bad_json(tmp_path):
    fname = tmp_path / 'run.json'
    fname.write_text('{"lattice": {"rows": 3,\n "cols": }}')
    with pytest.raises(ConfigError, match='line 2'):
        load_run_config(fname)
    fname.write_text('[1, 2]')
    with pytest.raises(ConfigError):
        load_run_config(fname)
