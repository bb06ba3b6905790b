''' Report table and snapshot file tests '''
import json
import pytest
import numpy as np

from rubyqsl.rubytypes import ObservableReport
from rubyqsl.reports import fmt, write_csv, write_json, read_csv, REPORT_COLUMNS
from rubyqsl.measure import SnapshotSet
from rubyqsl.snapshotio import write_snapshots, read_snapshots, format_snapshots
from rubyqsl.lattice import build_ruby_lattice


@pytest.mark.parametrize('value, expected', [
    (None, ''),
    (3, '3'),
    (1.5, '1.5'),
    (2.0, '2'),
    (-0.0, '0'),
    (-1E-12, '0'),
    (0.125, '0.125'),
    (float('nan'), 'nan'),
])
def test_fmt(value, expected):
    assert fmt(value) == expected


def test_report_tables(tmp_path):
    reports = [ObservableReport('z-loop:hexagon', 'hexagon', 4.0, -0.25, 0.01, 1000, 6, 7),
               ObservableReport('bffm-z:hexagon', 'hexagon', 4.0, None, None, 1000, 6, 7)]
    fname = tmp_path / 'report.csv'
    write_csv(fname, reports, 'abcd')
    head, rows = read_csv(fname)
    assert head.startswith('# rubyqsl ')
    assert 'config=abcd' in head
    assert 'schema=rubyqsl.report/1' in head
    assert list(rows[0].keys()) == list(REPORT_COLUMNS)
    assert rows[0]['estimate'] == '-0.25'
    assert rows[1]['estimate'] == ''
    assert rows[1]['stderr'] == ''

    jname = tmp_path / 'report.json'
    write_json(jname, reports, 'abcd', extra={'lattice': {'n_sites': 6}})
    doc = json.loads(jname.read_text())
    assert doc['config'] == 'abcd'
    assert doc['reports'][0]['estimate'] == -0.25
    assert doc['reports'][1]['estimate'] is None
    assert doc['lattice']['n_sites'] == 6


def test_read_foreign_table(tmp_path):
    fname = tmp_path / 'other.csv'
    fname.write_text('a,b\n1,2\n')
    with pytest.raises(ValueError):
        read_csv(fname)


@pytest.fixture
def snaps():
    occ = np.random.default_rng(3).random((20, 6)) < 0.3
    return SnapshotSet(occ, endpoint=1.5, seed=11, readout='quench')


def test_snapshot_file(tmp_path, snaps):
    fname = tmp_path / 'snaps.txt'
    write_snapshots(fname, snaps, 'abcd')
    lines = fname.read_text().splitlines()
    assert lines[0].startswith('# rubyqsl ')
    assert 'readout=quench' in lines[0]
    assert len(lines) == 21
    assert lines[1].split('\t')[1:] == ['1.5', '11']

    back = read_snapshots(fname, build_ruby_lattice(1, 1))
    assert (back.occupations == snaps.occupations).all()
    assert back.endpoint == 1.5
    assert back.seed == 11
    assert back.readout == 'quench'


def test_snapshot_text_deterministic(snaps):
    assert format_snapshots(snaps, 'abcd') == format_snapshots(snaps, 'abcd')


def test_snapshot_width(tmp_path, snaps):
    fname = tmp_path / 'snaps.txt'
    write_snapshots(fname, snaps, 'abcd')
    with pytest.raises(ValueError, match='expected 36'):
        read_snapshots(fname, build_ruby_lattice(3, 2, 'torus'))


@pytest.mark.parametrize('body', [
    '0102\t\t\n',
    '0101\t\t\n011\t\t\n',
    '0101\t1.0\t\n0101\t2.0\t\n',
    '0101\tx\t\n',
])
def test_bad_snapshot_files(tmp_path, body):
    fname = tmp_path / 'bad.txt'
    fname.write_text('# rubyqsl 0.1 config=abcd readout=prepared\n' + body)
    with pytest.raises(ValueError):
        read_snapshots(fname)


def test_missing_header(tmp_path):
    fname = tmp_path / 'bad.txt'
    fname.write_text('0101\t\t\n')
    with pytest.raises(ValueError, match='header'):
        read_snapshots(fname)
