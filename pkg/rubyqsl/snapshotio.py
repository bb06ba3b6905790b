''' Reading and writing snapshot files

    A snapshot file starts with a header comment

        # rubyqsl <version> config=<hash> readout=prepared|quench

    followed by one record per line: a fixed-width 0/1 occupation string
    (site 0 first), then tab-separated endpoint and seed.
'''

from __future__ import annotations
from typing import Optional, Union
from io import StringIO
from pathlib import Path

import numpy as np

from .reports import header
from .measure import SnapshotSet
from .lattice import RubyLattice


class SnapshotReader(StringIO):
    ''' Class for reading records from snapshot file text '''
    def __init__(self, text: str, name: str = '<snapshots>'):
        super().__init__(text)
        self.name = name
        self.lineno = 0

    def readheader(self) -> dict:
        ''' Read the header line into a dictionary of its key=value fields '''
        line = self.readline()
        self.lineno += 1
        if not line.startswith('# rubyqsl '):
            raise ValueError(f'{self.name}:1: missing rubyqsl header')
        words = line[2:].split()
        fields = {'version': words[1]}
        for w in words[2:]:
            key, _, value = w.partition('=')
            fields[key] = value
        return fields

    def readrecord(self) -> Optional[tuple[str, Optional[float], Optional[int]]]:
        ''' Read the next (bits, endpoint, seed) record, or None at the end '''
        while True:
            line = self.readline()
            if not line:
                return None
            self.lineno += 1
            line = line.rstrip('\n')
            if line and not line.startswith('#'):
                break
        parts = line.split('\t')
        bits = parts[0]
        if set(bits) - {'0', '1'}:
            raise ValueError(f'{self.name}:{self.lineno}: occupation string may only hold 0 and 1')
        try:
            endpoint = float(parts[1]) if len(parts) > 1 and parts[1] else None
            seed = int(parts[2]) if len(parts) > 2 and parts[2] else None
        except ValueError as err:
            raise ValueError(f'{self.name}:{self.lineno}: bad metadata {parts[1:]}') from err
        return bits, endpoint, seed


def format_snapshots(snaps: SnapshotSet, config_hash: str) -> str:
    ''' Snapshot file text '''
    endpoint = '' if snaps.endpoint is None else repr(float(snaps.endpoint))
    seed = '' if snaps.seed is None else str(snaps.seed)
    lines = [header(config_hash, readout=snaps.readout)]
    chars = np.where(snaps.occupations, '1', '0')
    for row in chars:
        lines.append(f'{"".join(row)}\t{endpoint}\t{seed}')
    return '\n'.join(lines) + '\n'


def write_snapshots(fname: Union[str, Path], snaps: SnapshotSet, config_hash: str) -> None:
    ''' Write a snapshot file '''
    Path(fname).write_text(format_snapshots(snaps, config_hash))


def read_snapshots(fname: Union[str, Path], lat: Optional[RubyLattice] = None) -> SnapshotSet:
    ''' Read a snapshot file, checking record widths against the lattice

        Raises:
            ValueError: malformed file, inconsistent widths or metadata, or
                widths that differ from lat.n_sites
    '''
    reader = SnapshotReader(Path(fname).read_text(), str(fname))
    fields = reader.readheader()
    rows = []
    endpoint = seed = None
    width = lat.n_sites if lat is not None else None
    while (rec := reader.readrecord()) is not None:
        bits, ep, sd = rec
        if width is None:
            width = len(bits)
        if len(bits) != width:
            raise ValueError(f'{fname}:{reader.lineno}: record has {len(bits)} sites, expected {width}')
        if rows and (ep, sd) != (endpoint, seed):
            raise ValueError(f'{fname}:{reader.lineno}: metadata differs from earlier records')
        endpoint, seed = ep, sd
        rows.append([c == '1' for c in bits])
    occ = np.array(rows, dtype=bool).reshape(len(rows), width or 0)
    return SnapshotSet(occ, endpoint=endpoint, seed=seed,
                       readout=fields.get('readout', 'prepared'))
