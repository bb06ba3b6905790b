''' Report tables: number formatting, CSV and JSON writers '''

from __future__ import annotations
from typing import Optional, Sequence, Union, Any
from pathlib import Path
import csv
import json

from .config import config
from .rubytypes import ObservableReport

REPORT_SCHEMA = 'rubyqsl.report/1'
REPORT_COLUMNS = ('observable', 'label', 'endpoint', 'estimate', 'stderr',
                  'n_samples', 'n_loop_instances', 'seed')


def fmt(f: Optional[float]) -> str:
    ''' String formatter, stripping trailing zeros. None becomes an empty field. '''
    if f is None:
        return ''
    if isinstance(f, int) and not isinstance(f, bool):
        return str(f)
    f = float(f)
    if f != f:
        return 'nan'
    p = f'.{config.precision}f'
    s = format(f, p)
    s = s.rstrip('0').rstrip('.')  # Strip trailing zeros
    return '0' if s in ('-0', '') else s


def version() -> str:
    ''' Package version string '''
    from . import __version__
    return __version__


def header(config_hash: str, **fields: Any) -> str:
    ''' Comment line identifying the tool version and run configuration '''
    extra = ''.join(f' {k}={v}' for k, v in fields.items())
    return f'# rubyqsl {version()} config={config_hash}{extra}'


def _cell(v) -> str:
    if v is None or isinstance(v, str):
        return '' if v is None else v
    return fmt(v)


def write_table(fname: Union[str, Path], columns: Sequence[str], rows: Sequence[Sequence],
                config_hash: str, **fields: Any) -> None:
    ''' CSV table under a version/config header line '''
    with open(fname, 'w', newline='') as f:
        f.write(header(config_hash, schema=REPORT_SCHEMA, **fields) + '\n')
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(v) for v in row])


def write_csv(fname: Union[str, Path], reports: Sequence[ObservableReport], config_hash: str) -> None:
    ''' Observable reports, one row each, in the given order '''
    write_table(fname, REPORT_COLUMNS, [tuple(r) for r in reports], config_hash)


def _jsonable(v):
    if v is None or isinstance(v, (str, bool)):
        return v
    if isinstance(v, int):
        return v
    f = float(v)
    return None if f != f else round(f, config.precision)


def write_json(fname: Union[str, Path], reports: Sequence[ObservableReport], config_hash: str,
               extra: Optional[dict] = None) -> None:
    ''' JSON mirror of `write_csv`, plus optional extra sections '''
    doc = {'schema': REPORT_SCHEMA,
           'version': version(),
           'config': config_hash,
           'reports': [{k: _jsonable(v) for k, v in r._asdict().items()} for r in reports]}
    if extra:
        doc.update(extra)
    Path(fname).write_text(json.dumps(doc, indent=1, sort_keys=False) + '\n')


def read_csv(fname: Union[str, Path]) -> tuple[str, list[dict]]:
    ''' Header line and rows (as string dicts) of a table written here '''
    with open(fname, newline='') as f:
        head = f.readline().rstrip('\n')
        if not head.startswith('# rubyqsl '):
            raise ValueError(f'{fname} is not a rubyqsl table')
        return head, list(csv.DictReader(f))
