''' Run configuration documents (JSON) for the command line tool

    A run configuration bundles the lattice, model, sweep schedule, quench
    pulse, observables, sample count and seed of one reproducible run. Its
    hash (of the canonical JSON form, after command-line overrides) is
    written into every output file.
'''

from __future__ import annotations
from typing import Optional, Any
from dataclasses import dataclass, field
from pathlib import Path
import hashlib
import json
import os

from .rubytypes import ConfigError
from .hamiltonian import HamiltonianSpec
from .schedule import SweepSchedule, dimensionless_schedule
from .dynamics import QuenchSpec
from .lattice import RubyLattice, build_ruby_lattice
from .strings import get_template

OBSERVABLES = ('z-loop', 'x-loop', 'bffm-z', 'bffm-x', 'density', 'density-profile',
               'vertex', 'g2', 'g3', 'logical')
SECTIONS = {'lattice', 'model', 'schedule', 'quench', 'observables', 'samples', 'seed',
            'output', 'calibration', 'readout_errors', 'save_states', 'snapshots'}


@dataclass
class LatticeConfig:
    ''' Lattice section '''
    rows: int
    cols: int
    boundary: str = 'open'
    hole: Any = None
    bulk_depth: Optional[int] = None

    def build(self) -> RubyLattice:
        return build_ruby_lattice(self.rows, self.cols, self.boundary, self.hole, self.bulk_depth)


@dataclass
class ObservableConfig:
    ''' One entry of the observables list

        Attributes
        ----------
        name: Observable (one of OBSERVABLES)
        template: Loop template for loop-based observables
        kind: 'Z' or 'X' for correlators
        scaling: Also report per-area and per-perimeter roots
    '''
    name: str
    template: Optional[str] = None
    kind: str = 'Z'
    scaling: bool = False


@dataclass
class CalibrationConfig:
    ''' Quench-time scan for the parity revival '''
    template: str = 'hexagon'
    tau_max: Optional[float] = None
    n_tau: int = 41


@dataclass
class RunConfig:
    ''' Parsed and validated run configuration '''
    lattice: LatticeConfig
    model: HamiltonianSpec
    schedule: Optional[SweepSchedule]
    endpoints: list[float]
    quench: QuenchSpec
    observables: list[ObservableConfig]
    samples: int = 0
    seed: Optional[int] = None
    output: str = '.'
    calibration: CalibrationConfig = field(default_factory=CalibrationConfig)
    readout_errors: Optional[tuple[float, float]] = None
    save_states: bool = False
    snapshots: list[str] = field(default_factory=list)
    hash: str = ''
    document: dict = field(default_factory=dict, repr=False)


def config_hash(doc: dict) -> str:
    ''' First 16 hex digits of the SHA-256 of the canonical JSON document '''
    canonical = json.dumps(doc, sort_keys=True, separators=(',', ':'))
    return hashlib.sha256(canonical.encode()).hexdigest()[:16]


def _line_of(text: str, key: str) -> int:
    for k, line in enumerate(text.splitlines(), start=1):
        if f'"{key}"' in line:
            return k
    return 0


class _Section:
    ''' Typed access to one dictionary of the document, raising ConfigError
        with the field path and source line
    '''
    def __init__(self, doc: dict, path: str, text: str):
        if not isinstance(doc, dict):
            raise ConfigError(f'{path}: expected an object (line {_line_of(text, path.split(".")[-1])})')
        self.doc = doc
        self.path = path
        self.text = text

    def error(self, key: str, msg: str) -> ConfigError:
        line = _line_of(self.text, key)
        where = f' (line {line})' if line else ''
        return ConfigError(f'{self.path}.{key}: {msg}{where}')

    def check_keys(self, allowed) -> None:
        for key in self.doc:
            if key not in allowed:
                raise self.error(key, f'unknown field; allowed: {sorted(allowed)}')

    def get(self, key: str, typ, default=..., allow_none=False):
        if key not in self.doc:
            if default is ...:
                raise self.error(key, 'required field missing')
            return default
        value = self.doc[key]
        if value is None and allow_none:
            return None
        if isinstance(value, bool) and typ is not bool or not isinstance(value, typ):
            raise self.error(key, f'expected {getattr(typ, "__name__", typ)}, got {value!r}')
        return value


NUMBER = (int, float)


def _schedule(sec: _Section) -> SweepSchedule:
    if 'total' in sec.doc:
        sec.check_keys({'total', 'delta_min', 'delta_max', 'ramp_fraction', 'omega', 'endpoints'})
        return dimensionless_schedule(sec.get('total', NUMBER),
                                      sec.get('delta_min', NUMBER, -3.0),
                                      sec.get('delta_max', NUMBER, 5.0),
                                      sec.get('ramp_fraction', NUMBER, 0.1),
                                      sec.get('omega', NUMBER, None, allow_none=True))
    sec.check_keys({'omega_max', 'delta_min', 'delta_max', 't_ramp_on', 't_sweep',
                    't_ramp_down', 'endpoints'})
    return SweepSchedule(omega_max=sec.get('omega_max', NUMBER),
                         delta_min=sec.get('delta_min', NUMBER),
                         delta_max=sec.get('delta_max', NUMBER),
                         t_ramp_on=sec.get('t_ramp_on', NUMBER),
                         t_sweep=sec.get('t_sweep', NUMBER),
                         t_ramp_down=sec.get('t_ramp_down', NUMBER, 0.0))


def parse_run_config(doc: dict, text: str = '') -> RunConfig:
    ''' Validate a run configuration document

        Raises:
            ConfigError: schema violation, naming the field path and line
    '''
    top = _Section(doc, 'config', text)
    top.check_keys(SECTIONS)
    try:
        lat = _Section(top.get('lattice', dict), 'lattice', text)
        lat.check_keys({'rows', 'cols', 'boundary', 'hole', 'bulk_depth'})
        lattice = LatticeConfig(lat.get('rows', int), lat.get('cols', int),
                                lat.get('boundary', str, 'open'),
                                lat.get('hole', (int, str), None, allow_none=True),
                                lat.get('bulk_depth', int, None, allow_none=True))

        mod = _Section(top.get('model', dict, {}), 'model', text)
        mod.check_keys({'model', 'rb_over_a', 'r_trunc_over_a', 'phase'})
        model = HamiltonianSpec(model=mod.get('model', str, 'pxp'),
                                rb_over_a=mod.get('rb_over_a', NUMBER, 2.4),
                                phase=mod.get('phase', NUMBER, 0.0),
                                r_trunc_over_a=mod.get('r_trunc_over_a', NUMBER, None, allow_none=True))

        schedule = None
        endpoints: list[float] = []
        if 'schedule' in doc:
            sch = _Section(top.get('schedule', dict), 'schedule', text)
            schedule = _schedule(sch)
            endpoints = [float(e) for e in sch.get('endpoints', list, [])]

        qdoc = _Section(top.get('quench', dict, {}), 'quench', text)
        qdoc.check_keys({'omega_q', 'delta_q', 'phase', 'tau', 'rise_time', 'rb_over_a'})
        quench = QuenchSpec(**{k: qdoc.get(k, NUMBER, allow_none=k in ('tau', 'rise_time'))
                               for k in qdoc.doc})

        observables = []
        for k, entry in enumerate(top.get('observables', list, [])):
            obs = _Section(entry, f'observables[{k}]', text)
            obs.check_keys({'name', 'template', 'kind', 'scaling'})
            oc = ObservableConfig(obs.get('name', str), obs.get('template', str, None, allow_none=True),
                                  obs.get('kind', str, 'Z'), obs.get('scaling', bool, False))
            if oc.name not in OBSERVABLES:
                raise obs.error('name', f'unknown observable {oc.name!r}; use one of {OBSERVABLES}')
            if oc.kind not in ('Z', 'X'):
                raise obs.error('kind', f'unknown kind {oc.kind!r}')
            if oc.template is not None:
                tmp = get_template(oc.template)
                kind = 'X' if oc.name in ('x-loop', 'bffm-x') else oc.kind
                if kind not in tmp.kinds:
                    raise obs.error('template', f'template {oc.template!r} has no {kind} form')
            elif oc.name in ('z-loop', 'x-loop', 'bffm-z', 'bffm-x'):
                raise obs.error('template', f'{oc.name} needs a loop template')
            observables.append(oc)

        calibration = CalibrationConfig()
        if 'calibration' in doc:
            cal = _Section(top.get('calibration', dict), 'calibration', text)
            cal.check_keys({'template', 'tau_max', 'n_tau'})
            calibration = CalibrationConfig(cal.get('template', str, 'hexagon'),
                                            cal.get('tau_max', NUMBER, None, allow_none=True),
                                            cal.get('n_tau', int, 41))
            get_template(calibration.template)

        readout = None
        if doc.get('readout_errors') is not None:
            ro = _Section(top.get('readout_errors', dict), 'readout_errors', text)
            ro.check_keys({'p01', 'p10'})
            readout = (float(ro.get('p01', NUMBER, 0.0)), float(ro.get('p10', NUMBER, 0.0)))

        samples = top.get('samples', int, 0)
        seed = top.get('seed', int, None, allow_none=True)
        if samples < 0:
            raise top.error('samples', 'must be nonnegative')
        if samples > 0 and seed is None:
            raise top.error('seed', 'a seed is required when sampling snapshots')
        output = top.get('output', str, os.environ.get('RUBYQSL_OUTPUT', '.'))
        save_states = top.get('save_states', bool, False)
        snapshots = [str(s) for s in top.get('snapshots', list, [])]
    except ConfigError:
        raise
    except ValueError as err:
        # Constructor checks (schedule ordering, unknown model, ...)
        raise ConfigError(f'{err}') from err

    return RunConfig(lattice, model, schedule, endpoints, quench, observables, samples, seed,
                     output, calibration, readout, save_states, snapshots,
                     config_hash(doc), doc)


def load_run_config(fname, seed: Optional[int] = None, samples: Optional[int] = None,
                    output: Optional[str] = None) -> RunConfig:
    ''' Read and validate a JSON run configuration, applying scalar overrides
        before hashing
    '''
    text = Path(fname).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise ConfigError(f'{fname}: invalid JSON at line {err.lineno}: {err.msg}') from err
    if not isinstance(doc, dict):
        raise ConfigError(f'{fname}: top level must be an object')
    for key, value in (('seed', seed), ('samples', samples), ('output', output)):
        if value is not None:
            doc[key] = value
    return parse_run_config(doc, text)
