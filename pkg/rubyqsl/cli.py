''' Command line front end

    rubyqsl lattice|sweep|measure|quench-calibrate|dimer-enum CONFIG [options]

    Exit codes: 0 success, 2 configuration or input error, 3 capacity
    exceeded, 4 numerical non-convergence.
'''

from __future__ import annotations
from typing import Optional, Sequence
from dataclasses import replace
from pathlib import Path
import argparse
import logging
import os
import sys

import numpy as np
from tqdm import tqdm

from .config import config
from .rubytypes import (CapacityError, ConvergenceError, ConfigError,
                        ObservableReport)
from .lattice import RubyLattice, save_lattice
from .strings import enumerate_loops
from .hilbert import sector_population
from .hamiltonian import quench_time
from .dynamics import StateVector, run_sweep, apply_quench
from .measure import (SnapshotSet, sample_snapshots, apply_readout_errors, z_report,
                      x_report, bffm_pair, density_report, vertex_reports, density_profile,
                      connected_correlators, scaling_report, logical_ops)
from .dimer import enumerate_perfect_coverings, classify_sectors, as_snapshots
from .snapshotio import write_snapshots, read_snapshots
from .reports import fmt, write_table, write_csv, write_json
from .runconfig import RunConfig, ObservableConfig, load_run_config

X_OBSERVABLES = ('x-loop', 'bffm-x')

EXIT_CONFIG = 2
EXIT_CAPACITY = 3
EXIT_CONVERGENCE = 4


def _outdir(cfg: RunConfig) -> Path:
    out = Path(cfg.output)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _needs_quench(cfg: RunConfig) -> bool:
    return any(oc.name in X_OBSERVABLES or (oc.name in ('g2', 'g3') and oc.kind == 'X')
               or oc.name == 'logical' for oc in cfg.observables)


def _prepare(cfg: RunConfig, lat: RubyLattice, endpoints: Sequence[float]) -> dict[float, StateVector]:
    if cfg.schedule is None:
        raise ConfigError('config.schedule: required field missing')
    if not endpoints:
        raise ConfigError('schedule.endpoints: at least one endpoint is required')
    return run_sweep(lat, cfg.model, cfg.schedule, endpoints)


def _sample(cfg: RunConfig, lat: RubyLattice, psi: StateVector, endpoint: float,
            readout: str) -> SnapshotSet:
    if readout == 'quench':
        psi = apply_quench(psi, lat, cfg.quench)
    snaps = sample_snapshots(psi, cfg.samples, cfg.seed, endpoint=endpoint, readout=readout)
    if cfg.readout_errors is not None:
        snaps = apply_readout_errors(snaps, *cfg.readout_errors, cfg.seed)
    return snaps


def _scaling_rows(rep: ObservableReport, loop) -> list[ObservableReport]:
    roots = scaling_report({rep.label: rep.estimate}, {rep.label: loop})[rep.label]
    rows = []
    for name, size, root in (('area-root', roots.area, roots.area_root),
                             ('perimeter-root', roots.perimeter, roots.perimeter_root)):
        stderr = None
        if rep.stderr is not None and rep.estimate != 0:
            stderr = root * rep.stderr / (size * abs(rep.estimate))
        rows.append(rep._replace(observable=f'{rep.observable}:{name}', estimate=root, stderr=stderr))
    return rows


def _logical_rows(target, lat: RubyLattice, x_target, endpoint) -> list[ObservableReport]:
    rep = logical_ops(target, lat, x_target)
    n = len(target) if isinstance(target, SnapshotSet) else 0
    seed = target.seed if isinstance(target, SnapshotSet) else None
    rows = [ObservableReport('logical:z', k, endpoint, v, None, n, 1, seed) for k, v in rep.z_l.items()]
    rows += [ObservableReport('logical:x', k, endpoint, v, None, n, 1, seed) for k, v in rep.x_l.items()]
    rows += [ObservableReport('logical:zz', f'{a}*{b}', endpoint, v, None, n, 1, seed)
             for (a, b), v in rep.zz.items()]
    return rows


def measure_target(cfg: RunConfig, lat: RubyLattice, prepared, quenched,
                   endpoint: Optional[float]) -> list[ObservableReport]:
    ''' Report rows of every configured observable

        Args:
            cfg: Run configuration
            lat: The lattice
            prepared: Prepared state, or prepared-readout snapshots
            quenched: Source of X strings: the prepared state (quenched
                here) or quench-readout snapshots. None when unavailable.
            endpoint: Sweep endpoint recorded in the rows
    '''
    q = cfg.quench if isinstance(quenched, StateVector) else None
    rows: list[ObservableReport] = []

    def need_quench(oc: ObservableConfig):
        if quenched is None:
            raise ValueError(f'Observable {oc.name} needs quench-readout snapshots')
        return quenched

    for oc in cfg.observables:
        if oc.name == 'z-loop':
            loops = enumerate_loops(lat, oc.template, 'Z')
            rep = z_report(prepared, loops, oc.template, endpoint=endpoint)
            rows.append(rep)
            if oc.scaling:
                rows += _scaling_rows(rep, loops[0])
        elif oc.name == 'x-loop':
            loops = enumerate_loops(lat, oc.template, 'X')
            rep = x_report(need_quench(oc), lat, loops, oc.template, q, endpoint=endpoint)
            rows.append(rep)
            if oc.scaling:
                rows += _scaling_rows(rep, loops[0])
        elif oc.name in ('bffm-z', 'bffm-x'):
            kind = oc.name[-1].upper()
            target = prepared if kind == 'Z' else need_quench(oc)
            rows += [r._replace(endpoint=endpoint if r.endpoint is None else r.endpoint)
                     for r in bffm_pair(target, lat, oc.template, kind, q)]
        elif oc.name == 'density':
            rows.append(density_report(prepared, lat, endpoint))
        elif oc.name == 'density-profile':
            n = len(prepared) if isinstance(prepared, SnapshotSet) else 0
            rows += [ObservableReport('density-profile', f'layer{k}', endpoint, v, None, n, 1, None)
                     for k, v in density_profile(prepared, lat).items()]
        elif oc.name == 'vertex':
            rows += vertex_reports(prepared, lat, endpoint)
        elif oc.name in ('g2', 'g3'):
            target = prepared if oc.kind == 'Z' else need_quench(oc)
            rows.append(connected_correlators(target, lat, int(oc.name[1]), oc.kind, q,
                                              oc.template, endpoint))
        elif oc.name == 'logical':
            rows += _logical_rows(prepared, lat, quenched, endpoint)
        else:
            raise ValueError(f'Unknown observable {oc.name!r}')
    return rows


def cmd_lattice(cfg: RunConfig, args) -> int:
    lat = cfg.lattice.build()
    out = _outdir(cfg)
    save_lattice(lat, out / 'lattice.json')
    print(f'{lat.n_sites} sites, {len(lat.triangles)} triangles, '
          f'{len(lat.vertices)} vertices, {len(lat.hexagons)} hexagons')
    if lat.hole is not None:
        print('inner boundary sites:', ' '.join(str(s) for s in lat.inner_boundary_sites()))
    return 0


def cmd_sweep(cfg: RunConfig, args) -> int:
    lat = cfg.lattice.build()
    out = _outdir(cfg)
    states = _prepare(cfg, lat, cfg.endpoints)
    quench = _needs_quench(cfg)
    rows = []
    for endpoint, psi in tqdm(states.items(), desc='endpoints', disable=not args.verbose):
        dens = density_report(psi, lat, endpoint)
        density, region = dens.estimate, dens.label
        rows.append((endpoint, sector_population(psi.probabilities(), psi.basis, lat),
                     density, region, psi.norm(), psi.dim))
        tag = fmt(endpoint)
        if cfg.samples > 0:
            write_snapshots(out / f'snapshots_{tag}.txt',
                            _sample(cfg, lat, psi, endpoint, 'prepared'), cfg.hash)
            if quench:
                write_snapshots(out / f'snapshots_{tag}_quench.txt',
                                _sample(cfg, lat, psi, endpoint, 'quench'), cfg.hash)
        if cfg.save_states:
            np.save(out / f'state_{tag}.npy', psi.amplitudes)
        print(f'endpoint {tag}: dimer sector {fmt(rows[-1][1])}, <n> {fmt(density)} ({region})')
    if cfg.save_states:
        basis = next(iter(states.values())).basis
        np.save(out / 'basis_states.npy', np.asarray(basis.states))
    write_table(out / 'sweep.csv',
                ('endpoint', 'sector_population', 'density', 'region', 'norm', 'dim'),
                rows, cfg.hash, seed=cfg.seed)
    return 0


def _snapshot_groups(files: Sequence[str], lat: RubyLattice) -> dict:
    groups: dict = {}
    for fname in files:
        snaps = read_snapshots(fname, lat)
        if len(snaps) == 0:
            raise ValueError(f'{fname}: empty snapshot set')
        slot = groups.setdefault(snaps.endpoint, {})
        if snaps.readout in slot:
            raise ValueError(f'{fname}: second {snaps.readout} file for endpoint {snaps.endpoint}')
        slot[snaps.readout] = snaps
    return groups


def cmd_measure(cfg: RunConfig, args) -> int:
    lat = cfg.lattice.build()
    out = _outdir(cfg)
    files = list(args.snapshots or cfg.snapshots)
    rows: list[ObservableReport] = []
    if files:
        groups = _snapshot_groups(files, lat)
        for endpoint, slot in tqdm(groups.items(), desc='endpoints', disable=not args.verbose):
            if 'prepared' not in slot:
                raise ValueError(f'No prepared-readout snapshots for endpoint {endpoint}')
            rows += measure_target(cfg, lat, slot['prepared'], slot.get('quench'), endpoint)
    else:
        states = _prepare(cfg, lat, cfg.endpoints)
        quench = _needs_quench(cfg)
        for endpoint, psi in tqdm(states.items(), desc='endpoints', disable=not args.verbose):
            rows += measure_target(cfg, lat, psi, psi, endpoint)
            if cfg.samples > 0:
                prepared = _sample(cfg, lat, psi, endpoint, 'prepared')
                quenched = _sample(cfg, lat, psi, endpoint, 'quench') if quench else None
                rows += measure_target(cfg, lat, prepared, quenched, endpoint)
    write_csv(out / 'report.csv', rows, cfg.hash)
    write_json(out / 'report.json', rows, cfg.hash, extra={'inputs': files})
    print(f'{len(rows)} report rows written to {out / "report.csv"}')
    return 0


def cmd_quench_calibrate(cfg: RunConfig, args) -> int:
    lat = cfg.lattice.build()
    out = _outdir(cfg)
    endpoint = cfg.endpoints[0] if cfg.endpoints else None
    psi = _prepare(cfg, lat, cfg.endpoints[:1])[endpoint]
    cal = cfg.calibration
    loops = enumerate_loops(lat, cal.template, 'X')
    if not loops:
        raise ValueError(f'Template {cal.template!r} has no X placements on {lat}')
    tau_max = cal.tau_max or 2*quench_time(cfg.quench.omega_q)
    taus = np.linspace(0, tau_max, cal.n_tau)
    rows = []
    for tau in tqdm(taus, desc='quench times', disable=not args.verbose):
        q = replace(cfg.quench, tau=float(tau))
        rep = x_report(psi, lat, loops, cal.template, q, endpoint=endpoint)
        rows.append((float(tau), rep.estimate))
    write_table(out / 'revival.csv', ('tau', 'parity'), rows, cfg.hash,
                template=cal.template, endpoint=fmt(endpoint))
    best = max(rows, key=lambda r: r[1])
    print(f'revival maximum {fmt(best[1])} at tau = {fmt(best[0])}')
    return 0


def cmd_dimer_enum(cfg: RunConfig, args) -> int:
    lat = cfg.lattice.build()
    out = _outdir(cfg)
    coverings = enumerate_perfect_coverings(lat, args.boundary)
    print(f'{len(coverings)} {args.boundary} coverings')
    if coverings:
        write_snapshots(out / 'coverings.txt', as_snapshots(lat, coverings), cfg.hash)
    if lat.hole is not None and not lat.torus and args.boundary == 'strict' and coverings:
        labels = classify_sectors(lat, coverings, coverings[0])
        counts = np.bincount(list(labels.values()), minlength=2)
        print(f'sector 0: {counts[0]}, sector 1: {counts[1]}')
    return 0


COMMANDS = {
    'lattice': cmd_lattice,
    'sweep': cmd_sweep,
    'measure': cmd_measure,
    'quench-calibrate': cmd_quench_calibrate,
    'dimer-enum': cmd_dimer_enum,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='rubyqsl',
                                     description='Ruby-lattice Rydberg spin liquid simulator')
    sub = parser.add_subparsers(dest='command', required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument('config', help='Run configuration (JSON)')
        p.add_argument('--seed', type=int, default=None, help='Override the sampling seed')
        p.add_argument('--samples', type=int, default=None, help='Override the snapshot count')
        p.add_argument('--output', default=None, help='Override the output directory')
        p.add_argument('-v', '--verbose', action='count', default=0)
        if name == 'measure':
            p.add_argument('--snapshots', nargs='+', default=None, help='Snapshot files to ingest')
        if name == 'dimer-enum':
            p.add_argument('--boundary', choices=('exempt', 'strict'), default='exempt')
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=max(logging.WARNING - 10*args.verbose, logging.DEBUG),
                        format='%(levelname)s %(message)s')
    if os.environ.get('RUBYQSL_THREADS'):
        config.threads = int(os.environ['RUBYQSL_THREADS'])
    try:
        cfg = load_run_config(args.config, args.seed, args.samples, args.output)
        return COMMANDS[args.command](cfg, args)
    except CapacityError as err:
        print(f'rubyqsl: {err}', file=sys.stderr)
        return EXIT_CAPACITY
    except ConvergenceError as err:
        print(f'rubyqsl: {err} (residual {err.residual:.3g})', file=sys.stderr)
        return EXIT_CONVERGENCE
    except (ValueError, OSError) as err:
        print(f'rubyqsl: {err}', file=sys.stderr)
        return EXIT_CONFIG


if __name__ == '__main__':
    sys.exit(main())
