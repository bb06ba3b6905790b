from .config import config
from .rubytypes import CapacityError, ConvergenceError, ConfigError, SectorError
from .lattice import (RubyLattice, BlockadeGraph, build_ruby_lattice, blockade_graph,
                      triangle_graph, interaction_list, save_lattice, load_lattice)
from .strings import (StringSpec, z_string, z_loop, x_loop, x_string_from_path,
                      dual_string, enumerate_loops)
from .hilbert import ConstrainedBasis, enumerate_basis, dimer_sector
from .hamiltonian import HamiltonianSpec, build_pxp, build_vdw, quench_time
from .schedule import SweepSchedule, schedule_eval
from .dynamics import (StateVector, QuenchSpec, evolve, run_sweep, apply_quench,
                       ground_state, spectrum_slice)
from .measure import (SnapshotSet, sample_snapshots, z_parity_exact, z_parity_snap,
                      x_parity_via_quench, bffm, vertex_stats, mean_density,
                      connected_correlators, logical_ops)
from .dimer import (enumerate_perfect_coverings, apply_x_loop, transition_graph,
                    sector_relation, classify_sectors)


__version__ = '0.1'
