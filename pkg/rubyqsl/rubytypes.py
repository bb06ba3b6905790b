''' Record types and exceptions shared across rubyqsl '''
from collections import namedtuple


Triangle = namedtuple('Triangle', ['sites', 'corners', 'up', 'center'])
Vertex = namedtuple('Vertex', ['pos', 'sites', 'triangles'])
Face = namedtuple('Face', ['center', 'sites', 'steps', 'vertices', 'complete', 'hole_adjacent'])
Interaction = namedtuple('Interaction', ['i', 'j', 'v', 'hard'])

Snapshot = namedtuple('Snapshot', ['occupation', 'endpoint', 'seed', 'timestamp'],
                      defaults=[None, None, None])
ObservableReport = namedtuple(
    'ObservableReport', ['observable', 'label', 'endpoint', 'estimate', 'stderr',
                         'n_samples', 'n_loop_instances', 'seed'],
    defaults=[None])
VertexStats = namedtuple('VertexStats', ['monomer', 'dimer', 'double'])
ScalingRoots = namedtuple('ScalingRoots', ['area', 'perimeter', 'area_root', 'perimeter_root'])
LogicalReport = namedtuple('LogicalReport', ['z_l', 'x_l', 'zz'])

Cycle = namedtuple('Cycle', ['sites', 'vertices'])
TransitionGraph = namedtuple('TransitionGraph', ['cycles', 'paths'])


class CapacityError(RuntimeError):
    ''' A basis or covering enumeration would exceed its configured cap '''


class ConvergenceError(RuntimeError):
    ''' An iterative solver did not reach its tolerance '''
    def __init__(self, msg: str, residual: float = float('nan')):
        super().__init__(msg)
        self.residual = residual


class ConfigError(ValueError):
    ''' Run configuration does not satisfy the schema '''


class SectorError(RuntimeError):
    ''' Sector labels are not a consistent 2-coloring '''
