''' Global configuration options '''
from dataclasses import dataclass


@dataclass
class Config:
    ''' Global configuration options for rubyqsl

        Attributes
        ----------
        dimension_cap: Largest constrained basis that will be enumerated
        covering_cap: Largest number of dimer coverings that will be enumerated
        dense_threshold: Basis dimension below which evolution and
            eigensolvers use dense linear algebra
        krylov_dim: Dimension of the Krylov subspace used for propagation
        krylov_tol: Target local error of each Krylov substep
        eig_tol: Largest accepted eigenpair residual
        distance_tol: Relative tolerance when comparing pair distances
            to blockade or truncation radii
        bulk_depth: Number of boundary layers excluded from bulk statistics
        sweep_step: Sweep time step, in units of 1/Omega_max
        rise_steps: Number of midpoint steps across a quench rise time
        precision: Decimal precision for numbers in report files
        threads: Worker threads for independent sweep endpoints
    '''
    dimension_cap: int = 50_000_000
    covering_cap: int = 2_000_000
    dense_threshold: int = 2000
    krylov_dim: int = 30
    krylov_tol: float = 1E-10
    eig_tol: float = 1E-8
    distance_tol: float = 1E-9
    bulk_depth: int = 3
    sweep_step: float = 0.05
    rise_steps: int = 50
    precision: int = 8
    threads: int = 1


config = Config()
