"""Dirichlet k-partitions of 2D/3D domains by diffusion-generated thresholding.

The solver minimizes the sum of the regions' first Dirichlet-Laplacian
eigenvalues through a relaxed energy that alternates three steps on a uniform
periodic grid: heat-kernel convolution (FFT), pointwise thresholding, and norm
projection.  Arbitrary domains are handled by a binary indicator mask inside
the periodic box; every iteration is unconditionally energy-decreasing.
"""

from .domains import DomainMask, make_mask, restrict, shape_names
from .grid import GridSpec, ScalarField, integrate, l2_norm
from .partition import (
    OUTSIDE,
    EmptyRegionError,
    EnergyValue,
    MultiField,
    Partition,
    project_u,
    relaxed_energy,
    threshold_phi,
)
from .seeding import voronoi_init, voronoi_init_from_points
from .solver import (
    EigenResult,
    EnergyTrace,
    SolveResult,
    SolverConfig,
    eigen_solve,
    run_adaptive,
    run_alg1,
    run_alg2,
    solve,
    step_alg1,
)
from .spectral import HeatOperator, heat_semigroup

__version__ = "0.1.0"

__all__ = [
    "DomainMask",
    "EigenResult",
    "EmptyRegionError",
    "EnergyTrace",
    "EnergyValue",
    "GridSpec",
    "HeatOperator",
    "MultiField",
    "OUTSIDE",
    "Partition",
    "ScalarField",
    "SolveResult",
    "SolverConfig",
    "eigen_solve",
    "heat_semigroup",
    "integrate",
    "l2_norm",
    "make_mask",
    "project_u",
    "relaxed_energy",
    "restrict",
    "run_adaptive",
    "run_alg1",
    "run_alg2",
    "shape_names",
    "solve",
    "step_alg1",
    "threshold_phi",
    "voronoi_init",
    "voronoi_init_from_points",
]
