"""Finite-difference simulation of the Mindlin plate in both port-Hamiltonian forms."""

from .discretization import FacetBC, SemiDiscretePlate, Signal, parse_bc
from .grid import FACETS, Grid
from .integrators import (
    DiracState,
    GeometricState,
    MidpointStepper,
    compatibility_residual,
    dirac_from_geometric,
    step_leapfrog,
    step_midpoint,
    total_energy,
)
from .simulate import SimConfig, SimResult, TimeSeries, config_from_dict, load_config, run

__all__ = [
    "FACETS", "DiracState", "FacetBC", "GeometricState", "Grid", "MidpointStepper", "SemiDiscretePlate",
    "Signal", "SimConfig", "SimResult", "TimeSeries", "compatibility_residual", "config_from_dict",
    "dirac_from_geometric", "load_config", "parse_bc", "run", "step_leapfrog", "step_midpoint", "total_energy",
]
