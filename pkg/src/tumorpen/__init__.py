"""Penalized multiphase tumor-growth simulator on a fixed reference box."""

from .config import RunConfig, load_config, loads_config, dump_config, validate_config
from .experiments import Simulation, SweepSpec, convergence_study, parameter_sweep, run_simulation
from .grid import Grid, make_grid
from .io import read_field_snapshot, write_diagnostics, write_field_snapshot
from .state import State

__version__ = "0.1.0"

__all__ = [
    "Grid",
    "RunConfig",
    "Simulation",
    "State",
    "SweepSpec",
    "convergence_study",
    "dump_config",
    "load_config",
    "loads_config",
    "make_grid",
    "parameter_sweep",
    "read_field_snapshot",
    "run_simulation",
    "validate_config",
    "write_diagnostics",
    "write_field_snapshot",
]
