"""Finite-volume simulation of a degenerate two-species cross-diffusion system
with relative-entropy diagnostics."""

from .errors import ContractError
from .grid import Grid1D, State, make_grid
from .model import ModelParams, new_model
from .solver import SolverConfig, run, step

__all__ = [
    "ContractError",
    "Grid1D",
    "ModelParams",
    "SolverConfig",
    "State",
    "make_grid",
    "new_model",
    "run",
    "step",
]

__version__ = "0.1.0"
