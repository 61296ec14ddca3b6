"""Modified Lax-Friedrichs scheme with fractional-step source terms."""

from .cell import CellBuilder, CellSolution, SchemeError, StepContext, rarefaction_fan
from .grid import Grid, SchemeParams, build_grid, default_beta, default_delta
from .solver import (GridSolution, StepReport, advance, cutoff, evolve, fractional_step,
                     gauss_average, initial_lattice, steady_profile)

__all__ = [
    "CellBuilder", "CellSolution", "SchemeError", "StepContext", "rarefaction_fan",
    "Grid", "SchemeParams", "build_grid", "default_beta", "default_delta",
    "GridSolution", "StepReport", "advance", "cutoff", "evolve", "fractional_step",
    "gauss_average", "initial_lattice", "steady_profile",
]
