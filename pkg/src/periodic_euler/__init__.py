"""Time-periodic solutions of forced isentropic gas flow through a duct.

The package provides the gas model and Riemann solver, a modified
Lax-Friedrichs scheme on a staggered grid, the discrete one-period map with a
fixed-point search, and numerical checks of the solution properties.
"""

from .forcing import ZERO_FORCING, Forcing, ForcingTerm, single_mode
from .gas import DomainError, ProblemParams, State, from_invariants, to_invariants

__version__ = "0.1.0"

__all__ = ["ZERO_FORCING", "Forcing", "ForcingTerm", "single_mode", "DomainError",
           "ProblemParams", "State", "from_invariants", "to_invariants"]
