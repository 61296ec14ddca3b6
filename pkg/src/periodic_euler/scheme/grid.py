"""Scheme parameters and the staggered space-time grid."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from ..gas import DomainError, ProblemParams


def default_beta(alpha: float, gamma: float) -> float:
    """A value inside every constraint on the vacuum-proximity exponent."""
    return 0.9 * min(alpha - 0.5, 2.0 / (gamma + 5.0), (1.0 - alpha) / 2.0,
                     2.0 * alpha / (9.0 - 3.0 * gamma))


def default_delta(gamma: float) -> float:
    theta = (gamma - 1.0) / 2.0
    return 0.5 * (1.0 + 1.0 / (2.0 * theta))


@dataclass(frozen=True)
class SchemeParams:
    """Discretization parameters.

    Parameters
    ----------
    Nx : int
        Half the number of lattice intervals, ``dx = 1 / (2 Nx)``.
    alpha : float
        Fan step exponent: invariant steps of size ``dx**alpha``.
    beta : float
        Near-vacuum exponent: middle densities below
        ``density_scale * dx**beta`` use the near-vacuum construction.
    delta_exp : float
        Cutoff exponent: averages below ``density_scale * dx**delta_exp``
        become vacuum.
    density_scale : float
        Reference density for both thresholds above. The thresholds are
        densities, so they only make sense relative to the density level of
        the problem; ``1.0`` uses them as written.
    newton_tol : float
        Tolerance on invariants for the cell solves.
    """

    Nx: int
    alpha: float = 0.75
    beta: float | None = None
    delta_exp: float | None = None
    density_scale: float = 1.0
    newton_tol: float = 1e-12
    newton_maxiter: int = 30

    def resolved(self, params: ProblemParams) -> "SchemeParams":
        """Fill in default exponents and check every constraint."""
        beta = default_beta(self.alpha, params.gamma) if self.beta is None else self.beta
        delta = default_delta(params.gamma) if self.delta_exp is None else self.delta_exp
        sp = SchemeParams(self.Nx, self.alpha, beta, delta, self.density_scale,
                          self.newton_tol, self.newton_maxiter)
        sp.validate(params)
        return sp

    def validate(self, params: ProblemParams) -> None:
        a, b, d, g = self.alpha, self.beta, self.delta_exp, params.gamma
        if int(self.Nx) != self.Nx or self.Nx < 1:
            raise DomainError(f"Nx must be a positive integer, got {self.Nx}")
        if not 0.5 < a < 1.0:
            raise DomainError(f"alpha must lie in (1/2, 1), got {a}")
        if b is None or d is None:
            raise DomainError("beta and delta_exp must be resolved first")
        checks = [
            (0 < b < a, "0 < beta < alpha"),
            (0.5 + b / 2 < a < 1 - 2 * b, "1/2 + beta/2 < alpha < 1 - 2 beta"),
            (b < 2.0 / (g + 5.0), "beta < 2/(gamma + 5)"),
            ((9 - 3 * g) * b / 2 < a, "(9 - 3 gamma) beta / 2 < alpha"),
            (1 < d < 1.0 / (2.0 * params.theta), "1 < delta < 1/(2 theta)"),
            (self.density_scale > 0, "density_scale > 0"),
        ]
        for ok, name in checks:
            if not ok:
                raise DomainError(f"scheme exponent constraint violated: {name}")


def _exact(value: float) -> Fraction:
    # shortest decimal representation, so 2.5 + 0.2 is exactly 27/10
    return Fraction(repr(float(value)))


@dataclass(frozen=True)
class Grid:
    """Staggered grid with ``dx = 1/(2 Nx)``, ``dt = dx / q``, ``2 Nt dt = 1``."""

    Nx: int
    q: int
    dx_exact: Fraction
    dt_exact: Fraction

    @property
    def dx(self) -> float:
        return float(self.dx_exact)

    @property
    def dt(self) -> float:
        return float(self.dt_exact)

    @property
    def Nt(self) -> int:
        return self.q * self.Nx

    @property
    def nsteps(self) -> int:
        """Number of steps in one period, ``2 Nt``."""
        return 2 * self.Nt

    @property
    def size(self) -> int:
        """Number of lattice positions ``0..2Nx``."""
        return 2 * self.Nx + 1

    def J(self, n: int) -> range:
        """Indices ``j`` in ``0..2Nx`` with ``j + n`` odd."""
        return range(1 - n % 2, 2 * self.Nx + 1, 2)

    def x(self, j):
        return j * self.dx

    def t(self, n):
        return n * self.dt

    def cell_range(self, j: int) -> tuple:
        """Averaging interval of lattice index ``j`` (half cells at the ends)."""
        lo = max(j - 1, 0) * self.dx
        hi = min(j + 1, 2 * self.Nx) * self.dx
        return lo, hi


def build_grid(params: ProblemParams, sp: SchemeParams) -> Grid:
    """Grid with ``q = floor(2 (M + K)) + 1`` time steps per space step."""
    q = math.floor(2 * (_exact(params.M) + _exact(params.K))) + 1
    dx = Fraction(1, 2 * sp.Nx)
    grid = Grid(int(sp.Nx), int(q), dx, dx / q)
    assert 2 * grid.Nt * grid.dt_exact == 1
    return grid
