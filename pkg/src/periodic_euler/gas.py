"""Isentropic gas: pressure law, Riemann invariants, speeds and entropy.

The pressure is ``p(rho) = rho**gamma / gamma`` and ``theta = (gamma - 1) / 2``.
States are stored in conservative form ``(rho, m)`` with ``m = rho * v``; the
Riemann invariants are

    z = v - rho**theta / theta,    w = v + rho**theta / theta.

Vacuum (``rho == 0``) has no well defined velocity. By convention its
invariants are ``z = w = 0`` and its momentum is zero.

All public functions accept floats or numpy arrays inside the ``State`` and
``Invariants`` containers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np


class DomainError(ValueError):
    """Raised when an input violates the admissible state space."""


@dataclass(frozen=True)
class ProblemParams:
    """Physical parameters of the forced, boundary driven problem.

    Parameters
    ----------
    gamma : float
        Adiabatic exponent, ``1 < gamma <= 5/3``.
    K : float
        Bound on ``|F|``; also the slope of the invariant-region bounds.
    L, M : float
        Lower bound for ``z`` and upper bound for ``w`` at ``x = 0``.
        Must satisfy ``M >= L >= 1 + K``.
    eps : float
        Strictness margin, ``L >= 1 + K + eps``.
    C : float, optional
        Bound on ``|m| / rho`` used as a sanity check on inputs. Defaults to
        ``max(|L|, |M|) + M``.
    """

    gamma: float
    K: float
    L: float
    M: float
    eps: float = 0.0
    C: float | None = None
    theta: float = field(init=False)

    def __post_init__(self):
        g = float(self.gamma)
        if not (1.0 < g <= 5.0 / 3.0 + 1e-15):
            raise DomainError(f"gamma must lie in (1, 5/3], got {g}")
        if self.K < 0:
            raise DomainError(f"K must be non-negative, got {self.K}")
        if self.eps < 0:
            raise DomainError(f"eps must be non-negative, got {self.eps}")
        if not (self.M >= self.L >= 1.0 + self.K + self.eps):
            raise DomainError(
                f"need M >= L >= 1 + K + eps, got L={self.L}, M={self.M}, "
                f"K={self.K}, eps={self.eps}")
        if self.C is None:
            object.__setattr__(self, "C", max(abs(self.L), abs(self.M)) + self.M)
        object.__setattr__(self, "theta", (g - 1.0) / 2.0)

    def check_state(self, u: "State") -> None:
        """Raise if ``u`` breaks ``rho >= 0`` or ``|m| <= C rho``."""
        rho = np.asarray(u[0], dtype=float)
        m = np.asarray(u[1], dtype=float)
        if np.any(rho < 0):
            raise DomainError("negative density")
        if np.any(np.abs(m) > self.C * rho * (1 + 1e-12)):
            raise DomainError(f"|m| exceeds C*rho with C={self.C}")

    def lower(self, x):
        """Lower bound ``L - K x`` for ``z``."""
        return self.L - self.K * x

    def upper(self, x):
        """Upper bound ``M + K x`` for ``w``."""
        return self.M + self.K * x

    def max_density(self) -> float:
        """Largest density inside the region over ``0 <= x <= 1``."""
        width = self.M - self.L + 2.0 * self.K
        return (self.theta * width / 2.0) ** (1.0 / self.theta)


class State(NamedTuple):
    """Conservative state: density and momentum."""

    rho: float
    m: float

    @property
    def v(self):
        rho = np.asarray(self.rho, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(rho > 0, np.asarray(self.m) / np.where(rho > 0, rho, 1.0), 0.0)
        return out if out.ndim else float(out)


class Invariants(NamedTuple):
    """Riemann invariants ``(z, w)``."""

    z: float
    w: float


class EntropyPair(NamedTuple):
    eta: float
    q: float


def _scalarize(x):
    x = np.asarray(x, dtype=float)
    return x if x.ndim else float(x)


def pressure(rho, params: ProblemParams):
    """Return ``rho**gamma / gamma``."""
    rho = np.asarray(rho, dtype=float)
    if np.any(rho < 0):
        raise DomainError("negative density")
    return _scalarize(rho ** params.gamma / params.gamma)


def sound_speed(rho, params: ProblemParams):
    """Return ``c = rho**theta``."""
    rho = np.asarray(rho, dtype=float)
    if np.any(rho < 0):
        raise DomainError("negative density")
    return _scalarize(rho ** params.theta)


def to_invariants(u: State, params: ProblemParams) -> Invariants:
    """Map ``(rho, m)`` to ``(z, w)``; vacuum maps to ``(0, 0)``."""
    rho = np.asarray(u[0], dtype=float)
    m = np.asarray(u[1], dtype=float)
    if np.any(rho < 0) or not np.all(np.isfinite(rho)) or not np.all(np.isfinite(m)):
        raise DomainError("density must be finite and non-negative")
    pos = rho > 0
    safe = np.where(pos, rho, 1.0)
    v = np.where(pos, m / safe, 0.0)
    c = np.where(pos, safe ** params.theta / params.theta, 0.0)
    return Invariants(_scalarize(v - c), _scalarize(v + c))


def from_invariants(iv: Invariants, params: ProblemParams) -> State:
    """Inverse of :func:`to_invariants`; ``w == z`` is vacuum."""
    z = np.asarray(iv[0], dtype=float)
    w = np.asarray(iv[1], dtype=float)
    if np.any(w < z):
        raise DomainError("w < z is not an admissible state")
    th = params.theta
    rho = (th * (w - z) / 2.0) ** (1.0 / th)
    m = np.where(rho > 0, rho * (w + z) / 2.0, 0.0)
    return State(_scalarize(rho), _scalarize(m))


def char_speeds(u: State, params: ProblemParams):
    """Return ``(lambda1, lambda2) = (v - c, v + c)``."""
    rho = np.asarray(u[0], dtype=float)
    if np.any(rho < 0):
        raise DomainError("negative density")
    v = np.asarray(State(rho, u[1]).v)
    c = rho ** params.theta
    return _scalarize(v - c), _scalarize(v + c)


def flux(u: State, params: ProblemParams) -> State:
    """Physical flux ``(m, m**2/rho + p)``; zero at vacuum."""
    rho = np.asarray(u[0], dtype=float)
    m = np.asarray(u[1], dtype=float)
    pos = rho > 0
    safe = np.where(pos, rho, 1.0)
    f2 = np.where(pos, m * m / safe, 0.0) + rho ** params.gamma / params.gamma
    return State(_scalarize(np.where(pos, m, 0.0)), _scalarize(f2))


def mechanical_entropy(u: State, params: ProblemParams) -> EntropyPair:
    """Return the mechanical energy ``eta*`` and its flux ``q*``."""
    g = params.gamma
    rho = np.asarray(u[0], dtype=float)
    m = np.asarray(u[1], dtype=float)
    if np.any(rho < 0):
        raise DomainError("negative density")
    pos = rho > 0
    safe = np.where(pos, rho, 1.0)
    kin = np.where(pos, m * m / (2.0 * safe), 0.0)
    eta = kin + rho ** g / (g * (g - 1.0))
    q = np.where(pos, m * (m * m / (2.0 * safe * safe) + safe ** (g - 1.0) / (g - 1.0)), 0.0)
    return EntropyPair(_scalarize(eta), _scalarize(q))


# Scalar helpers in invariant coordinates. These are the hot path of the
# cell construction, so they use ``math`` on plain floats.

def rho_of(z: float, w: float, theta: float) -> float:
    d = w - z
    if d <= 0.0:
        return 0.0
    return (theta * d / 2.0) ** (1.0 / theta)


def pressure_slope(ra: float, rb: float, gamma: float) -> float:
    """Divided difference ``(p(rb) - p(ra)) / (rb - ra)``, stable as rb -> ra."""
    if ra <= 0.0 and rb <= 0.0:
        return 0.0
    if ra <= 0.0 or rb <= 0.0:
        r = max(ra, rb)
        return r ** (gamma - 1.0) / gamma
    r = rb / ra - 1.0
    if abs(r) < 1e-7:
        return ra ** (gamma - 1.0) * (1.0 + 0.5 * (gamma - 1.0) * r
                                      + (gamma - 1.0) * (gamma - 2.0) / 6.0 * r * r)
    return ra ** (gamma - 1.0) * math.expm1(gamma * math.log1p(r)) / (gamma * r)


def shock_s(rho: float, rho0: float, gamma: float) -> float:
    """``S(rho, rho0) = sqrt(rho (p - p0) / (rho0 (rho - rho0)))``."""
    return math.sqrt(rho * pressure_slope(rho0, rho, gamma) / rho0)
