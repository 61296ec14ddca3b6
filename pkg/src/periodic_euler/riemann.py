"""Exact Riemann solver for the isentropic gas, vacuum included.

Wave curves are written in invariant coordinates. A 1-rarefaction keeps
``w`` fixed, a 2-rarefaction keeps ``z`` fixed, and shocks follow the
Hugoniot loci

    1-family:  v - v0 = -(rho - rho0) * sqrt(P(rho0, rho) / (rho rho0))
    2-family:  v - v0 = +(rho - rho0) * sqrt(P(rho0, rho) / (rho rho0))

with ``P`` the divided difference of the pressure. The middle state of a
Riemann problem is found on the scalar unknown ``s = rho_M**theta`` by a
bracketed root search (``scipy.optimize.brentq``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from scipy.optimize import brentq

from .gas import (DomainError, ProblemParams, State, pressure_slope, rho_of,
                  shock_s)

VACUUM_GAP = 1e-14


class SolverError(RuntimeError):
    """Raised when a root search fails to converge."""


class WaveKind(str, Enum):
    SHOCK1 = "Shock1"
    RAREFACTION1 = "Rarefaction1"
    SHOCK2 = "Shock2"
    RAREFACTION2 = "Rarefaction2"
    RAREFACTION_SHOCK1 = "RarefactionShock1"
    RAREFACTION_SHOCK2 = "RarefactionShock2"
    VACUUM = "VacuumFan"


@dataclass(frozen=True)
class Wave:
    kind: WaveKind
    lo: float
    hi: float


@dataclass(frozen=True)
class WaveFan:
    """Self-similar solution of a Riemann problem.

    ``zl, wl, zm, wm, zr, wr`` are the invariants of the three constant
    states. For a vacuum middle state ``zm == wm`` is not meaningful and
    ``middle`` is ``State(0, 0)``.
    """

    left: State
    middle: State
    right: State
    waves: tuple
    vacuum: bool
    zl: float
    wl: float
    zm: float
    wm: float
    zr: float
    wr: float
    theta: float

    @property
    def case(self) -> int:
        """Case number by wave types: 1 (R1+S2), 2 (S1+R2), 3 (R1+R2), 4 (S1+S2).

        Returns 0 for a constant fan.
        """
        kinds = {w.kind for w in self.waves}
        if self.vacuum:
            return 3
        one_r = WaveKind.RAREFACTION1 in kinds
        one_s = WaveKind.SHOCK1 in kinds
        two_r = WaveKind.RAREFACTION2 in kinds
        two_s = WaveKind.SHOCK2 in kinds
        if not (one_r or one_s or two_r or two_s):
            return 0
        one_rar = one_r or not one_s
        two_rar = two_r or not two_s
        if one_rar and two_rar:
            return 3
        if one_rar:
            return 1
        if two_rar:
            return 2
        return 4

    def one_is_rarefaction(self) -> bool:
        return self.vacuum or self.middle.rho <= self.left.rho

    def two_is_rarefaction(self) -> bool:
        return self.vacuum or self.middle.rho <= self.right.rho

    def describe(self) -> str:
        lines = [f"left   rho={self.left.rho!r} m={self.left.m!r}",
                 f"middle rho={self.middle.rho!r} m={self.middle.m!r}",
                 f"right  rho={self.right.rho!r} m={self.right.m!r}",
                 f"vacuum {self.vacuum}"]
        for wv in self.waves:
            lines.append(f"wave {wv.kind.value} speeds [{wv.lo!r}, {wv.hi!r}]")
        return "\n".join(lines)


def _zw(rho: float, m: float, theta: float):
    if rho < 0 or not (math.isfinite(rho) and math.isfinite(m)):
        raise DomainError(f"invalid state rho={rho}, m={m}")
    if rho == 0.0:
        return 0.0, 0.0
    v = m / rho
    c = rho ** theta / theta
    return v - c, v + c


def _state(z: float, w: float, theta: float) -> State:
    rho = rho_of(z, w, theta)
    return State(rho, rho * 0.5 * (z + w) if rho > 0 else 0.0)


def shock_mass_speed(rho: float, rho0: float, params: ProblemParams) -> float:
    """``S(rho, rho0)``, continuous through ``rho == rho0``."""
    if rho < 0 or rho0 < 0 or (rho == 0 and rho0 == 0):
        raise DomainError("S needs non-negative densities, not both zero")
    if rho0 == 0:
        raise DomainError("S is undefined for rho0 = 0 and rho != rho0")
    return shock_s(rho, rho0, params.gamma)


def wave_curve_velocity(family: int, kind: str, rho: float, u0: State,
                        params: ProblemParams) -> float:
    """Velocity on a wave curve through ``u0`` at density ``rho``.

    ``kind`` is ``"shock"``, ``"inverse-shock"`` or ``"rarefaction"``.
    Shock curves follow the Hugoniot locus, rarefaction curves keep the
    other family's invariant fixed. Domains are

    ============  ==========  ==============  ===========
    family        shock       inverse-shock   rarefaction
    ============  ==========  ==============  ===========
    1             rho > rho0  rho < rho0      rho < rho0
    2             rho < rho0  rho > rho0      rho > rho0
    ============  ==========  ==============  ===========

    ``rho == rho0`` is accepted everywhere and returns ``v0``.
    """
    rho0, m0 = float(u0.rho), float(u0.m)
    if rho0 <= 0:
        raise DomainError("wave curves need a non-vacuum base state")
    if rho < 0:
        raise DomainError("negative density")
    v0 = m0 / rho0
    if rho == rho0:
        return v0
    if family not in (1, 2):
        raise DomainError(f"family must be 1 or 2, got {family}")
    denser = rho > rho0
    domains = {(1, "shock"): denser, (1, "inverse-shock"): not denser,
               (1, "rarefaction"): not denser, (2, "shock"): not denser,
               (2, "inverse-shock"): denser, (2, "rarefaction"): denser}
    if (family, kind) not in domains:
        raise DomainError(f"unknown curve kind {kind!r}")
    if not domains[(family, kind)]:
        raise DomainError(f"rho={rho} outside the domain of the {family}-{kind} curve")
    th = params.theta
    if kind == "rarefaction":
        z0, w0 = _zw(rho0, m0, th)
        c = rho ** th / th
        return w0 - c if family == 1 else z0 + c
    if rho == 0:
        raise DomainError("Hugoniot curves do not reach vacuum")
    jump = (rho - rho0) * math.sqrt(pressure_slope(rho0, rho, params.gamma) / (rho * rho0))
    return v0 - jump if family == 1 else v0 + jump


def rh_residual(ul: State, ur: State, sigma: float, params: ProblemParams) -> float:
    """Scaled Rankine-Hugoniot defect ``|f(ur) - f(ul) - sigma (ur - ul)|``.

    The defect is divided by ``max(rho_l, rho_r)`` so that it is measured in
    velocity-like units independently of the density scale.
    """
    g = params.gamma

    def f(u):
        r, m = u
        if r <= 0:
            return 0.0, 0.0
        return m, m * m / r + r ** g / g

    fl, fr = f(ul), f(ur)
    d0 = fr[0] - fl[0] - sigma * (ur[0] - ul[0])
    d1 = fr[1] - fl[1] - sigma * (ur[1] - ul[1])
    scale = max(ul[0], ur[0], 1e-300)
    return max(abs(d0), abs(d1)) / scale


def _constant_fan(u: State, theta: float) -> WaveFan:
    z, w = _zw(u.rho, u.m, theta)
    return WaveFan(u, u, u, (), u.rho == 0, z, w, z, w, z, w, theta)


def solve_riemann(uL: State, uR: State, params: ProblemParams) -> WaveFan:
    """Solve the Riemann problem with left state ``uL`` and right state ``uR``."""
    th, g = params.theta, params.gamma
    rl, ml = float(uL[0]), float(uL[1])
    rr, mr = float(uR[0]), float(uR[1])
    zl, wl = _zw(rl, ml, th)
    zr, wr = _zw(rr, mr, th)
    uL, uR = State(rl, ml if rl > 0 else 0.0), State(rr, mr if rr > 0 else 0.0)
    vac = State(0.0, 0.0)
    inf = math.inf

    if rl == 0 and rr == 0:
        return _constant_fan(vac, th)
    if rl == rr and ml == mr:
        return _constant_fan(uL, th)
    if rl == 0:
        waves = (Wave(WaveKind.VACUUM, -inf, zr),
                 Wave(WaveKind.RAREFACTION2, zr, mr / rr + rr ** th))
        return WaveFan(uL, vac, uR, waves, True, zl, wl, zr, zr, zr, wr, th)
    if rr == 0:
        waves = (Wave(WaveKind.RAREFACTION1, ml / rl - rl ** th, wl),
                 Wave(WaveKind.VACUUM, wl, inf))
        return WaveFan(uL, vac, uR, waves, True, zl, wl, wl, wl, zr, wr, th)

    vl, vr = ml / rl, mr / rr
    if wl - zr <= VACUUM_GAP:
        waves = (Wave(WaveKind.RAREFACTION1, vl - rl ** th, wl),
                 Wave(WaveKind.VACUUM, wl, zr),
                 Wave(WaveKind.RAREFACTION2, zr, vr + rr ** th))
        return WaveFan(uL, vac, uR, waves, True, zl, wl, wl, zr, zr, wr, th)

    inv = 1.0 / th

    def v_left(s):
        rho = s ** inv
        if rho <= rl:
            return wl - s * inv
        return vl - (rho - rl) * math.sqrt(pressure_slope(rl, rho, g) / (rl * rho))

    def v_right(s):
        rho = s ** inv
        if rho <= rr:
            return zr + s * inv
        return vr + (rho - rr) * math.sqrt(pressure_slope(rr, rho, g) / (rr * rho))

    def gap(s):
        return v_left(s) - v_right(s)

    s_hi = max(rl, rr) ** th
    for _ in range(200):
        if gap(s_hi) <= 0:
            break
        s_hi *= 2.0
    else:
        raise SolverError(f"could not bracket the middle state for {uL}, {uR}")
    try:
        s = brentq(gap, 0.0, s_hi, xtol=1e-16, rtol=1e-15, maxiter=200)
    except (RuntimeError, ValueError) as exc:
        raise SolverError(f"middle-state search failed for {uL}, {uR}: {exc}") from exc

    rho_m = s ** inv
    one_rar = rho_m <= rl
    two_rar = rho_m <= rr
    if one_rar:
        wm = wl
        vm = wl - s * inv
        zm = vm - s * inv
        if two_rar:
            zm = zr
    elif two_rar:
        zm = zr
        vm = zr + s * inv
        wm = vm + s * inv
    else:
        vm = 0.5 * (v_left(s) + v_right(s))
        zm, wm = vm - s * inv, vm + s * inv
    if wm - zm <= VACUUM_GAP:
        waves = (Wave(WaveKind.RAREFACTION1, vl - rl ** th, wl),
                 Wave(WaveKind.VACUUM, wl, zr),
                 Wave(WaveKind.RAREFACTION2, zr, vr + rr ** th))
        return WaveFan(uL, vac, uR, waves, True, zl, wl, wl, zr, zr, wr, th)
    middle = _state(zm, wm, th)
    rho_m = middle.rho
    vm = 0.5 * (zm + wm)
    cm = rho_m ** th

    if one_rar:
        w1 = Wave(WaveKind.RAREFACTION1, vl - rl ** th, vm - cm)
    else:
        sig = vl - shock_s(rho_m, rl, g)
        w1 = Wave(WaveKind.SHOCK1, sig, sig)
    if two_rar:
        w2 = Wave(WaveKind.RAREFACTION2, vm + cm, vr + rr ** th)
    else:
        sig = vr + shock_s(rho_m, rr, g)
        w2 = Wave(WaveKind.SHOCK2, sig, sig)
    return WaveFan(uL, middle, uR, (w1, w2), False, zl, wl, zm, wm, zr, wr, th)


def sample_fan(fan: WaveFan, xi: float, params: ProblemParams | None = None) -> State:
    """Value of the self-similar solution at ``xi = (x - x0) / t``."""
    th = fan.theta
    if not fan.waves:
        return fan.left
    for idx, wv in enumerate(fan.waves):
        if xi < wv.lo:
            return fan.left if idx == 0 else _between(fan, idx)
        if xi <= wv.hi and wv.lo < wv.hi:
            if wv.kind is WaveKind.RAREFACTION1:
                w = fan.wl
                z = (2.0 * xi - w * (1.0 - th)) / (1.0 + th)
                return _state(min(max(z, fan.zl), w), w, th)
            if wv.kind is WaveKind.RAREFACTION2:
                z = fan.zr
                w = (2.0 * xi - z * (1.0 - th)) / (1.0 + th)
                return _state(z, min(max(w, z), fan.wr), th)
            return State(0.0, 0.0)
    return fan.right


def _between(fan: WaveFan, idx: int) -> State:
    # state just left of wave ``idx`` and right of wave ``idx - 1``
    prev = fan.waves[idx - 1].kind
    if prev is WaveKind.VACUUM or fan.waves[idx].kind is WaveKind.VACUUM:
        return State(0.0, 0.0)
    return fan.middle


def solve_riemann_boundary_left(ub: State, uplus: State, params: ProblemParams,
                                tol: float = 1e-12) -> WaveFan:
    """Riemann problem at the inflow boundary ``x = 0`` with data ``ub``.

    Both states must be supersonic (``lambda1 >= 0``) so that every wave moves
    into the domain.
    """
    for name, u in (("boundary", ub), ("interior", uplus)):
        if u[0] > 0 and u[1] / u[0] - u[0] ** params.theta < -tol:
            raise DomainError(f"{name} state is not supersonic: lambda1 < 0")
    return solve_riemann(ub, uplus, params)


def solve_riemann_boundary_right(uminus: State, params: ProblemParams,
                                 tol: float = 1e-12) -> WaveFan:
    """Outflow boundary at ``x = 1``: the solution is ``uminus`` itself."""
    th = params.theta
    if uminus[0] > 0:
        if uminus[1] / uminus[0] - uminus[0] ** th < -tol:
            raise DomainError("outflow state is not supersonic: lambda1 < 0")
    return _constant_fan(State(float(uminus[0]), float(uminus[1]) if uminus[0] > 0 else 0.0), th)
