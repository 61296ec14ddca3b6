"""Discrete recurrence of the scheme, the one-period map and its fixed point.

The recurrence is a staggered Lax-Friedrichs step with source corrections
``R`` (density) and ``S`` (momentum). Two versions of the corrections are
available:

``"printed"``
    :func:`R_source` and :func:`S_source` as stated.
``"derived"``
    The corrections obtained by integrating the forced steady profiles and
    the fractional step over a cell, see :func:`source_parts`.

The one-period map works in invariant coordinates: it runs ``2 Nt`` steps,
shifts ``z`` up and ``w`` down by ``delta(dx)`` and clamps the result to the
enlarged region ``L - Kx - delta <= z``, ``w <= M + Kx + delta``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .forcing import Forcing
from .gas import DomainError, ProblemParams, State
from .scheme.grid import Grid, SchemeParams

SOURCE_FORMS = ("printed", "derived")


# -- source corrections ---------------------------------------------------------

def _vacuum_floor(grid: Grid, sp: SchemeParams | None) -> float:
    if sp is None:
        return 0.0
    return sp.density_scale * grid.dx ** sp.delta_exp


def R_source(x, t, u, forcing: Forcing, params: ProblemParams, grid: Grid,
             sp: SchemeParams | None = None):
    """Density correction, printed form.

    Zero where ``rho`` is below the cutoff density (or zero when ``sp`` is
    omitted).
    """
    rho = np.asarray(u[0], dtype=float)
    m = np.asarray(u[1], dtype=float)
    K, th = params.K, params.theta
    dx, dt = grid.dx, grid.dt
    F = forcing.evaluate(x, t)
    ok = rho > _vacuum_floor(grid, sp)
    r = np.where(ok, rho, 1.0)
    val = (-dx / 4.0 * K * r ** (1.0 - th)
           + dt * dt / (4.0 * dx) * (F * r - K * r ** (th + 1.0) + K * m / r ** (th + 1.0)))
    out = np.where(ok, val, 0.0)
    return out if out.ndim else float(out)


def S_source(x, t, u, forcing: Forcing, params: ProblemParams, grid: Grid,
             sp: SchemeParams | None = None):
    """Momentum correction, printed form; zero below the cutoff density."""
    rho = np.asarray(u[0], dtype=float)
    m = np.asarray(u[1], dtype=float)
    K, th = params.K, params.theta
    dx, dt = grid.dx, grid.dt
    F = forcing.evaluate(x, t)
    ok = rho > _vacuum_floor(grid, sp)
    r = np.where(ok, rho, 1.0)
    val = (-dt * F * m - dx / 4.0 * K * m / r ** th
           + dt * dt / (4.0 * dx) * (2.0 * F * m - K * r ** th * m + K * m ** 3 / r ** (th + 2.0)))
    out = np.where(ok, val, 0.0)
    return out if out.ndim else float(out)


def source_parts(x, t, rho, m, forcing: Forcing, params: ProblemParams, grid: Grid,
                 sp: SchemeParams | None, form: str = "derived"):
    """Split the corrections as ``R = C - dx/4 A - dt^2/(4 dx) B`` (same for ``S``).

    ``A`` is the slope of the steady profile, ``B`` the rate of change of the
    flux under the fractional step, ``C`` a pointwise term. Each is returned
    as a pair ``(density, momentum)`` of arrays.
    """
    if form not in SOURCE_FORMS:
        raise ValueError(f"source form must be one of {SOURCE_FORMS}, got {form!r}")
    K, th = params.K, params.theta
    F = forcing.evaluate(x, t)
    ok = rho > _vacuum_floor(grid, sp)
    r = np.where(ok, rho, 1.0)
    mm = np.where(ok, m, 0.0)
    rt = r ** th
    A = (np.where(ok, K * r / rt, 0.0), K * mm / rt)
    zero = np.zeros_like(r)
    if form == "derived":
        # m_t and the flux rate along the fractional step
        mt = F * r - K * r * rt - K * mm * mm / (r * rt)
        B = (np.where(ok, mt, 0.0),
             np.where(ok, 2.0 * F * mm - 3.0 * K * rt * mm - K * mm ** 3 / (r * r * rt), 0.0))
        C = (zero, zero)
    else:
        B = (np.where(ok, -(F * r - K * r * rt + K * mm / (r * rt)), 0.0),
             np.where(ok, -(2.0 * F * mm - K * rt * mm + K * mm ** 3 / (r * r * rt)), 0.0))
        C = (zero, np.where(ok, -grid.dt * F * mm, 0.0))
    return A, B, C


def _corr(parts, k, dx, dt):
    A, B, C = parts
    return C[k] - dx / 4.0 * A[k] - dt * dt / (4.0 * dx) * B[k]


# -- lattice --------------------------------------------------------------------

@dataclass
class LatticeState:
    """Lattice values at level ``n``; entries off ``J_n`` are NaN."""

    n: int
    rho: np.ndarray
    m: np.ndarray

    def copy(self) -> "LatticeState":
        return LatticeState(self.n, self.rho.copy(), self.m.copy())

    def indices(self) -> np.ndarray:
        return np.arange(1 - self.n % 2, len(self.rho), 2)

    def invariants(self, params: ProblemParams):
        """``(j, z, w)`` on ``J_n``; vacuum entries get ``z = w = 0``."""
        j = self.indices()
        r, m = self.rho[j], self.m[j]
        pos = r > 0
        safe = np.where(pos, r, 1.0)
        v = np.where(pos, m / safe, 0.0)
        c = np.where(pos, safe ** params.theta / params.theta, 0.0)
        return j, v - c, v + c


def lattice_from_invariants(n, size, j, z, w, params: ProblemParams) -> LatticeState:
    rho = np.full(size, np.nan)
    m = np.full(size, np.nan)
    th = params.theta
    d = np.maximum(np.asarray(w) - np.asarray(z), 0.0)
    r = (th * d / 2.0) ** (1.0 / th)
    rho[j] = r
    m[j] = np.where(r > 0, r * 0.5 * (np.asarray(z) + np.asarray(w)), 0.0)
    return LatticeState(n, rho, m)


def _flux(r, m, gamma):
    pos = r > 0
    safe = np.where(pos, r, 1.0)
    return np.where(pos, m, 0.0), np.where(pos, m * m / safe, 0.0) + r ** gamma / gamma


def _profile_shift(r, m, d, params):
    """State of the steady profile at distance ``d`` from its anchor."""
    th = params.theta
    pos = r > 0
    safe = np.where(pos, r, 1.0)
    v = m / safe
    c = safe ** th / th + params.K * d
    rn = np.where(pos, (th * np.maximum(c, 0.0)) ** (1.0 / th), 0.0)
    return rn, rn * v


@dataclass
class StepStats:
    clipped: int = 0


def lf_step(prev: LatticeState, forcing: Forcing, params: ProblemParams, grid: Grid,
            ub: State, sp: SchemeParams | None = None, source_form: str = "derived",
            periodic: bool = False, stats: StepStats | None = None) -> LatticeState:
    """One step of the recurrence from level ``n`` to ``n + 1``.

    Boundary rows are half-cell versions of the same cell balance: the inflow
    flux at ``x = 0`` is that of ``ub``, and the outflow half cell at
    ``x = 1`` carries the steady profile of its neighbour. With
    ``periodic=True`` the lattice wraps with period ``2 Nx`` instead.
    Negative densities are set to vacuum and counted in ``stats``.
    """
    n = prev.n
    N2 = 2 * grid.Nx
    dx, dt = grid.dx, grid.dt
    lam = dt / dx
    g = params.gamma
    tn = n * dt
    rho, m = prev.rho, prev.m
    out_r = np.full(N2 + 1, np.nan)
    out_m = np.full(N2 + 1, np.nan)
    jn = np.arange(n % 2, N2 + 1, 2)  # J_{n+1}
    if periodic:
        jl = (jn - 1) % N2
        jr = (jn + 1) % N2
        inner = jn
    else:
        inner = jn[(jn >= 1) & (jn <= N2 - 1)]
        jl, jr = inner - 1, inner + 1

    xs = np.arange(N2 + 1) * dx
    src = np.arange(1 - n % 2, N2 + 1, 2)  # J_n
    parts = source_parts(xs[src], tn, rho[src], m[src], forcing, params, grid, sp, source_form)
    Rv = np.full(N2 + 1, np.nan)
    Sv = np.full(N2 + 1, np.nan)
    Rv[src] = _corr(parts, 0, dx, dt)
    Sv[src] = _corr(parts, 1, dx, dt)
    f1, f2 = np.full(N2 + 1, np.nan), np.full(N2 + 1, np.nan)
    f1[src], f2[src] = _flux(rho[src], m[src], g)
    Fx = np.full(N2 + 1, np.nan)
    Fx[src] = forcing.evaluate(xs[src], tn)

    out_r[inner] = (0.5 * (rho[jr] + rho[jl]) - 0.5 * lam * (f1[jr] - f1[jl])
                    + Rv[jr] - Rv[jl])
    out_m[inner] = (0.5 * (m[jr] + m[jl]) - 0.5 * lam * (f2[jr] - f2[jl])
                    + Sv[jr] - Sv[jl] + 0.5 * dt * (Fx[jr] * rho[jr] + Fx[jl] * rho[jl]))

    if not periodic:
        ubr = np.array([float(ub[0])])
        ubm = np.array([float(ub[1])])
        A, B, C = source_parts(np.array([0.0]), tn, ubr, ubm, forcing, params, grid, sp,
                               source_form)
        fb1, fb2 = _flux(ubr, ubm, g)
        Bb = (B[0][0], B[1][0])
        Cb = (C[0][0], C[1][0])
        if n % 2 == 0:
            # inflow half cell [0, dx] holding the profile of u_1
            r1, m1 = rho[1], m[1]
            pa = source_parts(np.array([dx]), tn, np.array([r1]), np.array([m1]), forcing,
                              params, grid, sp, source_form)
            q = dt * dt / (2.0 * dx)
            out_r[0] = (r1 - 0.5 * dx * pa[0][0][0] - lam * (f1[1] - fb1[0])
                        - q * (pa[1][0][0] - Bb[0]) + 2.0 * (pa[2][0][0] - Cb[0]))
            out_m[0] = (m1 - 0.5 * dx * pa[0][1][0] - lam * (f2[1] - fb2[0])
                        - q * (pa[1][1][0] - Bb[1]) + 2.0 * (pa[2][1][0] - Cb[1])
                        + dt * Fx[1] * r1)
            # outflow half cell [1 - dx, 1] holding the profile of u_{2Nx-1}
            k = N2 - 1
            rk, mk = np.array([rho[k]]), np.array([m[k]])
            re, me = _profile_shift(rk, mk, dx, params)
            fe1, fe2 = _flux(re, me, g)
            pk = source_parts(np.array([xs[k]]), tn, rk, mk, forcing, params, grid, sp,
                              source_form)
            pe = source_parts(np.array([1.0]), tn, re, me, forcing, params, grid, sp,
                              source_form)
            out_r[N2] = (rk[0] + 0.5 * dx * pk[0][0][0] - lam * (fe1[0] - f1[k])
                         - q * (pe[1][0][0] - pk[1][0][0]) + 2.0 * (pe[2][0][0] - pk[2][0][0]))
            out_m[N2] = (mk[0] + 0.5 * dx * pk[0][1][0] - lam * (fe2[0] - f2[k])
                         - q * (pe[1][1][0] - pk[1][1][0]) + 2.0 * (pe[2][1][0] - pk[2][1][0])
                         + dt * Fx[k] * rk[0])
        else:
            # j = 1: profile content of u_0 and u_2, inflow flux of ub at x = 0
            r0, m0 = rho[0], m[0]
            A0 = source_parts(np.array([0.0]), tn, np.array([r0]), np.array([m0]), forcing,
                              params, grid, sp, source_form)[0]
            q = dt * dt / (4.0 * dx)
            pr = -dx / 4.0
            out_r[1] = (0.5 * (rho[2] + r0) - 0.5 * lam * (f1[2] - fb1[0])
                        + Rv[2] - (pr * A0[0][0] - q * Bb[0] + Cb[0]))
            out_m[1] = (0.5 * (m[2] + m0) - 0.5 * lam * (f2[2] - fb2[0])
                        + Sv[2] - (pr * A0[1][0] - q * Bb[1] + Cb[1])
                        + 0.5 * dt * (Fx[2] * rho[2] + Fx[0] * r0))
    else:
        out_r[N2] = out_r[0] if n % 2 == 0 else np.nan
        out_m[N2] = out_m[0] if n % 2 == 0 else np.nan

    bad = out_r[jn] < 0
    if np.any(bad):
        if stats is not None:
            stats.clipped += int(bad.sum())
        out_r[jn[bad]] = 0.0
        out_m[jn[bad]] = 0.0
    return LatticeState(n + 1, out_r, out_m)


# -- one-period map and fixed point -------------------------------------------

@dataclass(frozen=True)
class FixedPointConfig:
    """Settings of the fixed-point search.

    ``delta_dx=None`` uses ``dx**delta_power``. ``shift=False`` drops the
    ``+-delta`` shift of the invariants after each period (the margin still
    enlarges the clamp region).
    """

    delta_dx: float | None = None
    delta_power: float = 0.9
    shift: bool = True
    relaxation: float = 0.5
    max_iters: int = 5000
    residual_tol: float = 1e-6
    source_form: str = "derived"

    def __post_init__(self):
        if not 0.0 < self.relaxation <= 1.0:
            raise DomainError(f"relaxation must lie in (0, 1], got {self.relaxation}")
        if self.max_iters < 1:
            raise DomainError("max_iters must be positive")
        if self.residual_tol <= 0:
            raise DomainError("residual_tol must be positive")
        if self.delta_dx is not None and self.delta_dx < 0:
            raise DomainError("delta_dx must be non-negative")
        if self.source_form not in SOURCE_FORMS:
            raise DomainError(f"source_form must be one of {SOURCE_FORMS}")

    def delta(self, grid: Grid) -> float:
        return grid.dx ** self.delta_power if self.delta_dx is None else float(self.delta_dx)


@dataclass
class MapReport:
    clipped: int = 0
    clamped: int = 0
    max_excess: float = 0.0


def _clamp_region(j, z, w, x, params, delta, report: MapReport):
    lo = params.L - params.K * x - delta
    hi = params.M + params.K * x + delta
    excess = np.maximum(np.maximum(lo - z, w - hi), 0.0)
    report.max_excess = max(report.max_excess, float(excess.max(initial=0.0)))
    zc = np.maximum(z, lo)
    wc = np.minimum(w, hi)
    report.clamped += int(np.count_nonzero((zc != z) | (wc != w)))
    vac = wc <= zc
    zc = np.where(vac, 0.0, zc)
    wc = np.where(vac, 0.0, wc)
    return zc, wc


def run_period(u0: LatticeState, forcing, params, grid, ub, sp=None, source_form="derived",
               keep=False, stats: StepStats | None = None):
    """Apply ``lf_step`` ``2 Nt`` times; returns the final level (and all levels if ``keep``)."""
    if u0.n % 2 != 0:
        raise DomainError("the period map starts from an even level")
    u = u0
    levels = [u0] if keep else None
    for _ in range(grid.nsteps):
        u = lf_step(u, forcing, params, grid, ub, sp, source_form, stats=stats)
        if keep:
            levels.append(u)
    return (u, levels) if keep else u


def period_map(u0: LatticeState, forcing: Forcing, params: ProblemParams, grid: Grid,
               cfg: FixedPointConfig, ub: State, sp: SchemeParams | None = None,
               report: MapReport | None = None) -> LatticeState:
    """One period of the recurrence followed by the invariant shift and clamp."""
    report = MapReport() if report is None else report
    stats = StepStats()
    u = run_period(u0, forcing, params, grid, ub, sp, cfg.source_form, stats=stats)
    report.clipped += stats.clipped
    j, z, w = u.invariants(params)
    delta = cfg.delta(grid)
    vac = u.rho[j] <= 0
    if cfg.shift:
        z = z + delta
        w = w - delta
    zc, wc = _clamp_region(j, np.where(vac, 0.0, z), np.where(vac, 0.0, w), j * grid.dx,
                           params, delta, MapReport() if np.all(vac) else report)
    zc = np.where(vac, 0.0, zc)
    wc = np.where(vac, 0.0, wc)
    return lattice_from_invariants(0, grid.size, j, zc, wc, params)


def steady_lattice(ub: State, params: ProblemParams, grid: Grid) -> LatticeState:
    """Steady-profile extension of ``ub`` from ``x = 0`` sampled on ``J_0``."""
    th = params.theta
    rb, mb = float(ub[0]), float(ub[1])
    if rb <= 0:
        raise DomainError("boundary density must be positive")
    v = mb / rb
    c = rb ** th / th
    j = np.arange(1, grid.size, 2)
    x = j * grid.dx
    return lattice_from_invariants(0, grid.size, j, v - c - params.K * x, v + c + params.K * x,
                                   params)


def _relax_coords(u: LatticeState, params: ProblemParams, grid: Grid):
    """Invariants for relaxation; vacuum entries sit at the region midpoint with ``z = w``."""
    j, z, w = u.invariants(params)
    vac = u.rho[j] <= 0
    mid = 0.5 * (params.L + params.M)
    return j, np.where(vac, mid, z), np.where(vac, mid, w)


def sup_residual(a: LatticeState, b: LatticeState, params: ProblemParams) -> float:
    """``max |z_a - z_b|, |w_a - w_b|`` over the lattice."""
    _, za, wa = a.invariants(params)
    _, zb, wb = b.invariants(params)
    return float(max(np.max(np.abs(za - zb), initial=0.0), np.max(np.abs(wa - wb), initial=0.0)))


@dataclass
class FixedPointResult:
    lattice: LatticeState
    converged: bool
    iterations: int
    residual: float
    history: list = field(default_factory=list)
    certificate: float = math.nan
    delta: float = 0.0

    def summary(self) -> dict:
        last = self.history[-1] if self.history else {}
        return {"converged": self.converged, "iterations": self.iterations,
                "final_residual": self.residual, "certificate": self.certificate,
                "delta": self.delta, "clamp_count": last.get("clamp_count", 0),
                "clip_count": last.get("clip_count", 0)}


def find_fixed_point(forcing: Forcing, params: ProblemParams, grid: Grid, cfg: FixedPointConfig,
                     ub: State, sp: SchemeParams | None = None,
                     initial: LatticeState | None = None, progress=None) -> FixedPointResult:
    """Relaxed iteration ``u <- (1 - lam) u + lam * period_map(u)`` in invariants.

    The residual of an iterate is ``sup |period_map(u) - u|``. The best
    iterate is returned; when converged, its residual is recomputed from a
    fresh evaluation of the map (the certificate).
    """
    u = steady_lattice(ub, params, grid) if initial is None else initial.copy()
    lam = cfg.relaxation
    best, best_res = u, math.inf
    history = []
    converged = False
    it = 0
    for it in range(1, cfg.max_iters + 1):
        rep = MapReport()
        fu = period_map(u, forcing, params, grid, cfg, ub, sp, rep)
        res = sup_residual(fu, u, params)
        history.append({"iter": it, "residual": res, "clamp_count": rep.clamped,
                        "clip_count": rep.clipped})
        if progress is not None:
            progress(it, res)
        if res < best_res:
            best, best_res = u, res
        if not math.isfinite(res):
            break
        if res < cfg.residual_tol:
            converged = True
            break
        j, z0, w0 = _relax_coords(u, params, grid)
        _, z1, w1 = _relax_coords(fu, params, grid)
        u = lattice_from_invariants(0, grid.size, j, (1 - lam) * z0 + lam * z1,
                                    (1 - lam) * w0 + lam * w1, params)
    cert = math.nan
    if converged:
        cert = sup_residual(period_map(best, forcing, params, grid, cfg, ub, sp), best, params)
    return FixedPointResult(best, converged, it, best_res, history, cert, cfg.delta(grid))


def with_source_form(cfg: FixedPointConfig, form: str) -> FixedPointConfig:
    return replace(cfg, source_form=form)


@dataclass
class Trajectory:
    """All levels of one period of the recurrence.

    Has the same ``rho``, ``m``, ``grid``, ``params``, ``forcing`` and ``ub``
    attributes as :class:`~periodic_euler.scheme.GridSolution`, so the checks
    in :mod:`periodic_euler.verify` accept either. ``shift`` is the invariant
    shift applied by the period map after the last level.
    """

    params: ProblemParams
    grid: Grid
    forcing: Forcing
    ub: State
    rho: list
    m: list
    shift: float = 0.0
    clipped: int = 0


def trajectory(u0: LatticeState, forcing: Forcing, params: ProblemParams, grid: Grid, ub: State,
               sp: SchemeParams | None = None, cfg: FixedPointConfig | None = None) -> Trajectory:
    """Run one period of the recurrence from ``u0`` and keep every level."""
    cfg = FixedPointConfig() if cfg is None else cfg
    stats = StepStats()
    _, levels = run_period(u0, forcing, params, grid, ub, sp, cfg.source_form, keep=True,
                           stats=stats)
    shift = cfg.delta(grid) if cfg.shift else 0.0
    return Trajectory(params, grid, forcing, State(float(ub[0]), float(ub[1])),
                      [lv.rho for lv in levels], [lv.m for lv in levels], shift, stats.clipped)
