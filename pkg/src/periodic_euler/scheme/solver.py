"""Time stepping on the staggered grid: averaging, cutoff and one period.

Lattice levels are stored as full-length arrays over ``j = 0..2Nx``; only
the entries with ``j + n`` odd are meaningful at level ``n`` and the rest hold
NaN.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..forcing import Forcing
from ..gas import DomainError, ProblemParams, State, rho_of
from .cell import GAUSS5, CellBuilder, CellSolution, StepContext
from .grid import Grid, SchemeParams, build_grid


def steady_profile(xd: float, ud: State, params: ProblemParams):
    """Return ``x -> State`` for the steady profile with data ``ud`` at ``xd``.

    ``z`` decreases and ``w`` increases at rate ``K``; where the profile
    would give ``w < z`` the state is vacuum.
    """
    th, K = params.theta, params.K
    rho, m = float(ud[0]), float(ud[1])
    if rho < 0:
        raise DomainError("negative density")
    if rho == 0:
        zd = wd = 0.0
    else:
        v = m / rho
        c = rho ** th / th
        zd, wd = v - c, v + c

    def profile(x):
        z = zd - K * (x - xd)
        w = wd + K * (x - xd)
        r = rho_of(z, w, th)
        return State(r, r * 0.5 * (z + w) if r > 0 else 0.0)

    profile.anchor = (xd, zd, wd)
    return profile


def fractional_step(profile, x: float, t: float, n: int, forcing: Forcing,
                    params: ProblemParams, grid: Grid):
    """Forced state at ``(x, t)`` built on the steady profile ``profile``.

    Returns ``(State, clipped)`` where ``clipped`` flags a crossing into
    vacuum (``w < z``) that was clipped.
    """
    ctx = StepContext(params.K, params.theta, params.gamma, forcing, n * grid.dt,
                      grid.dt, grid.dx, params.L, params.M, 0.0, 0.0)
    from .cell import profile_zw

    z, w = profile_zw(*profile.anchor, x, t, ctx)
    if w <= z:
        return State(0.0, 0.0), w < z
    r = rho_of(z, w, params.theta)
    return State(r, r * 0.5 * (z + w)), False


def cutoff(avg: State, j: int, grid: Grid, params: ProblemParams, sp: SchemeParams) -> State:
    """Vacuum below ``density_scale * dx**delta``; otherwise clamp to the region."""
    rho, m = float(avg[0]), float(avg[1])
    if rho < sp.density_scale * grid.dx ** sp.delta_exp:
        return State(0.0, 0.0)
    th = params.theta
    x = j * grid.dx
    v = m / rho
    c = rho ** th / th
    z = max(v - c, params.L - params.K * x)
    w = min(v + c, params.M + params.K * x)
    if w <= z:
        return State(0.0, 0.0)
    if z == v - c and w == v + c:
        return State(rho, m)
    r = rho_of(z, w, th)
    return State(r, r * 0.5 * (z + w))


def gauss_average(func, a: float, b: float, pieces: int = 4) -> State:
    """Average of ``x -> State`` over ``[a, b]`` by composite 5-point Gauss."""
    h = (b - a) / pieces
    ref = func(0.5 * (a + b))
    mass = mom = 0.0
    for k in range(pieces):
        mid = a + (k + 0.5) * h
        for node, wgt in GAUSS5:
            u = func(mid + 0.5 * h * node)
            mass += wgt * 0.5 * h * (u[0] - ref[0])
            mom += wgt * 0.5 * h * (u[1] - ref[1])
    # deviations from the midpoint value keep constant data exact
    return State(ref[0] + mass / (b - a), ref[1] + mom / (b - a))


@dataclass
class StepReport:
    """Per-step diagnostics."""

    n: int
    low: float = math.inf
    high: float = -math.inf
    avg_low: float = math.inf
    avg_high: float = -math.inf
    crossings: int = 0
    near_vacuum: int = 0
    cutoff_vacuum: int = 0
    residual: float = 0.0

    @property
    def violation(self) -> float:
        """Largest pointwise bound violation at the end of the step."""
        return max(0.0, -self.low, self.high)

    @property
    def avg_violation(self) -> float:
        return max(0.0, -self.avg_low, self.avg_high)


@dataclass
class GridSolution:
    """Lattice over one period plus optional per-cell records."""

    params: ProblemParams
    sp: SchemeParams
    grid: Grid
    forcing: Forcing
    ub: State
    rho: list = field(default_factory=list)
    m: list = field(default_factory=list)
    cells: list = field(default_factory=list)
    reports: list = field(default_factory=list)
    snapshots: dict = field(default_factory=dict)

    @property
    def violation(self) -> float:
        return max((r.violation for r in self.reports), default=0.0)

    @property
    def crossings(self) -> int:
        return sum(r.crossings for r in self.reports)

    def level(self, n: int):
        """``(j, rho, m)`` arrays on ``J_n``."""
        j = np.array(self.grid.J(n))
        return j, self.rho[n][j], self.m[n][j]

    def record(self, x: float, t: float) -> CellSolution:
        grid = self.grid
        if not (0.0 <= x <= 1.0 and 0.0 <= t <= 1.0):
            raise DomainError(f"({x}, {t}) outside [0, 1]^2")
        if not self.cells:
            raise ValueError("cell records were not kept; rerun with keep_cells=True")
        n = min(int(math.floor(t / grid.dt)), grid.nsteps - 1)
        return _find_record(self.cells[n], x, grid, n)

    def sample(self, x: float, t: float) -> State:
        """Value of the approximate solution at ``(x, t)``."""
        return self.record(x, t).sample(x, t)


def _find_record(step_cells, x, grid, n):
    k = x / grid.dx
    if n % 2 == 0:
        j = 2 * int(math.floor((k + 1) / 2))
    else:
        j = 2 * int(math.floor(k / 2)) + 1
    j = min(max(j, 0), 2 * grid.Nx - (n % 2 == 1))
    recs = step_cells[j]
    for rec in recs:
        if rec.x_lo <= x < rec.x_hi:
            return rec
    return recs[-1]


def make_context(n, grid, params, sp, forcing) -> StepContext:
    return StepContext(
        K=params.K, theta=params.theta, gamma=params.gamma, forcing=forcing,
        tn=n * grid.dt, dt=grid.dt, dx=grid.dx, L=params.L, M=params.M,
        thr_beta=sp.density_scale * grid.dx ** sp.beta, fan_step=grid.dx ** sp.alpha,
        tol=sp.newton_tol, maxiter=sp.newton_maxiter)


def build_step_cells(rho, m, n, grid, params, sp, forcing, ub):
    """Cell records for every ``j`` in ``J_{n+1}`` from level-``n`` data."""
    ctx = make_context(n, grid, params, sp, forcing)
    builder = CellBuilder(ctx, params)
    dx = grid.dx
    N2 = 2 * grid.Nx
    cells = {}
    u = lambda j: State(rho[j], m[j])  # noqa: E731
    if n % 2 == 0:
        cells[0] = [builder.build(ub, 0.0, u(1), dx, 0.0, 0.0, dx, 0, n)]
        for j in range(2, N2 - 1, 2):
            cells[j] = [builder.build(u(j - 1), (j - 1) * dx, u(j + 1), (j + 1) * dx,
                                      j * dx, (j - 1) * dx, (j + 1) * dx, j, n)]
        cells[N2] = [builder.outflow(u(N2 - 1), (N2 - 1) * dx, 1.0, 1.0 - dx, 1.0)]
    else:
        cells[1] = [builder.build(ub, 0.0, u(0), 0.0, 0.0, 0.0, dx, 1, n),
                    builder.build(u(0), 0.0, u(2), 2 * dx, dx, dx, 2 * dx, 1, n)]
        for j in range(3, N2, 2):
            cells[j] = [builder.build(u(j - 1), (j - 1) * dx, u(j + 1), (j + 1) * dx,
                                      j * dx, (j - 1) * dx, (j + 1) * dx, j, n)]
    return cells


def average_cells(cells, n, grid, params, sp, report: StepReport):
    """Cell averages at ``(n+1) dt - 0`` followed by the cutoff."""
    t_end = (n + 1) * grid.dt
    size = grid.size
    rho = np.full(size, np.nan)
    m = np.full(size, np.nan)
    th = params.theta
    for j, recs in cells.items():
        a, b = grid.cell_range(j)
        ref = recs[0].sample(0.5 * (a + b), t_end)
        mass = mom = 0.0
        for rec in recs:
            lo, hi = max(a, rec.x_lo), min(b, rec.x_hi)
            ms, mo, low, high, crossed = rec.integrate(lo, hi, t_end, ref)
            mass += ms
            mom += mo
            report.low = min(report.low, low)
            report.high = max(report.high, high)
            report.crossings += int(crossed)
            report.near_vacuum += int(rec.info.get("near_vacuum") is not None)
            report.residual = max(report.residual, rec.info.get("residual", 0.0))
        avg = State(ref[0] + mass / (b - a), ref[1] + mom / (b - a))
        if avg.rho > 0:
            x = j * grid.dx
            v = avg.m / avg.rho
            c = avg.rho ** th / th
            report.avg_low = min(report.avg_low, v - c - (params.L - params.K * x))
            report.avg_high = max(report.avg_high, v + c - (params.M + params.K * x))
        out = cutoff(avg, j, grid, params, sp)
        if out.rho == 0 and avg.rho > 0:
            report.cutoff_vacuum += 1
        rho[j], m[j] = out
    return rho, m


def advance(rho, m, n, grid, params, sp, forcing, ub, keep_cells=False):
    """One step from level ``n`` to ``n + 1``.

    Returns ``(rho, m, report, cells)``; ``cells`` is ``None`` unless
    ``keep_cells`` is set.
    """
    rho_l = [float(v) for v in rho]
    m_l = [float(v) for v in m]
    cells = build_step_cells(rho_l, m_l, n, grid, params, sp, forcing, ub)
    report = StepReport(n)
    new_rho, new_m = average_cells(cells, n, grid, params, sp, report)
    return new_rho, new_m, report, (cells if keep_cells else None)


def initial_lattice(u0, grid: Grid, params: ProblemParams, sp: SchemeParams):
    """Cell averages of ``u0`` on ``J_0`` followed by the cutoff."""
    rho = np.full(grid.size, np.nan)
    m = np.full(grid.size, np.nan)
    for j in grid.J(0):
        a, b = grid.cell_range(j)
        rho[j], m[j] = cutoff(gauss_average(u0, a, b), j, grid, params, sp)
    return rho, m


def check_boundary_data(ub: State, params: ProblemParams) -> None:
    """Boundary data must lie in the region at ``x = 0`` (hence supersonic)."""
    rho, m = ub
    if rho <= 0:
        raise DomainError("boundary density must be positive")
    th = params.theta
    v = m / rho
    c = rho ** th / th
    if v - c < params.L - 1e-12 or v + c > params.M + 1e-12:
        raise DomainError("boundary data violate L <= z(u_b), w(u_b) <= M")


def evolve(u0, params: ProblemParams, sp: SchemeParams, forcing: Forcing, ub: State,
           keep_cells: bool = False, snapshot_times=(), snapshot_x=None,
           steps: int | None = None, progress=None) -> GridSolution:
    """Run the scheme over one period (or ``steps`` steps).

    ``u0`` is either a callable ``x -> State`` (averaged onto the lattice) or a
    pair of full-length arrays ``(rho, m)`` at level 0.
    """
    sp = sp.resolved(params) if sp.beta is None or sp.delta_exp is None else sp
    sp.validate(params)
    check_boundary_data(ub, params)
    grid = build_grid(params, sp)
    if callable(u0):
        rho, m = initial_lattice(u0, grid, params, sp)
    else:
        rho, m = (np.array(u0[0], dtype=float), np.array(u0[1], dtype=float))
    sol = GridSolution(params, sp, grid, forcing, State(float(ub[0]), float(ub[1])))
    sol.rho.append(rho)
    sol.m.append(m)
    nsteps = grid.nsteps if steps is None else steps
    if snapshot_x is None:
        snap_x = np.linspace(0.0, 1.0, 2 * grid.Nx + 1)
    else:
        snap_x = np.asarray(snapshot_x)
    wanted = {}
    for ts in snapshot_times:
        if not 0.0 <= ts <= 1.0:
            raise DomainError(f"snapshot time {ts} outside [0, 1]")
        wanted.setdefault(min(int(math.floor(ts / grid.dt)), grid.nsteps - 1), []).append(float(ts))
    for n in range(nsteps):
        rho, m, rep, cells = advance(rho, m, n, grid, params, sp, forcing, sol.ub, True)
        if n in wanted:
            for ts in wanted[n]:
                sol.snapshots[ts] = [_find_record(cells, x, grid, n).sample(x, ts) for x in snap_x]
        if keep_cells:
            sol.cells.append(cells)
        sol.rho.append(rho)
        sol.m.append(m)
        sol.reports.append(rep)
        if progress is not None:
            progress(n, rep)
    sol.snapshot_x = snap_x
    return sol
