
import numpy as np
import pytest

from periodic_euler.forcing import ZERO_FORCING, single_mode
from periodic_euler.gas import (DomainError, ProblemParams, State, from_invariants,
                                to_invariants)
from periodic_euler.riemann import sample_fan, solve_riemann
from periodic_euler.scheme import (CellBuilder, SchemeParams, StepReport, advance, build_grid,
                                   cutoff, evolve, fractional_step, gauss_average,
                                   initial_lattice, rarefaction_fan, steady_profile)
from periodic_euler.scheme.solver import make_context
from periodic_euler.verify import RegionBounds, check_region

TRIVIAL = ProblemParams(5.0 / 3.0, 0.0, 1.0, 7.0)
UB_TRIVIAL = State(1.0, 4.0)  # z = 1, w = 7
SAMPLE = ProblemParams(1.4, 0.2, 1.3, 2.5)


def test_grid_example_one():
    g = build_grid(ProblemParams(1.4, 0.5, 2.0, 4.0), SchemeParams(10))
    assert (g.q, g.dx, g.dt, g.Nt) == (10, 1 / 20, 1 / 200, 100)


def test_grid_example_two():
    g = build_grid(ProblemParams(1.4, 0.0, 2.0, 2.0), SchemeParams(1))
    assert (g.q, g.dx, g.dt, g.Nt) == (5, 0.5, 0.1, 5)


@pytest.mark.parametrize("Nx", [1, 7, 25, 100])
def test_grid_period_exact(Nx):
    g = build_grid(SAMPLE, SchemeParams(Nx))
    assert 2 * g.Nt * g.dt_exact == 1
    assert g.nsteps * g.dt == pytest.approx(1.0, abs=1e-14)


def test_grid_parity():
    g = build_grid(SAMPLE, SchemeParams(3))
    assert list(g.J(0)) == [1, 3, 5]
    assert list(g.J(1)) == [0, 2, 4, 6]
    assert g.cell_range(0) == (0.0, g.dx)
    assert g.cell_range(6) == pytest.approx((5 * g.dx, 1.0))


def test_scheme_params_constraints():
    sp = SchemeParams(10).resolved(SAMPLE)
    assert 0 < sp.beta < sp.alpha
    assert 1 < sp.delta_exp < 1 / (2 * SAMPLE.theta)
    with pytest.raises(DomainError):
        SchemeParams(10, alpha=0.4).resolved(SAMPLE)
    with pytest.raises(DomainError):
        SchemeParams(10, beta=0.3).resolved(SAMPLE)


def test_average_constant():
    u = State(0.7, -0.2)
    assert gauss_average(lambda x: u, 0.1, 0.3) == u


def test_average_linear():
    avg = gauss_average(lambda x: State(1.0 + 2.0 * x, 3.0 - x), 0.0, 0.5)
    assert avg[0] == pytest.approx(1.5, abs=1e-14)
    assert avg[1] == pytest.approx(2.75, abs=1e-14)


def test_average_two_states():
    avg = gauss_average(lambda x: State(1.0, 0.5) if x < 0.25 else State(3.0, -1.0), 0.0, 1.0)
    assert avg[0] == pytest.approx(0.25 * 1.0 + 0.75 * 3.0, abs=1e-12)
    assert avg[1] == pytest.approx(0.25 * 0.5 - 0.75, abs=1e-12)


@pytest.fixture
def trivial_setup():
    sp = SchemeParams(10).resolved(TRIVIAL)
    return sp, build_grid(TRIVIAL, sp)


def test_cutoff_inside_unchanged(trivial_setup):
    sp, grid = trivial_setup
    u = State(0.5, 2.0)  # z = 1.62, w = 6.38
    assert cutoff(u, 3, grid, TRIVIAL, sp) == u


def test_cutoff_vacuum_threshold(trivial_setup):
    sp, grid = trivial_setup
    thr = grid.dx ** sp.delta_exp
    assert cutoff(State(thr / 2, 0.0), 3, grid, TRIVIAL, sp) == State(0.0, 0.0)


def test_cutoff_clamps_z():
    params = SAMPLE
    sp = SchemeParams(10, density_scale=1e-5).resolved(params)
    grid = build_grid(params, sp)
    j = 4
    lo = params.L - params.K * j * grid.dx
    s = 0.05
    rho = (params.theta * (2.4 - (lo - s)) / 2) ** (1 / params.theta)
    u = State(rho, rho * 0.5 * (lo - s + 2.4))
    z, w = to_invariants(cutoff(u, j, grid, params, sp), params)
    assert z == pytest.approx(lo, abs=1e-12)
    assert w == pytest.approx(2.4, abs=1e-12)


def test_rarefaction_fan_degenerate():
    states, speeds = rarefaction_fan(1.0, 3.0, 1.0, 0.01, 0.75, 0.2, 1.4)
    assert len(states) == 2 and states[0] == states[1]


def test_rarefaction_fan_count():
    h = 0.01 ** 0.75
    zL = 1.0
    states, speeds = rarefaction_fan(zL, 3.0, zL + 10 * h, 0.01, 0.75, 0.2, 1.4)
    assert len(states) == 11
    assert len(speeds) == 10
    assert all(a < b for a, b in zip(speeds, speeds[1:]))
    assert all(w == 3.0 for _, w in states)


def test_rarefaction_fan_bad_order():
    with pytest.raises(ValueError):
        rarefaction_fan(1.0, 3.0, 0.5, 0.01, 0.75, 0.2, 1.4)


def test_steady_profile_zero_K():
    prof = steady_profile(0.2, State(1.0, 4.0), TRIVIAL)
    for x in (0.0, 0.5, 1.0):
        assert prof(x) == pytest.approx(State(1.0, 4.0), abs=1e-14)


def test_steady_profile_slopes():
    ud = State(2.48832e-05, 4.727808e-05)
    prof = steady_profile(0.0, ud, SAMPLE)
    z, w = to_invariants(prof(0.5), SAMPLE)
    assert z == pytest.approx(1.3 - 0.1, abs=1e-9)
    assert w == pytest.approx(2.5 + 0.1, abs=1e-9)


def test_fractional_step_no_time(trivial_setup):
    _, grid = trivial_setup
    prof = steady_profile(0.0, State(2.48832e-05, 4.727808e-05), SAMPLE)
    g = build_grid(SAMPLE, SchemeParams(10))
    u, clipped = fractional_step(prof, 0.3, 2 * g.dt, 2, single_mode(0.2), SAMPLE, g)
    assert not clipped
    assert u == pytest.approx(prof(0.3), rel=1e-12)


def test_fractional_step_unforced(trivial_setup):
    _, grid = trivial_setup
    prof = steady_profile(0.0, UB_TRIVIAL, TRIVIAL)
    for t in (0.0, 0.3 * grid.dt, grid.dt):
        u, clipped = fractional_step(prof, 0.4, t, 0, ZERO_FORCING, TRIVIAL, grid)
        assert u == pytest.approx(UB_TRIVIAL, abs=1e-14) and not clipped


def test_fractional_step_moves_invariants():
    g = build_grid(SAMPLE, SchemeParams(10))
    ub = State(2.48832e-05, 4.727808e-05)
    prof = steady_profile(0.0, ub, SAMPLE)
    F = single_mode(0.2)
    t = 0.25
    n = int(t / g.dt)
    tau = 0.5 * g.dt
    u, _ = fractional_step(prof, 0.0, n * g.dt + tau, n, F, SAMPLE, g)
    z, w = to_invariants(u, SAMPLE)
    s = 0.5 * SAMPLE.theta * (2.5 - 1.3)
    f = F(0.0, n * g.dt + tau)
    assert z == pytest.approx(1.3 + (f + 0.2 * (1.9 - s)) * tau, abs=1e-10)
    assert w == pytest.approx(2.5 + (f - 0.2 * (1.9 + s)) * tau, abs=1e-10)


def _builder(params, Nx=50, forcing=ZERO_FORCING, n=0, scale=1.0):
    sp = SchemeParams(Nx, density_scale=scale).resolved(params)
    grid = build_grid(params, sp)
    return CellBuilder(make_context(n, grid, params, sp, forcing), params), grid


def test_cell_constant():
    b, grid = _builder(TRIVIAL)
    dx = grid.dx
    cell = b.build(UB_TRIVIAL, 0.0, UB_TRIVIAL, 2 * dx, dx, 0.0, 2 * dx)
    for x in np.linspace(0.0, 2 * dx, 9):
        assert cell.sample(x, grid.dt) == pytest.approx(UB_TRIVIAL, abs=1e-14)


def test_cell_rh_on_shock():
    # two shocks in a forced cell: each ray satisfies the jump conditions at mid-step
    params = SAMPLE
    b, grid = _builder(params, forcing=single_mode(0.2), scale=1e-5)
    dx = grid.dx
    uL = State(8e-5, 8e-5 * 2.1)
    uR = State(8e-5, 8e-5 * 1.9)
    cell = b.build(uL, 0.0, uR, 2 * dx, dx, 0.0, 2 * dx)
    assert cell.info["residual"] < 1e-10
    assert any(cell.rh)


def test_near_vacuum_case4_is_riemann_solution():
    params = SAMPLE
    b, grid = _builder(params, scale=1.0)
    dx = grid.dx
    uL = State(1e-9, 1e-9 * 2.0)
    uR = State(1e-9, 1e-9 * 1.8)
    fan = solve_riemann(uL, uR, params)
    assert fan.case == 4 and fan.middle.rho <= b.ctx.thr_beta
    cell = b.build(uL, 0.0, uR, 2 * dx, dx, 0.0, 2 * dx)
    assert cell.info["near_vacuum"] == "case4"
    t = grid.dt
    for x in np.linspace(0.0, 2 * dx, 11):
        expected = sample_fan(fan, (x - dx) / t)
        assert cell.sample(x, t) == pytest.approx(expected, rel=1e-12, abs=1e-300)


def test_near_vacuum_cell_in_region():
    params = SAMPLE
    b, grid = _builder(params, scale=1e-5)
    dx = grid.dx
    # two rarefactions towards a middle density of order 1e-12
    uL = from_invariants((1.3, 1.5), params)
    uR = from_invariants((1.45, 2.5 + 0.2 * 2 * dx), params)
    cell = b.build(uL, 0.0, uR, 2 * dx, dx, 0.0, 2 * dx)
    assert cell.info["near_vacuum"] == "case3"
    rep = check_region(cell, RegionBounds.from_params(params), 3 * dx ** 0.9)
    assert rep.passed


def test_initial_lattice_parity(trivial_setup):
    sp, grid = trivial_setup
    rho, m = initial_lattice(lambda x: UB_TRIVIAL, grid, TRIVIAL, sp)
    assert np.all(np.isnan(rho[0::2]))
    assert np.all(rho[1::2] == 1.0) and np.all(m[1::2] == 4.0)


def test_advance_constant(trivial_setup):
    sp, grid = trivial_setup
    rho, m = initial_lattice(lambda x: UB_TRIVIAL, grid, TRIVIAL, sp)
    r1, m1, rep, _ = advance(rho, m, 0, grid, TRIVIAL, sp, ZERO_FORCING, UB_TRIVIAL)
    assert np.all(r1[0::2] == 1.0) and np.all(m1[0::2] == 4.0)
    assert np.all(np.isnan(r1[1::2]))
    assert rep.violation == 0.0 and rep.crossings == 0


def test_step_report_violation():
    rep = StepReport(0, low=-0.1, high=0.05, avg_low=0.0, avg_high=-1.0)
    assert rep.violation == pytest.approx(0.1)
    assert rep.avg_violation == 0.0


def test_evolve_trivial_snapshots():
    sol = evolve(lambda x: UB_TRIVIAL, TRIVIAL, SchemeParams(5), ZERO_FORCING, UB_TRIVIAL,
                 snapshot_times=(0.0, 0.5, 1.0))
    for ts, states in sol.snapshots.items():
        for u in states:
            assert tuple(u) == tuple(UB_TRIVIAL)


def test_evolve_rejects_subsonic_boundary():
    with pytest.raises(DomainError):
        evolve(lambda x: State(1.0, 0.0), TRIVIAL, SchemeParams(5), ZERO_FORCING, State(1.0, 0.0))


def test_evolve_counts_steps():
    sol = evolve(lambda x: UB_TRIVIAL, TRIVIAL, SchemeParams(4), ZERO_FORCING, UB_TRIVIAL,
                 steps=3)
    assert len(sol.rho) == 4 and len(sol.reports) == 3
    j, rho, _ = sol.level(3)
    assert list(j) == [0, 2, 4, 6, 8] and np.all(rho == 1.0)
