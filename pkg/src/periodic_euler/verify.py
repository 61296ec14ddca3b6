"""Checks of region bounds, weak and entropy identities, periodicity and mass.

The lattice checks read a staggered history: level ``n`` holds values on
``J_n`` and is taken constant on ``[(j-1) dx, (j+1) dx] x [n dt, (n+1) dt)``
(half cells at the ends). Test functions are products of quartic bumps, so
the space-time integrals of their derivatives against a piecewise constant
field are exact; only the forcing term needs quadrature.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .gas import ProblemParams, mechanical_entropy

GAUSS3 = (np.array([-math.sqrt(0.6), 0.0, math.sqrt(0.6)]), np.array([5.0, 8.0, 5.0]) / 9.0)


@dataclass(frozen=True)
class RegionBounds:
    """``lower(x) = L - Kx``, ``upper(x) = M + Kx`` widened by ``margin``."""

    L: float
    M: float
    K: float
    margin: float = 0.0

    @classmethod
    def from_params(cls, params: ProblemParams, margin: float = 0.0) -> "RegionBounds":
        return cls(params.L, params.M, params.K, margin)

    def lower(self, x):
        return self.L - self.K * np.asarray(x) - self.margin

    def upper(self, x):
        return self.M + self.K * np.asarray(x) + self.margin


# -- test functions -------------------------------------------------------------

@dataclass(frozen=True)
class Bump:
    """Quartic bump ``(1 - s^2)^2`` for ``|s| < 1``, ``s = (y - c) / h``."""

    c: float
    h: float

    def __call__(self, y):
        s = (np.asarray(y, dtype=float) - self.c) / self.h
        return np.where(np.abs(s) < 1.0, (1.0 - s * s) ** 2, 0.0)

    def deriv(self, y):
        s = (np.asarray(y, dtype=float) - self.c) / self.h
        return np.where(np.abs(s) < 1.0, -4.0 * s * (1.0 - s * s) / self.h, 0.0)

    def primitive(self, y):
        """Antiderivative vanishing left of the support."""
        s = np.clip((np.asarray(y, dtype=float) - self.c) / self.h, -1.0, 1.0)
        return self.h * (s - 2.0 * s ** 3 / 3.0 + s ** 5 / 5.0 + 8.0 / 15.0)

    def integral(self, a, b):
        return self.primitive(b) - self.primitive(a)


@dataclass(frozen=True)
class TestFunction:
    """``phi(x, t) = X(x) T(t)`` with quartic bumps ``X`` and ``T``."""

    X: Bump
    T: Bump

    __test__ = False  # not a pytest class

    def __call__(self, x, t):
        return self.X(x) * self.T(t)

    def dx(self, x, t):
        return self.X.deriv(x) * self.T(t)

    def dt(self, x, t):
        return self.X(x) * self.T.deriv(t)

    def vanishes_at_outflow(self) -> bool:
        return self.X.c + self.X.h <= 1.0

    def interior(self) -> bool:
        """Support inside ``(0, 1) x (0, 1)``."""
        return (self.X.c - self.X.h >= 0.0 and self.X.c + self.X.h <= 1.0
                and self.T.c - self.T.h >= 0.0 and self.T.c + self.T.h <= 1.0)


def random_test_functions(n: int, seed: int = 0, interior: bool = True):
    """``n`` random bumps; ``interior`` keeps the support in the open square.

    Otherwise the space bump may reach ``x = 0`` and the time bump may cover
    ``t = 0`` or ``t = 1``, while ``phi(1, t) = 0`` is always kept.
    """
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        if interior:
            hx = rng.uniform(0.1, 0.45)
            cx = rng.uniform(hx, 1.0 - hx)
            ht = rng.uniform(0.1, 0.45)
            ct = rng.uniform(ht, 1.0 - ht)
        else:
            hx = rng.uniform(0.2, 0.6)
            cx = rng.uniform(0.0, 1.0 - hx)
            ht = rng.uniform(0.3, 1.0)
            ct = rng.uniform(0.0, 1.0)
        out.append(TestFunction(Bump(cx, hx), Bump(ct, ht)))
    return out


# -- lattice field ---------------------------------------------------------------

def _cells(sol):
    """Arrays over all space-time cells: ``x0, x1, t0, t1, rho, m`` and the level index."""
    grid = sol.grid
    dx, dt = grid.dx, grid.dt
    N2 = 2 * grid.Nx
    out = {k: [] for k in ("x0", "x1", "t0", "t1", "rho", "m", "n")}
    nlev = len(sol.rho) - 1
    for n in range(nlev):
        j = np.arange(1 - n % 2, N2 + 1, 2)
        out["x0"].append(np.maximum(j - 1, 0) * dx)
        out["x1"].append(np.minimum(j + 1, N2) * dx)
        out["t0"].append(np.full(len(j), n * dt))
        out["t1"].append(np.full(len(j), (n + 1) * dt))
        out["rho"].append(np.asarray(sol.rho[n])[j])
        out["m"].append(np.asarray(sol.m[n])[j])
        out["n"].append(np.full(len(j), n))
    return {k: np.concatenate(v) for k, v in out.items()}


def _level_cells(sol, n):
    grid = sol.grid
    N2 = 2 * grid.Nx
    j = np.arange(1 - n % 2, N2 + 1, 2)
    return (j, np.maximum(j - 1, 0) * grid.dx, np.minimum(j + 1, N2) * grid.dx,
            np.asarray(sol.rho[n])[j], np.asarray(sol.m[n])[j])


def _forcing_integral(forcing, phi: TestFunction, x0, x1, t0, t1):
    """``int int F phi`` over each cell by 3x3 Gauss."""
    nodes, wts = GAUSS3
    hx, mx = 0.5 * (x1 - x0), 0.5 * (x1 + x0)
    ht, mt = 0.5 * (t1 - t0), 0.5 * (t1 + t0)
    total = np.zeros_like(x0)
    for a, wa in zip(nodes, wts):
        x = mx + hx * a
        for b, wb in zip(nodes, wts):
            t = mt + ht * b
            total += wa * wb * forcing.evaluate(x, t) * phi(x, t)
    return total * hx * ht


def _flux2(rho, m, gamma):
    pos = rho > 0
    safe = np.where(pos, rho, 1.0)
    return np.where(pos, m * m / safe, 0.0) + rho ** gamma / gamma


def _outflow_values(sol, n):
    """Values on the cell touching ``x = 1`` at level ``n``."""
    N2 = 2 * sol.grid.Nx
    j = N2 if n % 2 == 1 else N2 - 1
    return float(sol.rho[n][j]), float(sol.m[n][j])


def weak_residual(sol, testfns, params: ProblemParams | None = None, forcing=None):
    """Residuals of the mass and momentum identities of a periodic weak solution.

    Uses the level-0 lattice as ``u0`` in the periodic pairing term. Returns
    ``(mass, momentum)``, each the largest magnitude over ``testfns``.
    """
    params = sol.params if params is None else params
    forcing = sol.forcing if forcing is None else forcing
    c = _cells(sol)
    rho, m = c["rho"], c["m"]
    f2 = _flux2(rho, m, params.gamma)
    rb, mb = float(sol.ub[0]), float(sol.ub[1])
    fb2 = mb * mb / rb + rb ** params.gamma / params.gamma
    _, a0, b0, r0, m0 = _level_cells(sol, 0)
    worst = [0.0, 0.0]
    for phi in testfns:
        X, T = phi.X, phi.T
        intX = X.integral(c["x0"], c["x1"])
        dT = T(c["t1"]) - T(c["t0"])
        intT = T.integral(c["t0"], c["t1"])
        dX = X(c["x1"]) - X(c["x0"])
        pair = X.integral(a0, b0) * (T(0.0) - T(1.0))
        bnd = float(X(0.0)) * float(T.integral(0.0, 1.0))
        mass = np.sum(rho * intX * dT + m * dX * intT) + np.sum(r0 * pair) + mb * bnd
        force = _forcing_integral(forcing, phi, c["x0"], c["x1"], c["t0"], c["t1"])
        mom = (np.sum(m * intX * dT + f2 * dX * intT + rho * force) + np.sum(m0 * pair)
               + fb2 * bnd)
        worst[0] = max(worst[0], abs(float(mass)))
        worst[1] = max(worst[1], abs(float(mom)))
    return tuple(worst)


def entropy_residual(sol, testfns, params: ProblemParams | None = None, forcing=None):
    """Smallest ``int int eta psi_t + q psi_x + m F psi`` over ``testfns``.

    Uses the mechanical energy pair; ``nabla eta . g = v rho F = m F``.
    """
    params = sol.params if params is None else params
    forcing = sol.forcing if forcing is None else forcing
    c = _cells(sol)
    eta, q = mechanical_entropy((c["rho"], c["m"]), params)
    worst = math.inf
    for psi in testfns:
        X, T = psi.X, psi.T
        val = (eta * X.integral(c["x0"], c["x1"]) * (T(c["t1"]) - T(c["t0"]))
               + q * (X(c["x1"]) - X(c["x0"])) * T.integral(c["t0"], c["t1"])
               + c["m"] * _forcing_integral(forcing, psi, c["x0"], c["x1"], c["t0"], c["t1"]))
        worst = min(worst, float(np.sum(val)))
    return worst


# -- region, periodicity and mass --------------------------------------------------

# invariants rebuilt from (rho, m) carry round-off; excesses below this count as inside
ROUNDOFF = 1e-12


@dataclass
class RegionReport:
    value: float
    location: tuple
    passed: bool
    vacuum_count: int

    def as_dict(self):
        return {"value": self.value, "location": list(self.location), "passed": self.passed,
                "vacuum_count": self.vacuum_count}


def check_region(solution, bounds: RegionBounds, tol: float = 0.0, params=None) -> RegionReport:
    """Largest bound violation of a lattice history, lattice state or cell.

    Vacuum entries lie inside the region and are counted separately. For a
    cell record the check runs over a grid of points at the end of its step.
    """
    worst, loc, nvac = 0.0, (None, None), 0
    if hasattr(solution, "integrate"):
        cell = solution
        t = cell.tn + cell.dt
        xs = np.linspace(cell.x_lo, cell.x_hi, 201)
        for x in xs:
            z, w, vac = cell.zw(float(x), t)
            if vac:
                nvac += 1
                continue
            v = max(float(bounds.lower(x)) - z, w - float(bounds.upper(x)))
            if v > worst and v > ROUNDOFF:
                worst, loc = v, (float(x), t)
        return RegionReport(worst, loc, worst <= tol, nvac)
    th = params.theta if params is not None else solution.params.theta
    if hasattr(solution, "rho") and isinstance(solution.rho, list):
        levels = [(n, solution.rho[n], solution.m[n]) for n in range(len(solution.rho))]
        dx = solution.grid.dx
    else:
        levels = [(solution.n, solution.rho, solution.m)]
        dx = 1.0 / (len(solution.rho) - 1)
    for n, rho, m in levels:
        j = np.arange(1 - n % 2, len(rho), 2)
        r, mm = np.asarray(rho)[j], np.asarray(m)[j]
        if not np.all(np.isfinite(r)) or not np.all(np.isfinite(mm)):
            return RegionReport(math.inf, (None, n), False, nvac)
        pos = r > 0
        nvac += int(np.count_nonzero(~pos))
        if not np.any(pos):
            continue
        jj, r, mm = j[pos], r[pos], mm[pos]
        v = mm / r
        cs = r ** th / th
        x = jj * dx
        exc = np.maximum(bounds.lower(x) - (v - cs), (v + cs) - bounds.upper(x))
        k = int(np.argmax(exc))
        if exc[k] > worst and exc[k] > ROUNDOFF:
            worst, loc = float(exc[k]), (float(x[k]), n)
    return RegionReport(worst, loc, worst <= tol, nvac)


def _shift_level(rho, m, j, dx, params, shift):
    th = params.theta
    pos = rho > 0
    safe = np.where(pos, rho, 1.0)
    v = m / safe
    cs = safe ** th / th
    x = j * dx
    z = np.maximum(v - cs + shift, params.L - params.K * x - shift)
    w = np.minimum(v + cs - shift, params.M + params.K * x + shift)
    r = np.where(pos & (w > z), (th * np.maximum(w - z, 0.0) / 2.0) ** (1.0 / th), 0.0)
    return r, r * 0.5 * (z + w)


def periodicity_residual(sol, shift: float | None = None) -> float:
    """L1 distance in ``(rho, m)`` between the first and last levels.

    ``shift`` (default: ``sol.shift`` when present, else 0) is applied to the
    invariants of the last level first, as the period map does.
    """
    shift = getattr(sol, "shift", 0.0) if shift is None else shift
    j, a, b, r0, m0 = _level_cells(sol, 0)
    nl = len(sol.rho) - 1
    if nl % 2:
        raise ValueError("first and last levels must have the same parity")
    r1 = np.asarray(sol.rho[nl])[j]
    m1 = np.asarray(sol.m[nl])[j]
    if shift:
        r1, m1 = _shift_level(r1, m1, j, sol.grid.dx, sol.params, shift)
    return float(np.sum((np.abs(r1 - r0) + np.abs(m1 - m0)) * (b - a)))


def mass_balance(sol) -> float:
    """``|mass(1) - mass(0) - int m_b dt + int m(1, t) dt|`` on the lattice."""
    grid = sol.grid
    _, a, b, r0, _ = _level_cells(sol, 0)
    nl = len(sol.rho) - 1
    _, a1, b1, r1, _ = _level_cells(sol, nl)
    out = sum(_outflow_values(sol, n)[1] for n in range(nl)) * grid.dt
    inflow = float(sol.ub[1]) * nl * grid.dt
    return abs(float(np.sum(r1 * (b1 - a1)) - np.sum(r0 * (b - a))) - inflow + out)


# -- report ------------------------------------------------------------------------

@dataclass
class Check:
    name: str
    value: float
    threshold: float
    passed: bool
    location: object = None

    def as_dict(self):
        return {"name": self.name, "value": _num(self.value), "threshold": _num(self.threshold),
                "passed": bool(self.passed), "location": self.location}


def _num(v):
    v = float(v)
    return v if math.isfinite(v) else str(v)


def verification_report(sol, n_tests: int = 20, seed: int = 0,
                        fixed_point_tol: float | None = None):
    """Run every check on a lattice history and return a list of :class:`Check`."""
    params, grid = sol.params, sol.grid
    dx = grid.dx
    tol = 3.0 * dx ** 0.9
    reg = check_region(sol, RegionBounds.from_params(params), tol)
    checks = [Check("region", reg.value, tol, reg.passed, list(reg.location))]
    ent = entropy_residual(sol, random_test_functions(n_tests, seed, interior=True))
    checks.append(Check("entropy", ent, -5.0 * dx, ent >= -5.0 * dx))
    wm, wmo = weak_residual(sol, random_test_functions(n_tests, seed + 1, interior=False))
    checks.append(Check("weak_mass", wm, math.inf, True))
    checks.append(Check("weak_momentum", wmo, math.inf, True))
    per = periodicity_residual(sol)
    ptol = 1e-5 if fixed_point_tol is None else 10.0 * fixed_point_tol
    checks.append(Check("periodicity", per, ptol, per <= ptol))
    mb = mass_balance(sol)
    checks.append(Check("mass_balance", mb, math.inf, True))
    return checks


def report_json(checks) -> str:
    return json.dumps([c.as_dict() for c in checks], indent=2, sort_keys=True)
