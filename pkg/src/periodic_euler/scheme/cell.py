"""Approximate Riemann solutions inside one staggered cell.

A cell is centred at ``xc`` and spans one time step ``[tn, tn + dt)``. Its
solution is a list of pieces separated by rays ``x = xc + s (t - tn)``:

* ``("p", xd, zd, wd)``: the steady profile with data ``(zd, wd)`` at ``xd``,
  advanced by the fractional step of the source term;
* ``("r", fan)``: a raw Riemann solution centred at ``(xc, tn)``.

Away from vacuum the exact Riemann solution of the two neighbours is replaced
by rarefaction fans of profiles plus a middle profile, with the
Rankine-Hugoniot conditions imposed at the middle time ``tn + dt/2`` between
the forced states on both sides of every ray. Near vacuum the raw Riemann
solution is used in the region around the middle state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..gas import State, pressure_slope, rho_of, shock_s
from ..riemann import WaveFan, WaveKind, sample_fan, solve_riemann

GAUSS5 = (
    (-0.9061798459386640, 0.2369268850561891),
    (-0.5384693101056831, 0.4786286704993665),
    (0.0, 0.5688888888888889),
    (0.5384693101056831, 0.4786286704993665),
    (0.9061798459386640, 0.2369268850561891),
)


class SchemeError(RuntimeError):
    """A cell could not be built; carries the cell coordinates."""


class _NearVacuum(Exception):
    pass


@dataclass
class StepContext:
    """Quantities shared by all cells of one time step."""

    K: float
    theta: float
    gamma: float
    forcing: object
    tn: float
    dt: float
    dx: float
    L: float
    M: float
    thr_beta: float
    fan_step: float
    tol: float = 1e-12
    maxiter: int = 30

    @property
    def tm(self) -> float:
        return self.tn + 0.5 * self.dt


def profile_zw(xd, zd, wd, x, t, ctx):
    """Invariants of the forced steady profile at ``(x, t)``."""
    K = ctx.K
    d = x - xd
    zb = zd - K * d
    wb = wd + K * d
    tau = t - ctx.tn
    if tau == 0.0:
        return zb, wb
    s = 0.5 * ctx.theta * (wb - zb)
    if s < 0.0:
        s = 0.0
    v = 0.5 * (zb + wb)
    f = ctx.forcing(x, t)
    return zb + (f + K * (v - s)) * tau, wb + (f - K * (v + s)) * tau


def _locus(za, wa, zb, wb, sigma, family, th, g):
    """Residuals of a ``family`` discontinuity from ``a`` (left) to ``b``.

    The Hugoniot relation and the speed are written in velocity units, which
    keeps the system well conditioned when the jump is small.
    """
    ra = rho_of(za, wa, th)
    rb = rho_of(zb, wb, th)
    if ra <= 0.0 or rb <= 0.0:
        raise _NearVacuum
    va = 0.5 * (za + wa)
    vb = 0.5 * (zb + wb)
    q = math.sqrt(pressure_slope(ra, rb, g) / (ra * rb))
    if family == 1:
        return vb - va + (rb - ra) * q, sigma - (va - rb * q)
    return vb - va - (rb - ra) * q, sigma - (va + rb * q)


def _lin_solve(J, r):
    """Solve a small dense system by Gaussian elimination with pivoting."""
    n = len(r)
    A = [row[:] + [r[i]] for i, row in enumerate(J)]
    for k in range(n):
        piv = max(range(k, n), key=lambda i: abs(A[i][k]))
        if A[piv][k] == 0.0:
            raise ZeroDivisionError("singular Jacobian")
        A[k], A[piv] = A[piv], A[k]
        for i in range(k + 1, n):
            f = A[i][k] / A[k][k]
            if f:
                for c in range(k, n + 1):
                    A[i][c] -= f * A[k][c]
    x = [0.0] * n
    for i in range(n - 1, -1, -1):
        s = A[i][n] - sum(A[i][c] * x[c] for c in range(i + 1, n))
        x[i] = s / A[i][i]
    return x


def _newton(fun, x0, tol, maxiter):
    """Damped Newton with a forward-difference Jacobian.

    Returns ``(x, residual_norm)``; raises ``RuntimeError`` on failure.
    """
    x = list(x0)
    n = len(x)
    r = fun(x)
    norm = max(abs(v) for v in r)
    for _ in range(maxiter):
        if norm < 1e-15:
            return x, norm
        J = [[0.0] * n for _ in range(n)]
        for k in range(n):
            h = 1e-8 * max(1.0, abs(x[k]))
            xp = x[:]
            xp[k] += h
            rp = fun(xp)
            for i in range(n):
                J[i][k] = (rp[i] - r[i]) / h
        step = _lin_solve(J, [-v for v in r])
        lam = 1.0
        for _ in range(30):
            xn = [x[i] + lam * step[i] for i in range(n)]
            try:
                rn = fun(xn)
                nn = max(abs(v) for v in rn)
            except _NearVacuum:
                nn = math.inf
            if nn < norm or nn < 1e-15:
                break
            lam *= 0.5
        else:
            raise RuntimeError(f"line search failed, residual {norm:.3e}")
        x, r, norm = xn, rn, nn
        if max(abs(lam * s) for s in step) < tol and norm < 1e3 * tol:
            return x, norm
    if norm < 1e3 * tol:
        return x, norm
    raise RuntimeError(f"no convergence after {maxiter} iterations, residual {norm:.3e}")


class CellSolution:
    """Piecewise description of ``u`` in one cell.

    Attributes
    ----------
    xc, tn, dt : float
        Centre and time slab of the cell.
    x_lo, x_hi : float
        Spatial extent over which this record is used.
    speeds : list of float
        Ray speeds separating consecutive ``pieces``.
    rh : list of bool
        Whether the Rankine-Hugoniot conditions are imposed (at the middle
        time) on the corresponding ray.
    info : dict
        Construction details: ``case``, ``near_vacuum`` label, fan states and
        speeds, the middle patch, solver residuals.
    """

    __slots__ = ("xc", "tn", "dt", "x_lo", "x_hi", "speeds", "pieces", "rh", "info", "ctx")

    def __init__(self, xc, ctx, x_lo, x_hi, speeds, pieces, rh, info):
        self.xc = xc
        self.tn = ctx.tn
        self.dt = ctx.dt
        self.x_lo = x_lo
        self.x_hi = x_hi
        self.speeds = speeds
        self.pieces = pieces
        self.rh = rh
        self.info = info
        self.ctx = ctx

    def piece_index(self, x, t):
        tau = t - self.tn
        k = 0
        for s in self.speeds:
            if x < self.xc + s * tau or (tau == 0.0 and x == self.xc and s > 0):
                break
            k += 1
        return k

    def piece_zw(self, k, x, t):
        """Return ``(z, w, vacuum)`` of piece ``k`` at ``(x, t)``."""
        pc = self.pieces[k]
        if pc[0] == "p":
            z, w = profile_zw(pc[1], pc[2], pc[3], x, t, self.ctx)
            return z, w, w <= z
        fan = pc[1]
        tau = t - self.tn
        dxc = x - self.xc
        xi = dxc / tau if tau > 0 else (math.inf if dxc >= 0 else -math.inf)
        u = sample_fan(fan, xi)
        if u[0] <= 0.0:
            return 0.0, 0.0, True
        v = u[1] / u[0]
        c = u[0] ** self.ctx.theta / self.ctx.theta
        return v - c, v + c, False

    def zw(self, x, t):
        return self.piece_zw(self.piece_index(x, t), x, t)

    def sample(self, x, t) -> State:
        z, w, vac = self.zw(x, t)
        if vac:
            return State(0.0, 0.0)
        rho = rho_of(z, w, self.ctx.theta)
        return State(rho, rho * 0.5 * (z + w))

    def breakpoints(self, t):
        """Piece boundaries at time ``t`` clipped to the cell extent."""
        tau = t - self.tn
        return [min(max(self.xc + s * tau, self.x_lo), self.x_hi) for s in self.speeds]

    def integrate(self, a, b, t, ref=(0.0, 0.0)):
        """Integrate ``rho - ref[0]`` and ``m - ref[1]`` over ``[a, b]`` at time ``t``.

        Integrating deviations from a nearby ``ref`` keeps constant data exact.
        Also returns the smallest ``z - (L - K x)``, the largest
        ``w - (M + K x)`` over the quadrature nodes, and whether a forced
        profile crossed into vacuum there.
        """
        r0, m0 = ref
        ctx = self.ctx
        th = ctx.theta
        inv = 1.0 / th
        K = ctx.K
        cuts = [a] + [min(max(p, a), b) for p in self.breakpoints(t)] + [b]
        mass = mom = 0.0
        low = math.inf
        high = -math.inf
        crossed = False
        tau = t - self.tn
        for k, pc in enumerate(self.pieces):
            lo, hi = cuts[k], cuts[k + 1]
            if hi <= lo:
                continue
            if pc[0] == "r":
                sub = [lo]
                for wv in pc[1].waves:
                    for s in (wv.lo, wv.hi):
                        if math.isfinite(s):
                            xs = self.xc + s * tau
                            if lo < xs < hi:
                                sub.append(xs)
                sub.append(hi)
                sub.sort()
            else:
                sub = (lo, hi)
            for i in range(len(sub) - 1):
                sa, sb = sub[i], sub[i + 1]
                if sb <= sa:
                    continue
                half = 0.5 * (sb - sa)
                mid = 0.5 * (sa + sb)
                for node, wgt in GAUSS5:
                    x = mid + half * node
                    if pc[0] == "p":
                        z, w = profile_zw(pc[1], pc[2], pc[3], x, t, ctx)
                        if w <= z:
                            zb = pc[2] - K * (x - pc[1])
                            wb = pc[3] + K * (x - pc[1])
                            crossed = crossed or wb > zb
                            mass -= wgt * half * r0
                            mom -= wgt * half * m0
                            continue
                    else:
                        z, w, vac = self.piece_zw(k, x, t)
                        if vac:
                            mass -= wgt * half * r0
                            mom -= wgt * half * m0
                            continue
                    rho = (0.5 * th * (w - z)) ** inv
                    mass += wgt * half * (rho - r0)
                    mom += wgt * half * (rho * 0.5 * (z + w) - m0)
                    lz = z - (ctx.L - K * x)
                    hw = w - (ctx.M + K * x)
                    if lz < low:
                        low = lz
                    if hw > high:
                        high = hw
        return mass, mom, low, high, crossed


class CellBuilder:
    """Builds :class:`CellSolution` records for one time step."""

    def __init__(self, ctx: StepContext, params):
        self.ctx = ctx
        self.params = params

    # -- helpers -----------------------------------------------------------

    def _fs(self, anchor, x):
        return profile_zw(anchor[0], anchor[1], anchor[2], x, self.ctx.tm, self.ctx)

    def _solve_ray(self, prev, fixed, family, guess_other, guess_sigma, xc, where):
        """Solve one fan ray.

        ``prev`` is the anchor of the known neighbour (left for family 1,
        right for family 2). The new state has its ``z`` (family 1) or ``w``
        (family 2) fixed to ``fixed`` and is anchored on the ray at the
        middle time.
        """
        ctx = self.ctx
        th, g, half = ctx.theta, ctx.gamma, 0.5 * ctx.dt
        fs = self._fs

        def res(x):
            other, sig = x
            xr = xc + sig * half
            za, wa = fs(prev, xr)
            if family == 1:
                zb, wb = fs((xr, fixed, other), xr)
                return _locus(za, wa, zb, wb, sig, 1, th, g)
            zb, wb = fs((xr, other, fixed), xr)
            return _locus(zb, wb, za, wa, sig, 2, th, g)

        try:
            (other, sig), norm = _newton(res, (guess_other, guess_sigma), ctx.tol, ctx.maxiter)
        except (RuntimeError, ZeroDivisionError, _NearVacuum) as exc:
            raise SchemeError(f"{where}: fan ray solve failed ({exc})") from exc
        xr = xc + sig * half
        anchor = (xr, fixed, other) if family == 1 else (xr, other, fixed)
        return anchor, sig, norm

    def left_chain(self, zL, wL, xL, z_end, xc, where, include_last):
        """Rarefaction fan of forced profiles from ``(zL, wL)`` towards ``z_end``."""
        ctx = self.ctx
        th, g = ctx.theta, ctx.gamma
        h = ctx.fan_step
        p = max(int(math.floor((z_end - zL) / h)) + 1, 2)
        stars = [zL + i * h for i in range(p - 1)] + [z_end]
        anchors = [(xL, zL, wL)]
        speeds = []
        norms = []
        last = p if include_last else p - 1
        for i in range(1, last):
            za, zb = stars[i - 1], stars[i]
            ra, rb = rho_of(za, wL, th), rho_of(zb, wL, th)
            guess = 0.5 * (za + wL) - shock_s(rb, ra, g)
            anchor, sig, norm = self._solve_ray(anchors[-1], zb, 1, anchors[-1][2], guess, xc,
                                                f"{where} 1-fan ray {i + 1}/{p}")
            if speeds and sig <= speeds[-1]:
                raise SchemeError(f"{where}: 1-fan speeds not increasing at ray {i + 1}")
            anchors.append(anchor)
            speeds.append(sig)
            norms.append(norm)
        return anchors, speeds, stars, norms

    def right_chain(self, zR, wR, xR, w_end, xc, where, include_last):
        """Mirror of :meth:`left_chain` for a 2-rarefaction, built leftwards."""
        ctx = self.ctx
        th, g = ctx.theta, ctx.gamma
        h = ctx.fan_step
        p = max(int(math.floor((wR - w_end) / h)) + 1, 2)
        stars = [wR - i * h for i in range(p - 1)] + [w_end]
        anchors = [(xR, zR, wR)]
        speeds = []
        norms = []
        last = p if include_last else p - 1
        for i in range(1, last):
            wb, wa = stars[i - 1], stars[i]
            ra, rb = rho_of(zR, wa, th), rho_of(zR, wb, th)
            guess = 0.5 * (zR + wb) + shock_s(ra, rb, g)
            anchor, sig, norm = self._solve_ray(anchors[-1], wa, 2, anchors[-1][1], guess, xc,
                                                f"{where} 2-fan ray {i + 1}/{p}")
            if speeds and sig >= speeds[-1]:
                raise SchemeError(f"{where}: 2-fan speeds not decreasing at ray {i + 1}")
            anchors.append(anchor)
            speeds.append(sig)
            norms.append(norm)
        return anchors, speeds, stars, norms

    def _middle(self, left, right, guess, xc, where):
        """Solve the middle patch between two fixed forced profiles."""
        ctx = self.ctx
        th, g, half = ctx.theta, ctx.gamma, 0.5 * ctx.dt
        fs = self._fs

        def res(x):
            zm, wm, sp, ss = x
            xp = xc + sp * half
            xs = xc + ss * half
            za, wa = fs(left, xp)
            zb, wb = fs((xc, zm, wm), xp)
            r1, r2 = _locus(za, wa, zb, wb, sp, 1, th, g)
            zc, wc = fs((xc, zm, wm), xs)
            zd, wd = fs(right, xs)
            r3, r4 = _locus(zc, wc, zd, wd, ss, 2, th, g)
            return [r1, r2, r3, r4]

        try:
            x, norm = _newton(res, guess, ctx.tol, ctx.maxiter)
        except (RuntimeError, ZeroDivisionError, _NearVacuum) as exc:
            raise SchemeError(f"{where}: middle patch solve failed ({exc})") from exc
        return x, norm

    # -- main entry --------------------------------------------------------

    def build(self, uL, xL, uR, xR, xc, x_lo, x_hi, j=None, n=None) -> CellSolution:
        """Cell solution for neighbour data ``uL`` at ``xL`` and ``uR`` at ``xR``."""
        where = f"cell j={j} n={n} x={xc:.6g}"
        fan = solve_riemann(uL, uR, self.params)
        if fan.vacuum or fan.middle.rho <= self.ctx.thr_beta:
            return self._near_vacuum(fan, xL, xR, xc, x_lo, x_hi, where)
        return self._regular(fan, xL, xR, xc, x_lo, x_hi, where)

    def _regular(self, fan: WaveFan, xL, xR, xc, x_lo, x_hi, where):
        ctx = self.ctx
        th, g = ctx.theta, ctx.gamma
        zL, wL, zR, wR = fan.zl, fan.wl, fan.zr, fan.wr
        zM, wM = fan.zm, fan.wm
        rM = fan.middle.rho
        one_rar = fan.one_is_rarefaction()
        two_rar = fan.two_is_rarefaction()

        if one_rar:
            lanchors, lspeeds, lstars, lnorm = self.left_chain(zL, wL, xL, zM, xc, where, False)
            zq = lstars[-2]
            sp0 = 0.5 * (zq + wL) - shock_s(rM, rho_of(zq, wL, th), g)
        else:
            lanchors, lspeeds, lnorm = [(xL, zL, wL)], [], []
            sp0 = fan.waves[0].lo
        if two_rar:
            ranchors, rspeeds, rstars, rnorm = self.right_chain(zR, wR, xR, wM, xc, where, False)
            wq = rstars[-2]
            ss0 = 0.5 * (zR + wq) + shock_s(rM, rho_of(zR, wq, th), g)
        else:
            ranchors, rspeeds, rnorm = [(xR, zR, wR)], [], []
            ss0 = fan.waves[-1].lo

        (zm, wm, sp, ss), mnorm = self._middle(lanchors[-1], ranchors[-1],
                                               (zM, wM, sp0, ss0), xc, where)
        speeds = lspeeds + [sp, ss] + rspeeds[::-1]
        for a, b in zip(speeds, speeds[1:]):
            if not a < b:
                raise SchemeError(f"{where}: ray speeds out of order {speeds}")
        reach = ctx.dx / ctx.dt
        if speeds[0] < -reach or speeds[-1] > reach:
            raise SchemeError(f"{where}: a ray leaves the cell (speeds {speeds[0]}, {speeds[-1]})")
        pieces = [("p",) + a for a in lanchors] + [("p", xc, zm, wm)] \
            + [("p",) + a for a in ranchors[::-1]]
        info = {
            "case": fan.case, "near_vacuum": None, "p": len(lanchors) + 1,
            "p_right": len(ranchors) + 1, "middle": (zm, wm), "sigma_p": sp, "sigma_s": ss,
            "left_fan": lanchors, "right_fan": ranchors,
            "residual": max([mnorm] + lnorm + rnorm),
        }
        return CellSolution(xc, ctx, x_lo, x_hi, speeds, pieces, [True] * len(speeds), info)

    # -- near vacuum ---------------------------------------------------------

    def _left_part(self, zL, wL, rL, xL, xc, Lj, where):
        """Left region for a 1-rarefaction near vacuum.

        Returns ``(pieces, speeds, rh, (z*, w*), lam*, label)``; ``lam*`` is
        ``-inf`` when the raw Riemann solution covers the whole left side.
        """
        ctx = self.ctx
        th = ctx.theta
        if rL > ctx.thr_beta:
            z1 = wL - 2.0 * ctx.thr_beta ** th / th
            anchors, speeds, _, _ = self.left_chain(zL, wL, xL, z1, xc, where, True)
            _, z2, w2 = anchors[-1]
            z3, w3 = (z2, w2) if z2 >= Lj else (Lj, w2 + Lj - z2)
            lam = 0.5 * (z2 + w2) - 0.5 * th * (w2 - z2)
            pieces = [("p",) + a for a in anchors]
            speeds, pieces = _cut(speeds, pieces, lam)
            return pieces, speeds + [lam], [True] * len(speeds) + [False], (z3, w3), lam, "left-fan"
        if zL >= Lj:
            return [], [], [], (zL, wL), -math.inf, "left-raw"
        K = ctx.K
        x4 = xL + ((zL - Lj) / K if K > 0 else 0.0)
        x4 = min(max(x4, xL), xc + ctx.dx)
        z4, w4 = zL - K * (x4 - xL), wL + K * (x4 - xL)
        lam = 0.5 * (z4 + w4) - 0.5 * th * (w4 - z4)
        return [("p", xL, zL, wL)], [lam], [False], (z4, w4), lam, "left-clamp"

    def _right_part(self, zR, wR, rR, xR, xc, Uj, where):
        """Mirror of :meth:`_left_part` for a 2-rarefaction."""
        ctx = self.ctx
        th = ctx.theta
        if rR > ctx.thr_beta:
            w1 = zR + 2.0 * ctx.thr_beta ** th / th
            anchors, speeds, _, _ = self.right_chain(zR, wR, xR, w1, xc, where, True)
            _, z2, w2 = anchors[-1]
            z3, w3 = (z2, w2) if w2 <= Uj else (z2 + Uj - w2, Uj)
            lam = 0.5 * (z2 + w2) + 0.5 * th * (w2 - z2)
            pieces = [("p",) + a for a in anchors][::-1]
            speeds = speeds[::-1]
            speeds, pieces = _cut_left(speeds, pieces, lam)
            rh = [False] + [True] * len(speeds)
            return pieces, [lam] + speeds, rh, (z3, w3), lam, "right-fan"
        if wR <= Uj:
            return [], [], [], (zR, wR), math.inf, "right-raw"
        K = ctx.K
        x4 = xR - ((wR - Uj) / K if K > 0 else 0.0)
        x4 = min(max(x4, xc - ctx.dx), xR)
        z4, w4 = zR - K * (x4 - xR), wR + K * (x4 - xR)
        lam = 0.5 * (z4 + w4) + 0.5 * th * (w4 - z4)
        return [("p", xR, zR, wR)], [lam], [False], (z4, w4), lam, "right-clamp"

    def _near_vacuum(self, fan: WaveFan, xL, xR, xc, x_lo, x_hi, where):
        ctx = self.ctx
        th = ctx.theta
        Lj = ctx.L - ctx.K * (xc + ctx.dx)
        Uj = ctx.M + ctx.K * (xc - ctx.dx)
        rL, rR = fan.left.rho, fan.right.rho
        one_rar = fan.one_is_rarefaction() and rL > 0
        two_rar = fan.two_is_rarefaction() and rR > 0
        if fan.case == 0:
            one_rar = two_rar = False
        lp, ls, lrh, lab_l = [], [], [], None
        rp, rs, rrh, lab_r = [], [], [], None
        zls, wls = fan.zl, fan.wl
        zrs, wrs = fan.zr, fan.wr
        if one_rar:
            lp, ls, lrh, (zls, wls), lam_l, lab_l = self._left_part(
                fan.zl, fan.wl, rL, xL, xc, Lj, where)
        if two_rar:
            rp, rs, rrh, (zrs, wrs), lam_r, lab_r = self._right_part(
                fan.zr, fan.wr, rR, xR, xc, Uj, where)
        if one_rar and two_rar and ls and rs and ls[-1] >= rs[0]:
            raise SchemeError(f"{where}: near-vacuum left and right regions overlap")
        uls = fan.left if zls == fan.zl and wls == fan.wl else _state(zls, wls, th)
        urs = fan.right if zrs == fan.zr and wrs == fan.wr else _state(zrs, wrs, th)
        if uls is fan.left and urs is fan.right:
            inner = fan
        else:
            inner = solve_riemann(uls, urs, self.params)
        pieces = lp + [("r", inner)] + rp
        speeds = ls + rs
        rh = lrh + rrh
        for a, b in zip(speeds, speeds[1:]):
            if not a <= b:
                raise SchemeError(f"{where}: near-vacuum ray speeds out of order {speeds}")
        if fan.vacuum:
            label = "vacuum"
        else:
            label = {1: "case1", 2: "case2", 3: "case3", 4: "case4", 0: "constant"}[fan.case]
        info = {"case": fan.case, "near_vacuum": label, "left": lab_l, "right": lab_r,
                "inner": inner, "residual": 0.0}
        return CellSolution(xc, ctx, x_lo, x_hi, speeds, pieces, rh, info)

    def outflow(self, u, xd, xc, x_lo, x_hi):
        """Half cell at the outflow boundary: a single forced profile."""
        th = self.ctx.theta
        rho, m = u
        if rho > 0:
            v = m / rho
            c = rho ** th / th
            piece = ("p", xd, v - c, v + c)
        else:
            piece = ("r", solve_riemann(State(0.0, 0.0), State(0.0, 0.0), self.params))
        info = {"case": 0, "near_vacuum": None, "outflow": True, "residual": 0.0}
        return CellSolution(xc, self.ctx, x_lo, x_hi, [], [piece], [], info)


def _state(z, w, th):
    rho = rho_of(z, w, th)
    return State(rho, rho * 0.5 * (z + w) if rho > 0 else 0.0)


def _cut(speeds, pieces, lam):
    """Drop fan pieces lying entirely to the right of speed ``lam``."""
    keep = [s for s in speeds if s < lam]
    return keep, pieces[:len(keep) + 1]


def _cut_left(speeds, pieces, lam):
    """Drop fan pieces lying entirely to the left of speed ``lam``."""
    drop = sum(1 for s in speeds if s <= lam)
    return speeds[drop:], pieces[drop:]


def rarefaction_fan(zL: float, wL: float, zM: float, dx: float, alpha: float, theta: float,
                    gamma: float):
    """Unperturbed piecewise constant 1-rarefaction fan.

    Returns the invariants ``[(z_i*, w_L)]`` for ``i = 1..p`` and the ray
    speeds between consecutive states.
    """
    if zM < zL:
        raise ValueError(f"need zM >= zL, got zM={zM}, zL={zL}")
    h = dx ** alpha
    p = max(int(math.floor((zM - zL) / h)) + 1, 2)
    stars = [zL + i * h for i in range(p - 1)] + [zM]
    states = [(z, wL) for z in stars]
    speeds = []
    for za, zb in zip(stars, stars[1:]):
        ra, rb = rho_of(za, wL, theta), rho_of(zb, wL, theta)
        speeds.append(0.5 * (za + wL) - shock_s(rb, ra, gamma))
    return states, speeds


def discontinuity_kind(za, wa, zb, wb, family, theta):
    """Label a discontinuity as a genuine shock or a rarefaction shock."""
    ra, rb = rho_of(za, wa, theta), rho_of(zb, wb, theta)
    if family == 1:
        return WaveKind.SHOCK1 if rb > ra else WaveKind.RAREFACTION_SHOCK1
    return WaveKind.SHOCK2 if ra > rb else WaveKind.RAREFACTION_SHOCK2
