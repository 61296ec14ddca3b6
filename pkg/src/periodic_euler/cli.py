"""Command line entry point: ``periodic-euler --config FILE --mode MODE``.

Exit codes: 0 success, 2 configuration error, 3 solver failure (including a
fixed-point search that does not converge), 4 failed verification.
"""

from __future__ import annotations

import argparse
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import io
from .config import MODES, ConfigError, RunConfig, load_config
from .gas import DomainError, State
from .period_map import LatticeState, find_fixed_point, trajectory
from .riemann import SolverError, sample_fan, solve_riemann
from .scheme import SchemeError, build_grid, evolve
from .verify import (RegionBounds, check_region, entropy_residual, periodicity_residual,
                     random_test_functions, verification_report, weak_residual)

log = logging.getLogger("periodic_euler")

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_VERIFY = 0, 2, 3, 4


class VerificationFailed(RuntimeError):
    pass


def run_riemann(cfg: RunConfig, out: Path) -> dict:
    r = cfg.riemann
    try:
        uL = State(r["left.rho"], r["left.m"])
        uR = State(r["right.rho"], r["right.m"])
    except KeyError as exc:
        raise ConfigError(f"riemann mode needs riemann.{exc.args[0]}") from None
    t = r.get("t", 0.1)
    npts = r.get("points", 401)
    fan = solve_riemann(uL, uR, cfg.params)
    xs = np.linspace(0.0, 1.0, npts)
    states = [sample_fan(fan, (x - 0.5) / t, cfg.params) for x in xs]
    io.write_csv(out / "riemann.csv", io.FIELD_COLUMNS, io.field_rows(xs, t, states, cfg.params))
    summary = {"mode": "riemann", "case": fan.case, "vacuum": fan.vacuum,
               "middle": {"rho": fan.middle.rho, "m": fan.middle.m, "z": fan.zm, "w": fan.wm},
               "waves": [{"kind": w.kind.value, "lo": w.lo, "hi": w.hi} for w in fan.waves]}
    io.write_json(out / "summary.json", summary)
    return summary


def _evolve(cfg: RunConfig, snapshots=()):
    return evolve(cfg.initial_data(), cfg.params, cfg.scheme, cfg.forcing, cfg.ub,
                  snapshot_times=snapshots, snapshot_x=None)


def run_evolve(cfg: RunConfig, out: Path) -> dict:
    snaps = cfg.evolve.get("snapshots", (0.0, 0.5, 1.0))
    sol = _evolve(cfg, snaps)
    rows = []
    for ts in sorted(sol.snapshots):
        rows.extend(io.field_rows(sol.snapshot_x, ts, sol.snapshots[ts], cfg.params))
    io.write_csv(out / "snapshots.csv", io.FIELD_COLUMNS, rows)
    io.write_csv(out / "lattice.csv", io.LATTICE_COLUMNS,
                 io.lattice_rows(list(zip(sol.rho, sol.m)), cfg.params))
    dx = sol.grid.dx
    reg = check_region(sol, RegionBounds.from_params(cfg.params), 3.0 * dx ** 0.9)
    summary = {
        "mode": "evolve", "Nx": cfg.scheme.Nx, "dx": dx, "dt": sol.grid.dt,
        "steps": len(sol.reports), "pointwise_violation": sol.violation,
        "average_violation": max((r.avg_violation for r in sol.reports), default=0.0),
        "lattice_region": reg.as_dict(), "vacuum_crossings": sol.crossings,
        "crossings_times_dx": sol.crossings * dx,
        "near_vacuum_cells": sum(r.near_vacuum for r in sol.reports),
        "cutoff_vacuum": sum(r.cutoff_vacuum for r in sol.reports),
        "max_rh_residual": max((r.residual for r in sol.reports), default=0.0),
    }
    io.write_json(out / "summary.json", summary)
    return summary


def _fixed_point(cfg: RunConfig):
    grid = build_grid(cfg.params, cfg.scheme)
    res = find_fixed_point(cfg.forcing, cfg.params, grid, cfg.fixed_point, cfg.ub, cfg.scheme)
    tr = trajectory(res.lattice, cfg.forcing, cfg.params, grid, cfg.ub, cfg.scheme,
                    cfg.fixed_point)
    return grid, res, tr


def _report(cfg: RunConfig, tr):
    n = cfg.verify.get("tests", 20)
    checks = verification_report(tr, n, cfg.seed)
    return [c.as_dict() for c in checks], all(c.passed for c in checks)


def run_fixed_point(cfg: RunConfig, out: Path) -> dict:
    grid, res, tr = _fixed_point(cfg)
    io.write_csv(out / "history.csv", io.HISTORY_COLUMNS,
                 ((h["iter"], h["residual"], h["clamp_count"]) for h in res.history))
    io.write_csv(out / "lattice.csv", io.LATTICE_COLUMNS,
                 io.lattice_rows([(res.lattice.rho, res.lattice.m)], cfg.params))
    report, ok = _report(cfg, tr)
    summary = {"mode": "fixed-point", "Nx": cfg.scheme.Nx, "dx": grid.dx, **res.summary(),
               "source_form": cfg.fixed_point.source_form, "shift": cfg.fixed_point.shift,
               "verification": report, "verification_passed": ok}
    io.write_json(out / "summary.json", summary)
    if not res.converged:
        raise SolverError(f"fixed-point search did not converge in {res.iterations} iterations "
                          f"(best residual {res.residual:.3e})")
    if not ok:
        raise VerificationFailed("fixed-point verification failed")
    return summary


def run_verify(cfg: RunConfig, out: Path) -> dict:
    path = Path(cfg.verify.get("lattice", out / "lattice.csv"))
    try:
        levels = io.read_lattice(path)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot load lattice: {exc}") from None
    grid = build_grid(cfg.params, cfg.scheme)
    if len(next(iter(levels.values()))[0]) != grid.size:
        raise ConfigError(f"lattice size does not match scheme.Nx = {cfg.scheme.Nx}")
    if sorted(levels) == [0]:
        rho, m = levels[0]
        tr = trajectory(LatticeState(0, rho, m), cfg.forcing, cfg.params, grid, cfg.ub,
                        cfg.scheme, cfg.fixed_point)
    else:
        from .period_map import Trajectory
        ns = sorted(levels)
        tr = Trajectory(cfg.params, grid, cfg.forcing, cfg.ub, [levels[n][0] for n in ns],
                        [levels[n][1] for n in ns])
    report, ok = _report(cfg, tr)
    summary = {"mode": "verify", "lattice": str(path), "verification": report,
               "verification_passed": ok}
    io.write_json(out / "verify_report.json", summary)
    if not ok:
        raise VerificationFailed("verification failed")
    return summary


def study_point(cfg: RunConfig, Nx: int) -> dict:
    """One row of the refinement study."""
    c = cfg.with_nx(Nx)
    sol = _evolve(c)
    dx = sol.grid.dx
    row = {"Nx": Nx, "dx": dx,
           "violation": max((r.avg_violation for r in sol.reports), default=0.0),
           "pointwise_violation": sol.violation, "crossings_dx": sol.crossings * dx}
    if c.study.get("fixed_point", True):
        _, res, tr = _fixed_point(c)
        wm, wmo = weak_residual(tr, random_test_functions(20, c.seed + 1, interior=False))
        row.update(converged=res.converged, fp_residual=res.residual, weak_mass=wm,
                   weak_momentum=wmo,
                   entropy=entropy_residual(tr, random_test_functions(20, c.seed)),
                   periodicity=periodicity_residual(tr))
    return row


def run_study(cfg: RunConfig, out: Path) -> dict:
    nxs = cfg.study.get("Nx", (25, 50, 100))
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            rows = list(pool.map(study_point, [cfg] * len(nxs), nxs))
    else:
        rows = [study_point(cfg, n) for n in nxs]
    for prev, row in zip(rows, rows[1:]):
        ratio = prev["violation"] / row["violation"] if row["violation"] else np.inf
        row["violation_ratio"] = ratio
        if "weak_mass" in row:
            row["weak_mass_ratio"] = prev["weak_mass"] / row["weak_mass"]
            row["weak_momentum_ratio"] = prev["weak_momentum"] / row["weak_momentum"]
    cols = ["Nx", "dx", "violation", "violation_ratio", "pointwise_violation", "crossings_dx"]
    if "weak_mass" in rows[0]:
        cols += ["converged", "fp_residual", "weak_mass", "weak_mass_ratio", "weak_momentum",
                 "weak_momentum_ratio", "entropy", "periodicity"]
    io.write_csv(out / "study.csv", cols,
                 ([int(r[k]) if isinstance(r.get(k), bool) else r.get(k, np.nan) for k in cols]
                  for r in rows))
    summary = {"mode": "study", "rows": rows}
    io.write_json(out / "summary.json", summary)
    return summary


RUNNERS = {"riemann": run_riemann, "evolve": run_evolve, "fixed-point": run_fixed_point,
           "verify": run_verify, "study": run_study}


def run(cfg: RunConfig, out: Path | None = None) -> int:
    """Dispatch on ``cfg.mode``; returns the exit status."""
    out = Path(cfg.out if out is None else out)
    out.mkdir(parents=True, exist_ok=True)
    try:
        RUNNERS[cfg.mode](cfg, out)
    except ConfigError as exc:
        log.error("configuration error: %s", exc)
        return EXIT_CONFIG
    except (SchemeError, SolverError, DomainError, FloatingPointError) as exc:
        log.error("solver failure: %s", exc)
        return EXIT_SOLVER
    except VerificationFailed as exc:
        log.error("%s", exc)
        return EXIT_VERIFY
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="periodic-euler", description=__doc__.splitlines()[0])
    p.add_argument("--config", required=True, help="config file (key = value text or JSON)")
    p.add_argument("--mode", choices=MODES, help="overrides run.mode")
    p.add_argument("--out", help="output directory (overrides run.out)")
    p.add_argument("--workers", type=int, help="worker processes for study mode")
    p.add_argument("--seed", type=int, help="seed for random test functions")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = load_config(args.config, mode=args.mode)
    except ConfigError as exc:
        log.error("configuration error: %s", exc)
        return EXIT_CONFIG
    if args.workers is not None:
        cfg = replace(cfg, workers=max(1, args.workers))
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    for name, msg in cfg.checks:
        log.info("%s ok: %s", name, msg)
    return run(cfg, Path(args.out) if args.out else None)


if __name__ == "__main__":
    sys.exit(main())
