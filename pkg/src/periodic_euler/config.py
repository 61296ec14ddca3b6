"""Run configuration: parsing, environment overrides and hypothesis checks.

The text format is one ``key = value`` per line with dotted sections, ``#``
comments and blank lines ignored::

    problem.gamma = 1.4
    forcing.0.c = 0.2
    initial.kind = steady

A JSON file with nested objects is flattened to the same keys. Any key can be
overridden by the environment variable ``PEULER_`` + the key in upper case
with ``.`` replaced by ``__`` (``PEULER_SCHEME__NX=50``).
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .forcing import Forcing, ForcingTerm
from .gas import DomainError, ProblemParams, State, from_invariants, rho_of
from .period_map import SOURCE_FORMS, FixedPointConfig
from .scheme.grid import SchemeParams

ENV_PREFIX = "PEULER_"
MODES = ("riemann", "evolve", "fixed-point", "verify", "study")

_FLOAT, _INT, _STR, _BOOL, _FLOATS, _INTS = "float", "int", "str", "bool", "floats", "ints"

SCHEMA = {
    "problem.gamma": _FLOAT, "problem.K": _FLOAT, "problem.L": _FLOAT, "problem.M": _FLOAT,
    "problem.eps": _FLOAT,
    "scheme.Nx": _INT, "scheme.alpha": _FLOAT, "scheme.beta": _FLOAT,
    "scheme.delta_exp": _FLOAT, "scheme.density_scale": _FLOAT, "scheme.newton_tol": _FLOAT,
    "scheme.newton_maxiter": _INT,
    "boundary.rho": _FLOAT, "boundary.m": _FLOAT, "boundary.z": _FLOAT, "boundary.w": _FLOAT,
    "initial.kind": _STR, "initial.rho": _FLOAT, "initial.m": _FLOAT, "initial.table": _STR,
    "fixed_point.delta_dx": _FLOAT, "fixed_point.delta_power": _FLOAT,
    "fixed_point.shift": _BOOL, "fixed_point.relaxation": _FLOAT,
    "fixed_point.max_iters": _INT, "fixed_point.residual_tol": _FLOAT,
    "fixed_point.source_form": _STR,
    "riemann.left.rho": _FLOAT, "riemann.left.m": _FLOAT, "riemann.right.rho": _FLOAT,
    "riemann.right.m": _FLOAT, "riemann.t": _FLOAT, "riemann.points": _INT,
    "evolve.snapshots": _FLOATS, "evolve.points": _INT,
    "verify.lattice": _STR, "verify.tests": _INT,
    "study.Nx": _INTS, "study.fixed_point": _BOOL,
    "run.mode": _STR, "run.out": _STR, "run.seed": _INT, "run.workers": _INT,
}
_TERM_KEYS = {"c": _FLOAT, "a": _FLOAT, "b": _FLOAT, "f": _INT, "phi": _FLOAT, "tkind": _STR,
              "xkind": _STR, "coeffs": _FLOATS}


class ConfigError(ValueError):
    """Invalid configuration; ``hypothesis`` names the failed condition, if any."""

    def __init__(self, message: str, hypothesis: str | None = None):
        super().__init__(f"{hypothesis}: {message}" if hypothesis else message)
        self.hypothesis = hypothesis


def _kind(key: str) -> str:
    if key in SCHEMA:
        return SCHEMA[key]
    parts = key.split(".")
    if len(parts) == 3 and parts[0] == "forcing" and parts[1].isdigit() and parts[2] in _TERM_KEYS:
        return _TERM_KEYS[parts[2]]
    raise ConfigError(f"unknown key {key!r}")


def _convert(key: str, raw):
    kind = _kind(key)
    try:
        if kind == _FLOAT:
            return float(raw)
        if kind == _INT:
            if isinstance(raw, float) and not raw.is_integer():
                raise ValueError
            return int(raw)
        if kind == _BOOL:
            if isinstance(raw, bool):
                return raw
            s = str(raw).strip().lower()
            if s in ("1", "true", "yes", "on"):
                return True
            if s in ("0", "false", "no", "off"):
                return False
            raise ValueError
        if kind in (_FLOATS, _INTS):
            items = raw if isinstance(raw, (list, tuple)) else [
                s for s in str(raw).replace(";", ",").split(",") if s.strip()]
            conv = float if kind == _FLOATS else int
            return tuple(conv(v) for v in items)
        return str(raw).strip()
    except (TypeError, ValueError):
        raise ConfigError(f"cannot read {key} = {raw!r} as {kind}") from None


def _flatten(obj, prefix=""):
    out = {}
    for k, v in obj.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        elif isinstance(v, list) and v and isinstance(v[0], dict):
            for i, item in enumerate(v):
                out.update(_flatten(item, f"{key}.{i}."))
        else:
            out[key] = v
    return out


def parse_text(text: str) -> dict:
    out = {}
    for num, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {num}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key] = value
    return out


def read_raw(path) -> dict:
    """Flat key/value mapping from a text or JSON file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    if path.suffix == ".json" or text.lstrip().startswith("{"):
        try:
            return _flatten(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    return parse_text(text)


def env_overrides(raw: dict, environ=None) -> dict:
    """Apply ``PEULER_*`` variables on top of ``raw``."""
    environ = os.environ if environ is None else environ
    known = {k.upper().replace(".", "__"): k for k in list(SCHEMA) + list(raw)}
    out = dict(raw)
    for name, value in environ.items():
        if not name.startswith(ENV_PREFIX):
            continue
        tail = name[len(ENV_PREFIX):]
        key = known.get(tail)
        if key is None:
            key = tail.lower().replace("__", ".")
            parts = key.split(".")
            if not (len(parts) == 3 and parts[0] == "forcing"):
                raise ConfigError(f"environment variable {name} matches no config key")
        out[key] = value
    return out


@dataclass
class RunConfig:
    """Validated configuration of one run."""

    params: ProblemParams
    scheme: SchemeParams
    forcing: Forcing
    ub: State
    initial: dict
    fixed_point: FixedPointConfig
    mode: str = "fixed-point"
    out: str = "out"
    seed: int = 0
    workers: int = 1
    riemann: dict = field(default_factory=dict)
    evolve: dict = field(default_factory=dict)
    verify: dict = field(default_factory=dict)
    study: dict = field(default_factory=dict)
    raw: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)

    def initial_data(self):
        """``x -> State`` for the initial data."""
        return make_initial(self.initial, self.params, self.ub)

    def with_nx(self, Nx: int) -> "RunConfig":
        from dataclasses import replace
        return replace(self, scheme=replace(self.scheme, Nx=int(Nx)))


def _table_rows(text: str):
    rows = []
    for chunk in text.replace("\n", ";").split(";"):
        if chunk.strip():
            vals = [float(v) for v in chunk.replace(",", " ").split()]
            if len(vals) != 3:
                raise ConfigError(f"initial.table row {chunk!r} needs x z w")
            rows.append(vals)
    if not rows:
        raise ConfigError("initial.table is empty")
    rows.sort()
    if rows[0][0] > 0.0:
        raise ConfigError("initial.table must start at x = 0", "IC")
    return rows


def make_initial(section: dict, params: ProblemParams, ub: State):
    """Initial data from the ``initial.*`` keys: ``steady``, ``constant`` or ``table``.

    ``table`` rows are ``x z w``: from each ``x`` to the next row the data
    follow the steady profile anchored there, ``z - K (x - x_k)`` and
    ``w + K (x - x_k)``.
    """
    from .scheme.solver import steady_profile

    kind = section.get("kind", "steady")
    if kind == "steady":
        return steady_profile(0.0, ub, params)
    if kind == "constant":
        if "rho" not in section or "m" not in section:
            raise ConfigError("constant initial data need initial.rho and initial.m")
        u = State(float(section["rho"]), float(section["m"]))
        return lambda x: u
    if kind == "table":
        rows = _table_rows(section.get("table", ""))
        xs = [r[0] for r in rows]
        th = params.theta

        def u0(x):
            k = max(i for i, x0 in enumerate(xs) if x0 <= x) if x >= xs[0] else 0
            xk, z, w = rows[k]
            z -= params.K * (x - xk)
            w += params.K * (x - xk)
            r = rho_of(z, w, th)
            return State(r, r * 0.5 * (z + w))
        return u0
    raise ConfigError(f"initial.kind must be steady, constant or table, got {kind!r}")


def _forcing_from(raw: dict) -> Forcing:
    idx = sorted({int(k.split(".")[1]) for k in raw if k.startswith("forcing.")})
    terms = []
    for i in idx:
        kw = {name: raw[f"forcing.{i}.{name}"] for name in _TERM_KEYS
              if f"forcing.{i}.{name}" in raw}
        if "c" not in kw:
            raise ConfigError(f"forcing term {i} needs a coefficient c")
        try:
            terms.append(ForcingTerm(**kw))
        except ValueError as exc:
            raise ConfigError(f"forcing term {i}: {exc}") from None
    return Forcing(tuple(terms))


def build_config(raw: dict, mode: str | None = None) -> RunConfig:
    """Convert and validate a flat mapping. Raises :class:`ConfigError`."""
    vals = {k: _convert(k, v) for k, v in raw.items()}
    for key in ("problem.gamma", "problem.L", "problem.M"):
        if key not in vals:
            raise ConfigError(f"missing required key {key}")
    forcing = _forcing_from(vals)
    checks = []

    # condition-X: |F| <= K on a fine grid
    fsup = forcing.grid_sup(401)
    K = vals.get("problem.K", forcing.sup_bound())
    if fsup > K * (1 + 1e-12):
        raise ConfigError(f"max |F| = {fsup:.6g} exceeds K = {K:.6g}", "condition-X")
    checks.append(("condition-X", f"max |F| = {fsup:.6g} <= K = {K:.6g}"))

    # condition-M: M >= L >= 1 + K (+ eps)
    L, M, eps = vals["problem.L"], vals["problem.M"], vals.get("problem.eps", 0.0)
    if not (M >= L >= 1.0 + K + eps):
        raise ConfigError(f"need M >= L >= 1 + K + eps, got L={L}, M={M}, K={K}, eps={eps}",
                          "condition-M")
    try:
        params = ProblemParams(vals["problem.gamma"], K, L, M, eps)
    except DomainError as exc:
        raise ConfigError(str(exc), "parameters") from None
    checks.append(("condition-M", f"M={M} >= L={L} >= 1 + K + eps = {1 + K + eps:.6g}"))

    # BC: L <= z(u_b), w(u_b) <= M
    if "boundary.z" in vals or "boundary.w" in vals:
        zb, wb = vals.get("boundary.z", L), vals.get("boundary.w", M)
        if wb <= zb:
            raise ConfigError("boundary invariants need w > z", "BC")
        ub = from_invariants((zb, wb), params)
    elif "boundary.rho" in vals and "boundary.m" in vals:
        ub = State(vals["boundary.rho"], vals["boundary.m"])
        if ub.rho <= 0:
            raise ConfigError("boundary density must be positive", "BC")
        th = params.theta
        c = ub.rho ** th / th
        zb, wb = ub.m / ub.rho - c, ub.m / ub.rho + c
    else:
        raise ConfigError("boundary data need boundary.rho and boundary.m (or boundary.z/w)", "BC")
    tol = 1e-12 * max(1.0, abs(L), abs(M))
    if zb < L - tol or wb > M + tol:
        raise ConfigError(f"boundary invariants z={zb:.6g}, w={wb:.6g} leave [L, M] = [{L}, {M}]",
                          "BC")
    checks.append(("BC", f"L <= z_b = {zb:.6g}, w_b = {wb:.6g} <= M"))

    initial = {k.split(".", 1)[1]: v for k, v in vals.items() if k.startswith("initial.")}
    u0 = make_initial(initial, params, ub)
    xs = np.linspace(0.0, 1.0, 1001)
    th = params.theta
    for x in xs:
        rho, m = u0(float(x))
        if rho < 0:
            raise ConfigError(f"negative initial density at x={x:.4g}", "IC")
        if rho == 0:
            continue
        c = rho ** th / th
        z, w = m / rho - c, m / rho + c
        if z < params.lower(x) - tol or w > params.upper(x) + tol:
            raise ConfigError(f"initial invariants z={z:.6g}, w={w:.6g} leave the region at "
                              f"x={x:.4g}", "IC")
    checks.append(("IC", "initial data inside L - Kx <= z, w <= M + Kx on 1001 points"))

    sp = SchemeParams(
        Nx=vals.get("scheme.Nx", 50), alpha=vals.get("scheme.alpha", 0.75),
        beta=vals.get("scheme.beta"), delta_exp=vals.get("scheme.delta_exp"),
        density_scale=vals.get("scheme.density_scale", 1.0),
        newton_tol=vals.get("scheme.newton_tol", 1e-12),
        newton_maxiter=vals.get("scheme.newton_maxiter", 30))
    try:
        sp = sp.resolved(params)
    except DomainError as exc:
        raise ConfigError(str(exc), "scheme") from None

    form = vals.get("fixed_point.source_form", "derived")
    if form not in SOURCE_FORMS:
        raise ConfigError(f"fixed_point.source_form must be one of {SOURCE_FORMS}")
    try:
        fp = FixedPointConfig(
            delta_dx=vals.get("fixed_point.delta_dx"),
            delta_power=vals.get("fixed_point.delta_power", 0.9),
            shift=vals.get("fixed_point.shift", True),
            relaxation=vals.get("fixed_point.relaxation", 0.5),
            max_iters=vals.get("fixed_point.max_iters", 5000),
            residual_tol=vals.get("fixed_point.residual_tol", 1e-6), source_form=form)
    except DomainError as exc:
        raise ConfigError(str(exc), "fixed_point") from None

    mode = mode or vals.get("run.mode", "fixed-point")
    if mode not in MODES:
        raise ConfigError(f"mode must be one of {MODES}, got {mode!r}")
    section = lambda name: {k.split(".", 1)[1]: v for k, v in vals.items()  # noqa: E731
                            if k.startswith(name + ".")}
    return RunConfig(
        params=params, scheme=sp, forcing=forcing, ub=ub, initial=initial, fixed_point=fp,
        mode=mode, out=vals.get("run.out", "out"), seed=vals.get("run.seed", 0),
        workers=vals.get("run.workers", 1), riemann=section("riemann"),
        evolve=section("evolve"), verify=section("verify"), study=section("study"),
        raw=dict(raw), checks=checks)


def load_config(path, environ=None, mode: str | None = None) -> RunConfig:
    """Read, override from the environment and validate a config file."""
    return build_config(env_overrides(read_raw(path), environ), mode)
