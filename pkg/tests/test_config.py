import json

import pytest

from periodic_euler.config import (ConfigError, build_config, env_overrides, load_config,
                                   parse_text)

BASE = {
    "problem.gamma": "1.4", "problem.K": "0.2", "problem.L": "1.3", "problem.M": "2.5",
    "forcing.0.c": "0.2", "forcing.0.a": "1", "boundary.z": "1.3", "boundary.w": "2.5",
    "scheme.Nx": "10", "scheme.density_scale": "1e-5",
}


def test_sample_config_loads(sample_cfg):
    names = [name for name, _ in sample_cfg.checks]
    assert names == ["condition-X", "condition-M", "BC", "IC"]
    assert sample_cfg.params.gamma == 1.4 and sample_cfg.params.K == 0.2
    assert sample_cfg.scheme.Nx == 50
    assert sample_cfg.forcing.sup_bound() == pytest.approx(0.2)
    assert sample_cfg.mode == "fixed-point"


def test_rejects_M_below_L():
    raw = dict(BASE, **{"problem.M": "1.25"})
    with pytest.raises(ConfigError) as exc:
        build_config(raw)
    assert exc.value.hypothesis == "condition-M"
    assert "condition-M" in str(exc.value)


def test_rejects_large_forcing():
    raw = dict(BASE, **{"forcing.0.c": "0.3"})
    with pytest.raises(ConfigError) as exc:
        build_config(raw)
    assert exc.value.hypothesis == "condition-X"


def test_rejects_boundary_outside_region():
    raw = dict(BASE, **{"boundary.z": "1.2"})
    with pytest.raises(ConfigError) as exc:
        build_config(raw)
    assert exc.value.hypothesis == "BC"


def test_rejects_initial_outside_region():
    raw = dict(BASE, **{"initial.kind": "table", "initial.table": "0 1.3 2.5; 0.5 1.0 2.0"})
    with pytest.raises(ConfigError) as exc:
        build_config(raw)
    assert exc.value.hypothesis == "IC"


def test_rejects_bad_scheme_exponent():
    with pytest.raises(ConfigError) as exc:
        build_config(dict(BASE, **{"scheme.alpha": "0.4"}))
    assert exc.value.hypothesis == "scheme"


def test_unknown_key():
    with pytest.raises(ConfigError):
        build_config(dict(BASE, **{"problem.foo": "1"}))


def test_bad_value():
    with pytest.raises(ConfigError):
        build_config(dict(BASE, **{"scheme.Nx": "ten"}))


def test_parse_text():
    raw = parse_text("# comment\nproblem.K = 0.2  # trailing\n\nrun.mode=riemann\n")
    assert raw == {"problem.K": "0.2", "run.mode": "riemann"}
    with pytest.raises(ConfigError):
        parse_text("no equals sign")


def test_env_overrides():
    raw = env_overrides(dict(BASE), {"PEULER_SCHEME__NX": "20", "OTHER": "x"})
    assert raw["scheme.Nx"] == "20"
    assert build_config(raw).scheme.Nx == 20
    with pytest.raises(ConfigError):
        env_overrides(dict(BASE), {"PEULER_NOPE": "1"})


def test_load_with_environment(sample_path):
    cfg = load_config(sample_path, environ={"PEULER_RUN__SEED": "7"})
    assert cfg.seed == 7


def test_json_config(tmp_path):
    doc = {"problem": {"gamma": 1.4, "K": 0.2, "L": 1.3, "M": 2.5},
           "forcing": [{"c": 0.2, "a": 1, "f": 1}],
           "boundary": {"z": 1.3, "w": 2.5},
           "scheme": {"Nx": 12, "density_scale": 1e-5},
           "fixed_point": {"shift": False},
           "study": {"Nx": [5, 10]}}
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(doc))
    cfg = load_config(p, environ={})
    assert cfg.scheme.Nx == 12 and not cfg.fixed_point.shift
    assert cfg.study["Nx"] == (5, 10)
    assert len(cfg.forcing.terms) == 1


def test_initial_kinds():
    cfg = build_config(dict(BASE, **{"initial.kind": "constant", "initial.rho": "2.48832e-05",
                                     "initial.m": "4.727808e-05"}))
    assert cfg.initial_data()(0.7) == (2.48832e-05, 4.727808e-05)
    steady = build_config(BASE).initial_data()
    assert steady.anchor[0] == 0.0
    with pytest.raises(ConfigError):
        build_config(dict(BASE, **{"initial.kind": "spline"}))


def test_mode_override():
    assert build_config(BASE, mode="evolve").mode == "evolve"
    with pytest.raises(ConfigError):
        build_config(BASE, mode="plot")


def test_with_nx(sample_cfg):
    assert sample_cfg.with_nx(25).scheme.Nx == 25
    assert sample_cfg.scheme.Nx == 50
