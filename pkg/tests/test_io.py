import json
import math

import numpy as np
import pytest

from periodic_euler import io
from periodic_euler.gas import ProblemParams, State

P = ProblemParams(5.0 / 3.0, 0.0, 1.0, 7.0)


def test_fmt():
    assert io.fmt(3) == "3"
    assert io.fmt(np.int64(4)) == "4"
    assert io.fmt(0.1) == "0.1"
    assert float(io.fmt(1 / 3)) == 1 / 3
    assert io.fmt(math.nan) == "nan" and io.fmt(-math.inf) == "-inf"


def test_lattice_roundtrip(tmp_path):
    rho0 = np.array([np.nan, 1.0, np.nan, 0.0, np.nan])
    m0 = np.array([np.nan, 4.0, np.nan, 0.0, np.nan])
    rho1 = np.array([0.5, np.nan, 2.0 / 3.0, np.nan, 1.0])
    m1 = np.array([2.0, np.nan, 1.0, np.nan, 4.0])
    path = io.write_csv(tmp_path / "lat.csv", io.LATTICE_COLUMNS,
                        io.lattice_rows([(rho0, m0), (rho1, m1)], P))
    back = io.read_lattice(path)
    np.testing.assert_array_equal(back[0][0], rho0)
    np.testing.assert_array_equal(back[1][1], m1)
    assert path.read_text().splitlines()[0] == "j,n,rho,m,z,w"


def test_read_lattice_rejects_columns(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("a,b\n1,2\n")
    try:
        io.read_lattice(p)
    except ValueError:
        pass
    else:
        raise AssertionError("expected ValueError")


def test_field_rows():
    rows = list(io.field_rows([0.0], 0.5, [State(1.0, 4.0)], P))
    assert rows[0][:4] == (0.0, 0.5, 1.0, 4.0)
    assert rows[0][4:] == (pytest.approx(1.0), pytest.approx(7.0))


def test_write_json(tmp_path):
    p = io.write_json(tmp_path / "s.json", {"b": np.float64(math.inf), "a": [np.int64(1), True]})
    doc = json.loads(p.read_text())
    assert doc == {"a": [1, True], "b": "inf"}
    assert p.read_text().index('"a"') < p.read_text().index('"b"')
