import json
import math
import os

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from caustix import __version__
from caustix.report import atomic_write, csv_text, fmt_value, json_text, read_csv


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_seventeen_digits_round_trip(x):
    assert float(fmt_value(x)) == x


def test_special_values():
    assert fmt_value(True) == "1"
    assert fmt_value(np.int64(3)) == "3"
    assert fmt_value(math.inf) == "inf"
    assert fmt_value(math.nan) == "nan"


def test_csv_header_echoes_parameters(tmp_path):
    text = csv_text(("a", "b"), [(1.0, 0.1), (2, math.nan)], {"r": 0.3, "seed": 7})
    lines = text.splitlines()
    assert lines[0] == f"# caustix {__version__}"
    assert "# r=0.29999999999999999" in lines
    assert "# seed=7" in lines
    path = atomic_write(tmp_path / "x.csv", text)
    params, cols, rows = read_csv(path)
    assert params["seed"] == "7"
    assert cols == ["a", "b"]
    assert rows[0] == [1.0, 0.1]
    assert math.isnan(rows[1][1])


def test_json_is_strict_and_sorted():
    text = json_text({"b": np.float64(1.5), "a": [np.int32(2), math.inf], "c": (True,)})
    data = json.loads(text)
    assert list(data) == ["a", "b", "c"]
    assert data["a"] == [2, "inf"]


def test_atomic_write_replaces_without_leftovers(tmp_path):
    target = tmp_path / "sub" / "out.txt"
    atomic_write(target, "first")
    atomic_write(target, b"second")
    assert target.read_text() == "second"
    assert os.listdir(target.parent) == ["out.txt"]
    mask = os.umask(0)
    os.umask(mask)
    assert target.stat().st_mode & 0o777 == 0o666 & ~mask
