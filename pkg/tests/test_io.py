import numpy as np
import pytest

from conftest import random_field
from sdebye import io
from sdebye.spacetime import SpaceTimeFunction, TimeWindow
from sdebye.torus import Spectrum, forward, make_grid


@pytest.mark.parametrize("n, M", [(1, 8), (2, 6)])
def test_field_csv_round_trip(tmp_path, rng, n, M):
    f = random_field(make_grid(n, M), rng)
    back = io.load_field(io.save_field(tmp_path / "f.csv", f))
    assert back.grid == f.grid and np.array_equal(back.values, f.values)
    spec = forward(f)
    back = io.load_field(io.save_field(tmp_path / "s.csv", spec))
    assert isinstance(back, Spectrum) and np.array_equal(back.coeffs, spec.coeffs)


def test_field_csv_layout(tmp_path):
    g = make_grid(1, 4)
    text = io.save_field(tmp_path / "f.csv", Spectrum(g, [1, 2j, 0, -0.5])).read_text().splitlines()
    assert text[0] == "# n=1,M=4,kind=spectrum"
    assert text[1:] == ["re,im", "1,0", "0,2", "0,0", "-0.5,0"]


def test_binary_round_trip(tmp_path, rng):
    f = random_field(make_grid(3, 4), rng)
    back = io.load_field_binary(io.save_field_binary(tmp_path / "f.bin", f))
    assert np.array_equal(back.values, f.values)
    (tmp_path / "junk.bin").write_bytes(b"nope" + bytes(40))
    with pytest.raises(ValueError):
        io.load_field_binary(tmp_path / "junk.bin")


def test_spacetime_round_trip(tmp_path, rng):
    g, w = make_grid(1, 4), TimeWindow(2.0, 8, 0.1)
    h = SpaceTimeFunction(g, w, rng.standard_normal((8, 4)) + 0j)
    back = io.load_spacetime(io.save_spacetime(tmp_path / "h.npz", h))
    assert back.window == w and np.array_equal(back.coeffs, h.coeffs)


def test_csv_and_json_are_stable(tmp_path):
    rows = [[0.1, 2, True], [1 / 3, -4, False]]
    a = io.write_csv(tmp_path / "a.csv", ["x", "k", "flag"], rows).read_bytes()
    assert a == b"x,k,flag\n0.10000000000000001,2,1\n0.33333333333333331,-4,0\n"
    header, body = io.read_csv(tmp_path / "a.csv")
    assert header == ["x", "k", "flag"] and float(body[1][0]) == 1 / 3
    j = io.write_json(tmp_path / "r.json", {"b": np.float64(1.5), "a": [np.int64(2)]}).read_text()
    assert j == '{\n  "a": [\n    2\n  ],\n  "b": 1.5\n}\n'
