import numpy as np
import pytest

from sdebye.profiles import initial_profile
from sdebye.torus import forward, lebesgue_norm, make_grid


def test_zero_profile():
    u, v = initial_profile("zero", make_grid(2, 8))
    assert not np.any(u.values) and not np.any(v.values)
    _, v = initial_profile("zero", make_grid(1, 8), v_level=2.0)
    assert np.all(v.values == 2.0)


def test_single_mode():
    g = make_grid(1, 16)
    u, v = initial_profile("single_mode", g, xi=1, amplitude=0.1)
    uhat = forward(u).coeffs
    assert uhat[g.M // 2 + 1] == pytest.approx(0.1)
    uhat[g.M // 2 + 1] = 0
    assert np.max(np.abs(uhat)) < 1e-15
    assert not np.any(v.values)


def test_random_bandlimited_is_deterministic():
    g = make_grid(2, 16)
    a = initial_profile("random_bandlimited", g, seed=7, decay=1.5)
    b = initial_profile("random_bandlimited", g, seed=7, decay=1.5)
    c = initial_profile("random_bandlimited", g, seed=8, decay=1.5)
    assert np.array_equal(a[0].values, b[0].values) and np.array_equal(a[1].values, b[1].values)
    assert not np.array_equal(a[0].values, c[0].values)
    assert lebesgue_norm(2, a[0]) == pytest.approx(1.0)
    assert a[1].is_real


def test_random_bandlimited_band():
    g = make_grid(1, 32)
    u, _ = initial_profile("random_bandlimited", g, seed=1, band=4)
    uhat = forward(u).coeffs
    assert np.max(np.abs(uhat[np.abs(g.axis_frequencies) > 4])) < 1e-15


def test_gaussian_bump_is_real_and_peaked():
    g = make_grid(1, 64)
    u, v = initial_profile("gaussian_bump", g, width=0.05, amplitude=2.0)
    assert np.max(np.abs(u.values.imag)) < 1e-14
    assert np.argmax(v.values) == 32
    # periodised Gaussian peak: amplitude * sum_k exp(-k^2 / (2 w^2)) = amplitude to round-off
    assert v.values[32] == pytest.approx(2.0, rel=1e-12)


def test_unknown_profile():
    with pytest.raises(ValueError):
        initial_profile("sawtooth", make_grid(1, 8))
