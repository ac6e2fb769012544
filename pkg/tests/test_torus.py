import numpy as np
import pytest

from conftest import mode_spectrum, random_field
from sdebye.torus import (
    Field,
    Spectrum,
    dealias,
    fourier_transform,
    forward,
    inverse,
    lebesgue_norm,
    make_grid,
    sobolev_norm,
)


def test_centered_lattice_1d():
    g = make_grid(1, 4)
    assert g.axis_frequencies.tolist() == [-2, -1, 0, 1]
    assert g.mode_lattice.ravel().tolist() == [-2, -1, 0, 1]


def test_product_lattice_2d():
    g = make_grid(2, 4)
    lat = g.mode_lattice.reshape(-1, 2)
    assert len(lat) == 16
    assert set(lat.ravel().tolist()) == {-2, -1, 0, 1}
    # row-major: last axis varies fastest
    assert lat[:3].tolist() == [[-2, -2], [-2, -1], [-2, 0]]


@pytest.mark.parametrize("n, M", [(1, 3), (0, 8), (4, 8), (1, 2), (1, 2048)])
def test_grid_rejects_bad_sizes(n, M):
    with pytest.raises(ValueError):
        make_grid(n, M)


def test_constant_has_only_zero_mode():
    g = make_grid(2, 8)
    fhat = forward(Field(g, np.ones(g.shape)))
    assert fhat.at((0, 0)) == pytest.approx(1.0)
    assert np.sum(np.abs(fhat.coeffs)) == pytest.approx(1.0)


def test_single_mode_transform(line64):
    x = line64.points[0]
    fhat = fourier_transform(Field(line64, np.exp(2j * np.pi * x)))
    assert fhat.at(1) == pytest.approx(1.0)
    fhat.coeffs[line64.M // 2 + 1] = 0
    assert np.max(np.abs(fhat.coeffs)) < 1e-14


@pytest.mark.parametrize("n, M", [(1, 16), (2, 8), (3, 6)])
def test_round_trip(n, M, rng):
    f = random_field(make_grid(n, M), rng)
    back = fourier_transform(fourier_transform(f), "inverse")
    assert np.max(np.abs(back.values - f.values)) < 1e-12


def test_transform_size_mismatch():
    g = make_grid(1, 8)
    with pytest.raises(ValueError):
        Field(g, np.ones(7))
    with pytest.raises(ValueError):
        fourier_transform(Field(g, np.ones(8)), "sideways")


def test_inverse_real_flag(line64, rng):
    f = random_field(line64, rng, real=True)
    back = inverse(forward(f), real=True)
    assert back.is_real


def test_sobolev_examples():
    g = make_grid(1, 16)
    assert sobolev_norm(2.5, mode_spectrum(g, 0)) == 1.0
    assert sobolev_norm(1, mode_spectrum(g, 3)) == pytest.approx(4.0)
    with pytest.raises(ValueError):
        sobolev_norm(-0.5, mode_spectrum(g, 0))


def test_sobolev_zero_is_plancherel(rng):
    g = make_grid(2, 16)
    f = random_field(g, rng)
    assert sobolev_norm(0, forward(f)) == pytest.approx(lebesgue_norm(2, f), rel=1e-10)


@pytest.mark.parametrize("p", [1, 2, 3.5, 4, np.inf])
def test_lebesgue_constant(p):
    g = make_grid(2, 8)
    assert lebesgue_norm(p, Field(g, np.full(g.shape, -2.5 + 0j))) == pytest.approx(2.5)


def test_lebesgue_unimodular(line64):
    x = line64.points[0]
    assert lebesgue_norm(4, Field(line64, np.exp(2j * np.pi * x))) == pytest.approx(1.0)


def test_lebesgue_two_modes():
    # |1 + e(x)|^4 integrates to the number of solutions of a+b = c+d in {0,1}: 6
    g = make_grid(1, 8)
    x = g.points[0]
    f = Field(g, 1 + np.exp(2j * np.pi * x))
    assert lebesgue_norm(4, f) == pytest.approx(6 ** 0.25, rel=1e-14)


def test_lebesgue_rejects_small_p(line64):
    with pytest.raises(ValueError):
        lebesgue_norm(0.5, Field(line64, np.ones(64)))


def test_dealias_examples(rng):
    g = make_grid(1, 12)
    assert np.all(dealias(mode_spectrum(g, 5)).coeffs == 0)
    assert dealias(mode_spectrum(g, 3)).at(3) == 1
    assert dealias(mode_spectrum(g, -4)).at(-4) == 1
    fhat = forward(random_field(make_grid(2, 12), rng))
    once = dealias(fhat)
    assert np.array_equal(dealias(once).coeffs, once.coeffs)
    with pytest.raises(ValueError):
        dealias(fhat, rule="three-halves")


def test_spectrum_arithmetic():
    g = make_grid(1, 8)
    a, b = mode_spectrum(g, 1), mode_spectrum(g, -1, 2.0)
    assert (a + b).at(-1) == 2.0
    assert (2 * a - b).at(1) == 2.0
