import numpy as np
import pytest

from sdebye.spacetime import SpaceTimeFunction, TimeWindow
from sdebye.torus import make_grid
from sdebye.xsb import (
    ShellIndex,
    cutoff_scaling_ratio,
    dyadic_label,
    dyadic_piece,
    dyadic_scales,
    l4_embedding_ratio,
    shell_mask,
    shell_restrict,
    shells,
    triple_norm,
    xsb_norm,
)

G = make_grid(1, 8)
W = TimeWindow(4.0, 256, 0.25)


def random_sparse(rng, k=10, grid=G, window=W):
    spec = np.zeros((window.samples,) + grid.shape, complex)
    for _ in range(k):
        idx = (rng.integers(window.samples),) + tuple(rng.integers(grid.M, size=grid.dim))
        spec[idx] = rng.standard_normal() + 1j * rng.standard_normal()
    return SpaceTimeFunction.from_spectrum(grid, window, spec)


@pytest.mark.parametrize("s, b", [(0, 0), (1, 0.5), (3, -0.7)])
def test_xsb_atoms(s, b):
    assert xsb_norm(SpaceTimeFunction.atom(G, W, 0, 0.0), s, b) == pytest.approx(1.0)
    assert xsb_norm(SpaceTimeFunction.atom(G, W, 1, 1.0), s, b) == pytest.approx(2.0**s)


def test_xsb_modulation_weight():
    assert xsb_norm(SpaceTimeFunction.atom(G, W, 0, 3.0), 0, 0.5) == pytest.approx(2.0)


def test_dyadic_label():
    assert dyadic_label(0.5) == 0 and dyadic_label(1.0) == 1 and dyadic_label(3.9) == 2
    assert dyadic_label(-5.0) == 4
    assert dyadic_label(np.array([0.0, 7.0, 8.0])).tolist() == [0.0, 4.0, 8.0]


def test_shell_index_validation():
    ShellIndex(4, 0)
    with pytest.raises(ValueError):
        ShellIndex(3, 1)


def test_shell_membership():
    atom = SpaceTimeFunction.atom(G, W, 3, 14.0)  # |xi| = 3, |lam - 9| = 5
    mass = {sh: shell_restrict(atom, sh).l2_norm() for sh in shells(atom)}
    assert mass[ShellIndex(4, 2)] == pytest.approx(1.0)
    assert sum(mass.values()) == pytest.approx(1.0)


def test_shell_partition(rng):
    h = random_sparse(rng, k=40)
    masks = [shell_mask(h, sh) for sh in shells(h)]
    assert np.array_equal(np.sum(masks, axis=0), np.ones(h.spectrum().shape, int))
    spec = h.spectrum()
    assert np.array_equal(sum(np.where(m, spec, 0) for m in masks), spec)
    total = sum(shell_restrict(h, sh) for sh in shells(h))
    assert np.allclose(total.coeffs, h.coeffs, atol=1e-13)
    unit = shell_restrict(h, ShellIndex(0, 0))
    spec = unit.spectrum()
    mu = np.abs(h.modulation())
    keep = (np.abs(G.xi_abs) < 1) & (mu < 1)
    assert np.allclose(spec, np.where(keep, h.spectrum(), 0))


def test_triple_norm_examples():
    assert triple_norm(SpaceTimeFunction.atom(G, W, 0, 0.0), 2.0) == pytest.approx(1.0)
    assert triple_norm(SpaceTimeFunction.atom(G, W, 2, 4.0), 1.0) == pytest.approx(3.0)


def test_triple_below_xsb(rng):
    for _ in range(50):
        h = random_sparse(rng)
        s = rng.uniform(0, 2)
        assert triple_norm(h, s) <= xsb_norm(h, s, 0.5)


def test_dyadic_pieces(rng):
    h = random_sparse(rng, k=30)
    assert np.any(dyadic_piece(SpaceTimeFunction.atom(G, W, 3, 9.0), 4).coeffs)
    assert not np.any(dyadic_piece(SpaceTimeFunction.atom(G, W, 3, 9.0), 2).coeffs)
    assert np.any(dyadic_piece(SpaceTimeFunction.atom(G, W, 0, 0.0), 1).coeffs)
    total = sum(dyadic_piece(h, M) for M in dyadic_scales(h))
    assert np.array_equal(total.coeffs, h.coeffs)
    with pytest.raises(ValueError):
        dyadic_piece(h, 3)


def test_cutoff_ratio_conventions():
    atom = SpaceTimeFunction.atom(G, W, 1, 1.0)
    assert cutoff_scaling_ratio(SpaceTimeFunction.zeros(G, W), 0.5, 0, 0.3, 0.1) == 0.0
    same = cutoff_scaling_ratio(atom, 0.25, 0, 0.3, 0.3)
    assert np.isfinite(same) and same > 0
    for bad in [dict(T=1.0, b=0.3, b_prime=0.1), dict(T=0.5, b=0.3, b_prime=0.4), dict(T=0.5, b=0.5, b_prime=0.1)]:
        with pytest.raises(ValueError):
            cutoff_scaling_ratio(atom, bad["T"], 0, bad["b"], bad["b_prime"])


def test_cutoff_ratio_bounded_in_T():
    atom = SpaceTimeFunction.atom(G, W, 1, 1.0)
    ratios = [cutoff_scaling_ratio(atom, 2.0**-k, 0, 0.25, 0.0) for k in range(1, 7)]
    assert max(ratios) < 1.0
    assert ratios[0] == pytest.approx(0.7049764949956766, rel=1e-9)


W1 = TimeWindow(1.0, 64, 0.05)


def test_l4_ratio_single_atom():
    assert l4_embedding_ratio(SpaceTimeFunction.atom(G, W1, 2, 4.0)) == pytest.approx(1.0, abs=1e-10)


def test_l4_ratio_three_modes():
    h = sum(SpaceTimeFunction.atom(G, W1, n, float(n * n)) for n in (-1, 0, 1))
    assert l4_embedding_ratio(h) == pytest.approx(15**0.25 / 3**0.5, rel=1e-12)


def test_l4_ratio_stable_under_refinement(rng):
    coarse = random_sparse(rng, k=8, window=W1)
    fine_grid, fine_win = make_grid(1, 16), TimeWindow(1.0, 128, 0.05)
    spec = np.zeros((128, 16), complex)
    spec[32:96, 4:12] = coarse.spectrum()
    fine = SpaceTimeFunction.from_spectrum(fine_grid, fine_win, spec)
    assert l4_embedding_ratio(fine) == pytest.approx(l4_embedding_ratio(coarse), rel=1e-10)


def test_l4_ratio_preconditions():
    with pytest.raises(ValueError):
        l4_embedding_ratio(SpaceTimeFunction.atom(G, W, 0, 0.0))
    with pytest.raises(ZeroDivisionError):
        l4_embedding_ratio(SpaceTimeFunction.zeros(G, W1))
