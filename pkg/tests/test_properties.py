import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from sdebye.propagators import ModelParams, SimState, strang_step
from sdebye.strichartz import brute_force_solution_count, eisenstein_solution_count
from sdebye.torus import Field, Spectrum, dealias, forward, inverse, lebesgue_norm, make_grid, sobolev_norm

G = make_grid(1, 16)
floats = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
samples = arrays(np.float64, 16, elements=floats)


@given(samples, samples)
def test_round_trip(re, im):
    f = Field(G, re + 1j * im)
    assert np.allclose(inverse(forward(f)).values, f.values, atol=1e-11)


@given(samples, samples)
def test_plancherel(re, im):
    f = Field(G, re + 1j * im)
    assert np.isclose(sobolev_norm(0, forward(f)), lebesgue_norm(2, f), rtol=1e-10, atol=1e-12)


@given(samples)
def test_dealias_idempotent(re):
    fhat = forward(Field(G, re))
    once = dealias(fhat)
    assert np.array_equal(dealias(once).coeffs, once.coeffs)


@settings(max_examples=40, deadline=None)
@given(samples, samples, arrays(np.float64, 16, elements=st.floats(-3, 3)), st.sampled_from([1, -1]),
       st.floats(1e-3, 0.1))
def test_strang_step_keeps_l2(re, im, v, eps, dt):
    u = Field(G, (re + 1j * im) / 10)
    out = strang_step(SimState(0.0, u, Field(G, v), ModelParams(1.0, eps, 2.0)), dt)
    assert np.isclose(lebesgue_norm(2, out.u), lebesgue_norm(2, u), rtol=1e-12, atol=1e-14)


@given(st.integers(0, 10**6))
def test_eisenstein_matches_scan(A):
    assert eisenstein_solution_count(A) == brute_force_solution_count(A)
