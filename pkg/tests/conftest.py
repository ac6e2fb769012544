import numpy as np
import pytest

from sdebye.torus import Field, Spectrum, make_grid


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_field(grid, rng, real=False):
    vals = rng.standard_normal(grid.shape)
    if not real:
        vals = vals + 1j * rng.standard_normal(grid.shape)
    return Field(grid, vals)


def mode_spectrum(grid, xi, value=1.0):
    coeffs = np.zeros(grid.shape, complex)
    coeffs[tuple(np.broadcast_to(np.atleast_1d(xi), (grid.dim,)) + grid.M // 2)] = value
    return Spectrum(grid, coeffs)


@pytest.fixture
def line64():
    return make_grid(1, 64)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(RESULTS):
        ok, detail = RESULTS[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")
