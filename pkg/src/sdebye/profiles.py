"""Named initial data on a torus grid."""
from __future__ import annotations

import numpy as np

from .torus import Field, Spectrum, TorusGrid, inverse, sobolev_norm

__all__ = ["PROFILES", "initial_profile"]

PROFILES = ("zero", "single_mode", "gaussian_bump", "random_bandlimited")


def _zero(grid, v_level=0.0):
    return Field(grid, np.zeros(grid.shape, complex)), Field(grid, np.full(grid.shape, float(v_level)))


def _single_mode(grid, xi=1, amplitude=1.0):
    coeffs = np.zeros(grid.shape, complex)
    idx = tuple(np.broadcast_to(np.atleast_1d(xi), (grid.dim,)) + grid.M // 2)
    coeffs[idx] = amplitude
    return inverse(Spectrum(grid, coeffs)), Field(grid, np.zeros(grid.shape))


def _gaussian_bump(grid, width=0.1, amplitude=1.0, center=0.5):
    # periodised Gaussian, built from its exact Fourier series
    xi = grid.frequencies
    c = np.broadcast_to(np.atleast_1d(center), (grid.dim,))
    coeffs = np.ones(grid.shape, complex)
    for k, cj in zip(xi, c):
        coeffs = coeffs * (
            np.sqrt(2 * np.pi) * width * np.exp(-2 * (np.pi * width * k) ** 2)
            * np.exp(-2j * np.pi * k * cj)
        )
    bump = inverse(Spectrum(grid, coeffs)).values.real
    bump = amplitude * bump
    return Field(grid, bump.astype(complex)), Field(grid, bump.copy())


def _random_bandlimited(grid, seed=0, band=None, decay=1.0, amplitude=1.0):
    rng = np.random.default_rng(seed)
    band = grid.M // 3 if band is None else band
    weight = np.where(
        np.all([np.abs(k) <= band for k in grid.frequencies], axis=0),
        (1.0 + grid.xi_abs) ** (-decay),
        0.0,
    )
    uc = (rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)) * weight
    vc = (rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)) * weight
    u = inverse(Spectrum(grid, uc)).values
    v = inverse(Spectrum(grid, vc)).values.real
    norm = sobolev_norm(0, Spectrum(grid, uc)) or 1.0
    return Field(grid, amplitude * u / norm), Field(grid, amplitude * v / norm)


def initial_profile(name: str, grid: TorusGrid, **params) -> tuple[Field, Field]:
    """Return ``(u0, v0)`` for a named profile.

    * ``zero(v_level)``: ``u0 = 0`` and ``v0`` the constant ``v_level`` (default 0).
    * ``single_mode(xi, amplitude)``: ``u0hat(xi) = amplitude``, ``v0 = 0``.
    * ``gaussian_bump(width, amplitude, center)``: periodised Gaussian of peak
      height about ``amplitude`` for both fields.
    * ``random_bandlimited(seed, band, decay, amplitude)``: random modes with
      ``|xi_j| <= band`` and weights ``<xi>^-decay``; ``u0`` has L2 norm
      ``amplitude``.  Same seed, same fields.
    """
    builders = {
        "zero": _zero,
        "single_mode": _single_mode,
        "gaussian_bump": _gaussian_bump,
        "random_bandlimited": _random_bandlimited,
    }
    try:
        build = builders[name]
    except KeyError:
        raise ValueError(f"unknown profile {name!r}; expected one of {PROFILES}") from None
    return build(grid, **params)
