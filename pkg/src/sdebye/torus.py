"""Grids, fields and Fourier spectra on the unit torus T^n.

Fourier convention: ``f(x) = sum_xi fhat(xi) exp(2 pi i <x, xi>)`` with the
forward transform normalised by ``1/M^n``, so coefficients are true Fourier
coefficients and Plancherel reads ``sum |fhat|^2 = mean |f|^2``.

Arrays carry one axis per spatial dimension.  Modes are stored in centered
(row-major) order: along each axis the frequencies run ``-M/2, ..., M/2 - 1``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

__all__ = [
    "TorusGrid",
    "Field",
    "Spectrum",
    "make_grid",
    "fourier_transform",
    "forward",
    "inverse",
    "bracket",
    "sobolev_norm",
    "lebesgue_norm",
    "dealias",
    "dealias_mask",
]


@dataclass(frozen=True)
class TorusGrid:
    """Uniform grid with ``M`` points per axis on the unit torus ``T^dim``."""

    dim: int
    modes_per_axis: int

    def __post_init__(self):
        if self.dim not in (1, 2, 3):
            raise ValueError(f"dimension must be 1, 2 or 3, got {self.dim}")
        M = self.modes_per_axis
        if int(M) != M or M % 2 or not 4 <= M <= 1024:
            raise ValueError(f"modes per axis must be an even integer in [4, 1024], got {M}")

    @property
    def M(self) -> int:
        return self.modes_per_axis

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.M,) * self.dim

    @property
    def point_count(self) -> int:
        return self.M**self.dim

    @property
    def spacing(self) -> float:
        return 1.0 / self.M

    @cached_property
    def axis_frequencies(self) -> np.ndarray:
        return np.arange(-self.M // 2, self.M // 2)

    @cached_property
    def frequencies(self) -> tuple[np.ndarray, ...]:
        """Per-axis integer frequency arrays broadcast to ``shape``."""
        return tuple(np.meshgrid(*([self.axis_frequencies] * self.dim), indexing="ij"))

    @cached_property
    def mode_lattice(self) -> np.ndarray:
        """``(M^n, n)`` integer array of modes in canonical order."""
        return np.stack([k.ravel() for k in self.frequencies], axis=1)

    @cached_property
    def xi_squared(self) -> np.ndarray:
        """``|xi|^2`` on the mode array (exact integers)."""
        return sum(k.astype(np.int64) ** 2 for k in self.frequencies)

    @cached_property
    def xi_abs(self) -> np.ndarray:
        return np.sqrt(self.xi_squared)

    @cached_property
    def points(self) -> tuple[np.ndarray, ...]:
        x = np.arange(self.M) / self.M
        return tuple(np.meshgrid(*([x] * self.dim), indexing="ij"))


def make_grid(n: int, M: int) -> TorusGrid:
    return TorusGrid(int(n), int(M))


@dataclass(frozen=True, eq=False)
class Field:
    """Samples of a function on the grid (physical space)."""

    grid: TorusGrid
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values)
        if values.size != self.grid.point_count:
            raise ValueError(
                f"field has {values.size} samples, grid expects {self.grid.point_count}"
            )
        object.__setattr__(self, "values", values.reshape(self.grid.shape))

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.values)

    def real(self, atol: float = 1e-12) -> "Field":
        """Return a real-valued copy; raise if the imaginary part exceeds ``atol``."""
        if self.is_real:
            return self
        imag = np.max(np.abs(self.values.imag), initial=0.0)
        if imag > atol:
            raise ValueError(f"field is not real: max |imag| = {imag:.3e}")
        return Field(self.grid, self.values.real.copy())

    def __add__(self, other: "Field") -> "Field":
        return Field(self.grid, self.values + other.values)

    def __sub__(self, other: "Field") -> "Field":
        return Field(self.grid, self.values - other.values)

    def __mul__(self, c) -> "Field":
        return Field(self.grid, self.values * c)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Fourier coefficients ``fhat(xi)`` in canonical centered order."""

    grid: TorusGrid
    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=complex)
        if coeffs.size != self.grid.point_count:
            raise ValueError(
                f"spectrum has {coeffs.size} coefficients, grid expects {self.grid.point_count}"
            )
        object.__setattr__(self, "coeffs", coeffs.reshape(self.grid.shape))

    def at(self, xi) -> complex:
        """Coefficient at integer mode ``xi`` (tuple or int)."""
        idx = tuple(np.atleast_1d(xi) + self.grid.M // 2)
        return complex(self.coeffs[idx])

    def __add__(self, other: "Spectrum") -> "Spectrum":
        return Spectrum(self.grid, self.coeffs + other.coeffs)

    def __sub__(self, other: "Spectrum") -> "Spectrum":
        return Spectrum(self.grid, self.coeffs - other.coeffs)

    def __mul__(self, c) -> "Spectrum":
        return Spectrum(self.grid, self.coeffs * c)

    __rmul__ = __mul__


def _axes(grid: TorusGrid) -> tuple[int, ...]:
    return tuple(range(-grid.dim, 0))


def forward_array(values: np.ndarray, grid: TorusGrid) -> np.ndarray:
    """Centered, normalised forward DFT over the trailing ``grid.dim`` axes."""
    axes = _axes(grid)
    return np.fft.fftshift(np.fft.fftn(values, axes=axes), axes=axes) / grid.point_count


def inverse_array(coeffs: np.ndarray, grid: TorusGrid) -> np.ndarray:
    axes = _axes(grid)
    return np.fft.ifftn(np.fft.ifftshift(coeffs, axes=axes), axes=axes) * grid.point_count


def forward(f: Field) -> Spectrum:
    return Spectrum(f.grid, forward_array(f.values, f.grid))


def inverse(fhat: Spectrum, real: bool = False) -> Field:
    values = inverse_array(fhat.coeffs, fhat.grid)
    field = Field(fhat.grid, values)
    return field.real() if real else field


def fourier_transform(f, direction: str = "forward"):
    """Dispatch on ``direction`` ('forward' takes a Field, 'inverse' a Spectrum)."""
    if direction == "forward":
        if not isinstance(f, Field):
            raise TypeError("forward transform expects a Field")
        return forward(f)
    if direction == "inverse":
        if not isinstance(f, Spectrum):
            raise TypeError("inverse transform expects a Spectrum")
        return inverse(f)
    raise ValueError(f"unknown direction {direction!r}")


def bracket(x):
    """Japanese bracket with the convention <x> = 1 + |x|."""
    return 1.0 + np.abs(x)


def sobolev_norm(s: float, fhat: Spectrum) -> float:
    """``(sum_xi <xi>^{2s} |fhat(xi)|^2)^{1/2}``."""
    if s < 0:
        raise ValueError(f"Sobolev index must be non-negative, got {s}")
    weights = bracket(fhat.grid.xi_abs) ** (2 * s)
    return float(np.sqrt(np.sum(weights * np.abs(fhat.coeffs) ** 2)))


def lebesgue_norm(p: float, f: Field) -> float:
    """Grid quadrature of the ``L^p`` norm for the unit (probability) measure."""
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    a = np.abs(f.values)
    if np.isinf(p):
        return float(a.max())
    if p == 2:
        return float(np.sqrt(np.mean(a * a)))
    return float(np.mean(a**p) ** (1.0 / p))


def dealias_mask(grid: TorusGrid) -> np.ndarray:
    """Boolean mask of modes kept by the two-thirds rule (every |xi_j| <= M/3)."""
    keep = np.abs(grid.axis_frequencies) <= grid.M / 3
    mask = keep
    for _ in range(grid.dim - 1):
        mask = np.multiply.outer(mask, keep)
    return mask


def dealias(fhat: Spectrum, rule: str = "two-thirds") -> Spectrum:
    if rule != "two-thirds":
        raise ValueError(f"unknown dealiasing rule {rule!r}")
    return Spectrum(fhat.grid, np.where(dealias_mask(fhat.grid), fhat.coeffs, 0.0))
