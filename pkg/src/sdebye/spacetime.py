"""Space-time functions on ``T^n x [-L/2, L/2)`` with a periodic time window.

A :class:`SpaceTimeFunction` stores spatial Fourier coefficients at each time
sample, ``coeffs[j, ...] = uhat(xi, t_j)``.  Its space-time spectrum uses the
continuous-transform normalisation in time::

    hhat(xi, lam_k) = sum_j uhat(xi, t_j) exp(-2 pi i lam_k t_j) dt
    u(x, t)         = sum_xi sum_k hhat(xi, lam_k) exp(2 pi i (x.xi + lam_k t)) dlam

with ``t_j = (j - N/2) dt``, ``lam_k = (k - N/2)/L``, ``dt = L/N`` and
``dlam = 1/L``.  Plancherel: ``sum |hhat|^2 dlam = int |u|^2 dx dt``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .torus import Spectrum, TorusGrid, forward_array, inverse_array

__all__ = ["TimeWindow", "SpaceTimeFunction", "smooth_step", "psi_local", "psi_bump"]


@dataclass(frozen=True)
class TimeWindow:
    length: float = 4.0
    samples: int = 256
    delta: float = 0.05

    def __post_init__(self):
        if not self.length > 0:
            raise ValueError("window length must be positive")
        if self.samples < 2 or self.samples % 2:
            raise ValueError(f"sample count must be even, got {self.samples}")
        if not self.delta > 0 or not 4 * self.delta < self.length:
            raise ValueError(
                f"need 0 < 4*delta < length, got delta={self.delta}, length={self.length}"
            )

    @property
    def dt(self) -> float:
        return self.length / self.samples

    @property
    def dlam(self) -> float:
        return 1.0 / self.length

    @cached_property
    def times(self) -> np.ndarray:
        return (np.arange(self.samples) - self.samples // 2) * self.dt

    @cached_property
    def frequencies(self) -> np.ndarray:
        return (np.arange(self.samples) - self.samples // 2) * self.dlam

    @property
    def origin(self) -> int:
        """Index of the sample at ``t = 0``."""
        return self.samples // 2


def _time_forward(a: np.ndarray, window: TimeWindow) -> np.ndarray:
    return np.fft.fftshift(np.fft.fft(np.fft.ifftshift(a, axes=0), axis=0), axes=0) * window.dt


def _time_inverse(a: np.ndarray, window: TimeWindow) -> np.ndarray:
    return np.fft.fftshift(np.fft.ifft(np.fft.ifftshift(a, axes=0), axis=0), axes=0) / window.dt


@dataclass(frozen=True, eq=False)
class SpaceTimeFunction:
    grid: TorusGrid
    window: TimeWindow
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        shape = (self.window.samples,) + self.grid.shape
        if c.size != np.prod(shape):
            raise ValueError(f"expected {shape} coefficients, got {c.shape}")
        object.__setattr__(self, "coeffs", c.reshape(shape))

    # constructors -------------------------------------------------------

    @classmethod
    def zeros(cls, grid, window):
        return cls(grid, window, np.zeros((window.samples,) + grid.shape, complex))

    @classmethod
    def from_values(cls, grid, window, values):
        """From physical samples ``u(t_j, x)`` of shape ``(N_t, *grid.shape)``."""
        return cls(grid, window, forward_array(np.asarray(values), grid))

    @classmethod
    def from_spectrum(cls, grid, window, spectrum):
        """From ``hhat(lam, xi)`` of shape ``(N_t, *grid.shape)``."""
        return cls(grid, window, _time_inverse(np.asarray(spectrum, complex), window))

    @classmethod
    def atom(cls, grid, window, xi, lam, weight=1.0):
        """Single space-time frequency with ``sum |hhat|^2 dlam = |weight|^2``."""
        spec = np.zeros((window.samples,) + grid.shape, complex)
        k = int(round(lam / window.dlam)) + window.samples // 2
        if not 0 <= k < window.samples or abs((k - window.samples // 2) * window.dlam - lam) > 1e-12:
            raise ValueError(f"lambda={lam} is not on the window's frequency grid")
        idx = (k,) + tuple(np.broadcast_to(np.atleast_1d(xi), (grid.dim,)) + grid.M // 2)
        spec[idx] = weight / np.sqrt(window.dlam)
        return cls.from_spectrum(grid, window, spec)

    @classmethod
    def free_wave(cls, u0: Spectrum, window):
        """``U(t) u0`` sampled on the whole window."""
        phase = np.exp(2j * np.pi * np.multiply.outer(window.times, u0.grid.xi_squared))
        return cls(u0.grid, window, phase * u0.coeffs)

    # representations ----------------------------------------------------

    def values(self) -> np.ndarray:
        return inverse_array(self.coeffs, self.grid)

    def spectrum(self) -> np.ndarray:
        return _time_forward(self.coeffs, self.window)

    def at_time(self, j: int) -> Spectrum:
        return Spectrum(self.grid, self.coeffs[j])

    def modulation(self) -> np.ndarray:
        """``lam - |xi|^2`` on the spectrum array."""
        return np.subtract.outer(self.window.frequencies, self.grid.xi_squared)

    def l2_norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.coeffs) ** 2) * self.window.dt))

    def __add__(self, other):
        return SpaceTimeFunction(self.grid, self.window, self.coeffs + other.coeffs)

    def __radd__(self, other):
        if isinstance(other, (int, float)) and other == 0:
            return self
        return NotImplemented

    def __sub__(self, other):
        return SpaceTimeFunction(self.grid, self.window, self.coeffs - other.coeffs)

    def __mul__(self, c):
        return SpaceTimeFunction(self.grid, self.window, self.coeffs * c)

    __rmul__ = __mul__

    def time_multiply(self, g: np.ndarray) -> "SpaceTimeFunction":
        """Pointwise product with a function of time sampled on the window."""
        g = np.asarray(g).reshape((-1,) + (1,) * self.grid.dim)
        return SpaceTimeFunction(self.grid, self.window, self.coeffs * g)


# -- smooth cutoffs -------------------------------------------------------------


def smooth_step(x):
    """C-infinity step: 0 for x <= 0, 1 for x >= 1, built from exp(-1/x)."""
    x = np.asarray(x, dtype=float)

    def f(y):
        ys = np.where(y > 0, y, 1.0)
        return np.where(y > 0, np.exp(-1.0 / ys), 0.0)

    a, b = f(x), f(1.0 - x)
    out = a / np.where(a + b > 0, a + b, 1.0)
    out = np.where(x >= 1, 1.0, np.where(x <= 0, 0.0, out))
    return out if out.ndim else float(out)


def psi_local(t, delta):
    """Cutoff equal to 1 on [0, delta] and supported in [-2 delta, 2 delta]."""
    t = np.asarray(t, dtype=float)
    rise = smooth_step((t + 2 * delta) / (2 * delta))
    fall = smooth_step((2 * delta - t) / delta)
    out = np.where(t < 0, rise, np.where(t > delta, fall, 1.0))
    return out if out.ndim else float(out)


def psi_bump(x):
    """Even cutoff equal to 1 on [-1, 1] and supported in [-2, 2]."""
    out = smooth_step(2.0 - np.abs(np.asarray(x, dtype=float)))
    return out
