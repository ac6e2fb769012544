"""Bourgain-space norms on truncated space-time lattices.

Brackets follow ``<x> = 1 + |x|`` and lambda sums carry the grid weight
``dlam``, so for every ``b`` the ``X^{0,0}`` norm is the space-time L2 norm.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spacetime import SpaceTimeFunction, psi_bump
from .torus import bracket

__all__ = [
    "ShellIndex",
    "xsb_norm",
    "dyadic_label",
    "shell_labels",
    "shell_mask",
    "shell_restrict",
    "shells",
    "triple_norm",
    "dyadic_piece",
    "dyadic_scales",
    "cutoff_scaling_ratio",
    "l4_embedding_ratio",
]


def xsb_norm(h: SpaceTimeFunction, s: float, b: float) -> float:
    spec = h.spectrum()
    w = bracket(h.grid.xi_abs) ** (2 * s) * bracket(h.modulation()) ** (2 * b)
    return float(np.sqrt(np.sum(w * np.abs(spec) ** 2) * h.window.dlam))


def dyadic_label(x):
    """0 on [0, 1); otherwise the power of two ``L`` with ``L <= x < 2L``."""
    x = np.abs(np.asarray(x, dtype=float))
    _, e = np.frexp(np.where(x >= 1, x, 1.0))
    out = np.where(x >= 1, np.ldexp(1.0, e - 1), 0.0)
    return out if out.ndim else float(out)


@dataclass(frozen=True, order=True)
class ShellIndex:
    """Dyadic block ``N <= |xi| < 2N``, ``A <= |lam - |xi|^2| < 2A`` (0 = unit cell)."""

    A: float
    N: float

    def __post_init__(self):
        for name, val in (("A", self.A), ("N", self.N)):
            if val != 0 and dyadic_label(val) != val:
                raise ValueError(f"{name} must be 0 or a power of two, got {val}")


def shell_labels(h: SpaceTimeFunction) -> tuple[np.ndarray, np.ndarray]:
    """Per-entry (A, N) labels on the spectrum array of ``h``."""
    A = dyadic_label(h.modulation())
    N = np.broadcast_to(dyadic_label(h.grid.xi_abs), A.shape)
    return A, N


def shell_mask(h: SpaceTimeFunction, shell: ShellIndex) -> np.ndarray:
    """Boolean mask of the spectrum entries of ``h`` lying in ``shell``."""
    A, N = shell_labels(h)
    return (A == shell.A) & (N == shell.N)


def shell_restrict(h: SpaceTimeFunction, shell: ShellIndex) -> SpaceTimeFunction:
    keep = shell_mask(h, shell)
    return SpaceTimeFunction.from_spectrum(h.grid, h.window, np.where(keep, h.spectrum(), 0.0))


def shells(h: SpaceTimeFunction) -> list[ShellIndex]:
    """All shells meeting the lattice of ``h``, in sorted order."""
    A, N = shell_labels(h)
    pairs = np.unique(np.stack([A.ravel(), N.ravel()], axis=1), axis=0)
    return [ShellIndex(float(a), float(n)) for a, n in pairs]


def triple_norm(h: SpaceTimeFunction, s: float) -> float:
    """``sup_{A,N} (A+1)^{1/2} (N+1)^s (sum_{shell} |hhat|^2 dlam)^{1/2}``."""
    A, N = shell_labels(h)
    mass = np.abs(h.spectrum()) ** 2 * h.window.dlam
    keys = np.stack([A.ravel(), N.ravel()], axis=1)
    uniq, inv = np.unique(keys, axis=0, return_inverse=True)
    totals = np.bincount(inv.ravel(), weights=mass.ravel(), minlength=len(uniq))
    weights = np.sqrt(uniq[:, 0] + 1) * (uniq[:, 1] + 1) ** s
    return float(np.max(weights * np.sqrt(totals), initial=0.0))


def dyadic_scales(h: SpaceTimeFunction) -> list[int]:
    """Dyadic ``M = 1, 2, 4, ...`` up to the first one covering every mode of ``h``."""
    top = float(h.grid.xi_abs.max())
    scales = [1]
    while scales[-1] < top:
        scales.append(2 * scales[-1])
    return scales


def dyadic_piece(h: SpaceTimeFunction, M: int) -> SpaceTimeFunction:
    """Frequency piece ``M/2 < |xi| <= M`` (all ``|xi| <= 1`` when ``M = 1``)."""
    if M < 1 or dyadic_label(M) != M:
        raise ValueError(f"M must be a power of two >= 1, got {M}")
    r = h.grid.xi_abs
    keep = r <= M if M == 1 else (r > M / 2) & (r <= M)
    return SpaceTimeFunction(h.grid, h.window, h.coeffs * keep)


def cutoff_scaling_ratio(h: SpaceTimeFunction, T: float, s: float, b: float, b_prime: float) -> float:
    """``||psi_T h||_{X^{s,b'}} / (T^{b-b'} ||h||_{X^{s,b}})`` with ``psi_T(t) = psi(t/T)``."""
    if not 0 < T < 1:
        raise ValueError(f"need 0 < T < 1, got {T}")
    if not -0.5 < b_prime <= b < 0.5:
        raise ValueError(f"need -1/2 < b' <= b < 1/2, got b={b}, b'={b_prime}")
    if 2 * T > h.window.length / 2:
        raise ValueError("cutoff support exceeds the time window")
    denom = xsb_norm(h, s, b)
    if denom == 0:
        return 0.0
    cut = h.time_multiply(psi_bump(h.window.times / T))
    return xsb_norm(cut, s, b_prime) / (T ** (b - b_prime) * denom)


def _padded_values(h: SpaceTimeFunction, factor: int = 2) -> np.ndarray:
    """Physical samples of ``h`` on a grid refined ``factor`` times in x and t."""
    spec = h.spectrum()
    Nt, M = spec.shape[0], h.grid.M
    big = np.zeros((factor * Nt, factor * M), complex)
    t0, x0 = (factor * Nt - Nt) // 2, (factor * M - M) // 2
    big[t0:t0 + Nt, x0:x0 + M] = spec
    # one full period in both variables; sample order is irrelevant for means
    vals = np.fft.ifft2(np.fft.ifftshift(big))
    return vals * (factor * M) * (factor * Nt) * h.window.dlam


def l4_embedding_ratio(h: SpaceTimeFunction) -> float:
    """``||h||_{L^4(T x [0,1])} / ||h||_{X^{0,3/8}}`` on a unit-length window.

    The window must have length 1, so it is exactly one time period; the L4
    integral is evaluated without aliasing on a twice-refined grid.
    """
    if h.grid.dim != 1:
        raise ValueError("the L4 embedding check is one-dimensional")
    if h.window.length != 1:
        raise ValueError("the L4 embedding check needs a window of length 1")
    denom = xsb_norm(h, 0.0, 3 / 8)
    if denom == 0:
        raise ZeroDivisionError("zero function has no embedding ratio")
    vals = _padded_values(h)
    return float(np.mean(np.abs(vals) ** 4) ** 0.25 / denom)
