"""Duhamel fixed-point construction on a periodic time window.

The local solution is sought as a fixed point of

    Phi(u)(t) = psi_1(t) [ U(t) u0 - i int_0^t U(t - tau) w(tau) dtau ],

    w = u v,   v(t) = exp(-t/K) v0 + (eps/K) int_0^t exp(-(t-tau)/K) |u(tau)|^alpha dtau,

with ``U(t)`` the multiplier ``exp(2 pi i t |xi|^2)``.  Integrals run from the
sample at ``t = 0`` in both directions, so negative times use the same
formula with a reversed orientation.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .propagators import ModelParams, debye_source, relax_weights
from .spacetime import SpaceTimeFunction, TimeWindow, psi_bump, psi_local, _time_inverse
from .torus import Field, Spectrum, forward_array, inverse_array
from .xsb import xsb_norm

log = logging.getLogger(__name__)

__all__ = [
    "NoContraction",
    "PicardHistory",
    "Decomposition",
    "cutoff_psi",
    "nonlinear_w",
    "debye_potential",
    "duhamel_apply",
    "fixed_point_map",
    "picard_solve",
    "duhamel_exact",
    "duhamel_decompose",
    "probe_existence_time",
]


class NoContraction(RuntimeError):
    """Picard iteration stopped contracting (ratio >= 1 three times running)."""

    def __init__(self, ratios):
        self.ratios = list(ratios)
        trace = ", ".join(f"{r:.4g}" for r in self.ratios)
        super().__init__(f"no contraction; ratio trace: [{trace}]")


def cutoff_psi(kind: int, window: TimeWindow) -> np.ndarray:
    """Sample the time cutoff ``psi_1`` (kind 1) or the bump ``psi_2`` (kind 2) on the window."""
    half = window.length / 2
    if kind == 1:
        if 2 * window.delta > half:
            raise ValueError("support [-2 delta, 2 delta] exceeds the window")
        return psi_local(window.times, window.delta)
    if kind == 2:
        if 2 > half:
            raise ValueError("support [-2, 2] exceeds the window")
        return psi_bump(window.times)
    raise ValueError(f"kind must be 1 or 2, got {kind}")


# -- nonlinearity -------------------------------------------------------------


def _relax_from_origin(source: np.ndarray, window: TimeWindow, K: float, eps: int) -> np.ndarray:
    """Solve ``K y' + y = eps * source`` with ``y(0) = 0`` on every window sample.

    ``source`` has time on axis 0.  Steps use the exact integral of the
    linear interpolant, marching outward from ``t = 0`` in both directions.
    """
    y = np.zeros_like(source, dtype=float)
    j0 = window.origin
    for h, order in ((window.dt, range(j0, window.samples - 1)), (-window.dt, range(j0, 0, -1))):
        decay, c0, c1 = relax_weights(h, K)
        step = 1 if h > 0 else -1
        for j in order:
            s0, s1 = source[j], source[j + step]
            y[j + step] = decay * y[j] + eps * (c0 * s0 + c1 * (s1 - s0))
    return y


def debye_potential(u: SpaceTimeFunction, v0: Field, params: ModelParams) -> np.ndarray:
    """Physical samples of ``v(t, x)`` driven by ``u`` (time on axis 0)."""
    grid, window = u.grid, u.window
    uv = u.values()
    src = np.stack([debye_source(uv[j], params.alpha, grid) for j in range(window.samples)])
    decay = np.exp(-window.times / params.K).reshape((-1,) + (1,) * grid.dim)
    return decay * v0.real().values + _relax_from_origin(src, window, params.K, params.eps)


def nonlinear_w(u: SpaceTimeFunction, v0: Field, params: ModelParams) -> SpaceTimeFunction:
    """``w = F0(u) + F1(u) = u * v`` evaluated pointwise in physical space."""
    v = debye_potential(u, v0, params)
    return SpaceTimeFunction.from_values(u.grid, u.window, u.values() * v)


# -- Duhamel ------------------------------------------------------------------


def _cumulative_from_origin(g: np.ndarray, window: TimeWindow) -> np.ndarray:
    """``int_0^{t_j} g`` by the trapezoid rule on the samples (time on axis 0)."""
    j0, dt = window.origin, window.dt
    out = np.zeros_like(g)
    pieces = 0.5 * dt * (g[1:] + g[:-1])
    out[j0 + 1:] = np.cumsum(pieces[j0:], axis=0)
    out[:j0] = -np.cumsum(pieces[:j0][::-1], axis=0)[::-1]
    return out


def duhamel_apply(u0: Spectrum | None, w: SpaceTimeFunction) -> SpaceTimeFunction:
    """``U(t) u0 - i int_0^t U(t - tau) w(tau) dtau`` on every window sample.

    The phase ``exp(-2 pi i tau |xi|^2)`` is factored out before the
    trapezoid rule, so a resonant source is integrated exactly.
    """
    window, grid = w.window, w.grid
    phase = np.exp(2j * np.pi * np.multiply.outer(window.times, grid.xi_squared))
    base = 0.0 if u0 is None else u0.coeffs
    integral = _cumulative_from_origin(np.conj(phase) * w.coeffs, window)
    return SpaceTimeFunction(grid, window, phase * (base - 1j * integral))


def fixed_point_map(u, u0: Spectrum, v0: Field, params: ModelParams) -> SpaceTimeFunction:
    psi = cutoff_psi(1, u.window)
    return duhamel_apply(u0, nonlinear_w(u, v0, params)).time_multiply(psi)


@dataclass
class PicardHistory:
    diffs: list = field(default_factory=list)
    ratios: list = field(default_factory=list)
    converged: bool = False

    @property
    def iterations(self) -> int:
        return len(self.diffs)

    def rows(self):
        """``(k, difference norm, contraction ratio)`` per iteration."""
        return [(k + 1, d, r) for k, (d, r) in enumerate(zip(self.diffs, self.ratios))]


def picard_solve(u0: Spectrum, v0: Field, params: ModelParams, window: TimeWindow,
                 tol: float = 1e-12, kmax: int = 50, s: float = 1.0):
    """Iterate ``u <- Phi(u)`` from ``psi_1 U(t) u0`` until the X^{s,1/2} step is below ``tol``.

    Returns ``(u, history)``.  Raises :class:`NoContraction` when the ratio of
    consecutive difference norms is >= 1 for three iterations in a row.
    """
    if kmax < 1:
        raise ValueError("kmax must be >= 1")
    if not tol > 0:
        raise ValueError("tol must be positive")
    psi = cutoff_psi(1, window)
    u = SpaceTimeFunction.free_wave(u0, window).time_multiply(psi)
    hist = PicardHistory()
    streak = 0
    for k in range(kmax):
        new = fixed_point_map(u, u0, v0, params)
        d = xsb_norm(new - u, s, 0.5)
        ratio = d / hist.diffs[-1] if hist.diffs and hist.diffs[-1] > 0 else math.nan
        hist.diffs.append(d)
        hist.ratios.append(ratio)
        u = new
        log.debug("picard k=%d diff=%.3e ratio=%.3g", k + 1, d, ratio)
        if d < tol:
            hist.converged = True
            break
        streak = streak + 1 if ratio >= 1 else 0
        if streak >= 3:
            raise NoContraction(hist.ratios)
    if not hist.converged:
        log.warning("picard iteration stopped at kmax=%d with diff %.3e", kmax, hist.diffs[-1])
    return u, hist


def probe_existence_time(u0, v0, params, window: TimeWindow, tol=1e-10, kmax=40, s=1.0,
                         max_doublings=8):
    """Double ``delta`` until :class:`NoContraction` fires; return the records and that delta."""
    records = []
    delta = window.delta
    for _ in range(max_doublings):
        if 4 * delta >= window.length:
            break
        win = TimeWindow(window.length, window.samples, delta)
        try:
            _, hist = picard_solve(u0, v0, params, win, tol, kmax, s)
            records.append((delta, hist.iterations, hist.converged))
        except NoContraction as exc:
            records.append((delta, len(exc.ratios), False))
            return records, delta
        delta *= 2
    return records, None


# -- four-term decomposition ---------------------------------------------------


def _flat_spectrum(w: SpaceTimeFunction):
    spec = w.spectrum().reshape(w.window.samples, -1)
    xi2 = w.grid.xi_squared.ravel().astype(float)
    mu = np.subtract.outer(w.window.frequencies, xi2)
    return spec, xi2, mu


def _reshape(w: SpaceTimeFunction, flat: np.ndarray) -> SpaceTimeFunction:
    return SpaceTimeFunction(w.grid, w.window, flat.reshape((w.window.samples,) + w.grid.shape))


def _resonant_kernel(mu: np.ndarray, t: float) -> np.ndarray:
    """``(exp(2 pi i mu t) - 1)/mu`` with a series branch for ``|mu| < 1e-6``."""
    z = 2j * np.pi * t
    small = np.abs(mu) < 1e-6
    ms = np.where(small, 1.0, mu)
    series = z + z * z * mu / 2 + z**3 * mu * mu / 6
    return np.where(small, series, np.expm1(z * ms) / ms)


def duhamel_exact(w: SpaceTimeFunction, cut: bool = True) -> SpaceTimeFunction:
    """``psi_1 (-i int_0^t U(t-tau) w(tau) dtau)`` evaluated exactly from the (xi, lam) spectrum."""
    window = w.window
    spec, xi2, mu = _flat_spectrum(w)
    psi = cutoff_psi(1, window) if cut else np.ones(window.samples)
    out = np.zeros_like(spec)
    for j, t in enumerate(window.times):
        if psi[j] == 0:
            continue
        acc = np.sum(spec * _resonant_kernel(mu, t), axis=0) * window.dlam
        out[j] = -psi[j] / (2 * np.pi) * np.exp(2j * np.pi * t * xi2) * acc
    return _reshape(w, out)


@dataclass
class Decomposition:
    linear: SpaceTimeFunction
    taylor: SpaceTimeFunction
    nonresonant: SpaceTimeFunction
    boundary: SpaceTimeFunction
    reference: SpaceTimeFunction
    consistency_error: float
    quadrature_mismatch: float
    quadrature_flag: bool
    taylor_terms: int
    norms: dict

    @property
    def inhomogeneous(self) -> SpaceTimeFunction:
        return self.taylor + self.nonresonant + self.boundary


def duhamel_decompose(w: SpaceTimeFunction, u0: Spectrum | None = None, s: float = 0.0,
                      b: float = 0.5, b_prime: float = 0.5) -> Decomposition:
    """Split ``psi_1 * Duhamel`` into the linear, Taylor, non-resonant and boundary terms.

    The split uses ``psi_2`` on the modulation ``mu = lam - |xi|^2``: near the
    paraboloid (``|mu| <= 2``) the kernel is expanded in powers of ``t``;
    away from it the two exponentials are kept separate.  ``norms`` holds each
    term's X^{s,b} norm and ``||w||_{X^{s,b'-1}}``.
    """
    window, grid = w.window, w.grid
    t = window.times
    psi = cutoff_psi(1, window)
    spec, xi2, mu = _flat_spectrum(w)
    phase = np.exp(2j * np.pi * np.multiply.outer(t, xi2))
    near = psi_bump(mu)
    pref = -1.0 / (2 * np.pi)

    # Taylor part: sum_k (2 pi i t)^k / k! * int psi_2(mu) mu^{k-1} w dlam
    live = psi != 0
    tl = t[live]
    taylor = np.zeros((live.sum(), spec.shape[1]), complex)
    moment = near * spec * window.dlam  # mu^{k-1} weighting applied incrementally
    coef = np.ones_like(tl, dtype=complex)
    k = 0
    scale = np.max(np.abs(moment), initial=0.0)
    while scale > 0:
        k += 1
        coef = coef * (2j * np.pi * tl) / k
        term = np.multiply.outer(coef, moment.sum(axis=0))
        taylor += term
        if k > 4 and np.max(np.abs(term)) < 1e-12 * max(1.0, np.max(np.abs(taylor))):
            break
        moment = moment * mu
        if k > 400:
            raise RuntimeError("Taylor series failed to converge")
    taylor_full = np.zeros_like(spec)
    taylor_full[live] = taylor
    taylor_full *= pref * psi[:, None] * phase

    away = np.where(near < 1, (1 - near) / np.where(mu == 0, 1.0, mu), 0.0)
    nonres = pref * psi[:, None] * _time_inverse(away * spec, window)
    boundary = -pref * psi[:, None] * phase * (np.sum(away * spec, axis=0) * window.dlam)

    linear = SpaceTimeFunction.zeros(grid, window)
    if u0 is not None:
        linear = SpaceTimeFunction.free_wave(u0, window).time_multiply(psi)

    parts = [_reshape(w, a) for a in (taylor_full, nonres, boundary)]
    total = parts[0] + parts[1] + parts[2]
    reference = duhamel_exact(w)
    ref_scale = max(np.max(np.abs(reference.coeffs)), 1e-300)
    consistency = float(np.max(np.abs(total.coeffs - reference.coeffs)) / ref_scale)
    sampled = duhamel_apply(None, w).time_multiply(psi)
    mismatch = float(np.max(np.abs(sampled.coeffs - reference.coeffs)) / ref_scale)
    if np.max(np.abs(reference.coeffs)) == 0:
        consistency = float(np.max(np.abs(total.coeffs)))
        mismatch = float(np.max(np.abs(sampled.coeffs)))

    norms = {
        "linear": xsb_norm(linear, s, b),
        "taylor": xsb_norm(parts[0], s, b),
        "nonresonant": xsb_norm(parts[1], s, b),
        "boundary": xsb_norm(parts[2], s, b),
        "w_dual": xsb_norm(w, s, b_prime - 1),
        "s": s,
        "b": b,
        "b_prime": b_prime,
    }
    return Decomposition(linear, *parts, reference, consistency, mismatch,
                         mismatch > 1e-6, k, norms)
