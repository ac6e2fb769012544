"""Time integration of the periodic Schrodinger-Debye system.

    i u_t - DISPERSION * Lap u = u v,      K v_t + v = eps |u|^alpha

The kinetic flow is the Fourier multiplier ``exp(2 pi i t |xi|^2)`` on the
unit torus, which fixes ``DISPERSION = 1/(2 pi)``.
The coupled step is a palindromic composition of exact sub-flows::

    R(dt/2) D(dt/2) B(dt) D(dt/2) R(dt/2)

with R the potential rotation (v frozen), D the Debye relaxation (u frozen)
and B the free Schrodinger evolution.  R and B are isometries on the grid, so
the discrete L2 norm of u is preserved to round-off.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .torus import (
    Field,
    Spectrum,
    dealias_mask,
    forward_array,
    inverse_array,
    lebesgue_norm,
    sobolev_norm,
    forward,
)

log = logging.getLogger(__name__)

__all__ = [
    "DISPERSION",
    "BLOWUP_THRESHOLD",
    "BlowUpError",
    "ModelParams",
    "SimState",
    "Trajectory",
    "free_evolution",
    "potential_rotation",
    "debye_step",
    "debye_source",
    "strang_step",
    "evolve",
    "maxwell_rescale",
    "maxwell_unscale",
    "phi1",
    "relax_weights",
]

DISPERSION = 1.0 / (2.0 * math.pi)
BLOWUP_THRESHOLD = 1e8
_SERIES_CUTOFF = 1e-5


class BlowUpError(RuntimeError):
    """Non-finite or exploding solution during time stepping."""

    def __init__(self, t: float, norms: dict):
        self.t = t
        self.norms = norms
        desc = ", ".join(f"{k}={v:.3e}" for k, v in norms.items())
        super().__init__(f"blow-up detected at t={t:.6g} ({desc})")


@dataclass(frozen=True)
class ModelParams:
    K: float
    eps: int
    alpha: float
    dim: int = 1

    def __post_init__(self):
        if not self.K > 0:
            raise ValueError(f"relaxation time K must be positive, got {self.K}")
        if self.eps not in (1, -1):
            raise ValueError(f"eps must be +1 or -1, got {self.eps}")
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")

    @property
    def p(self) -> float:
        return self.alpha + 2


@dataclass(frozen=True, eq=False)
class SimState:
    t: float
    u: Field
    v: Field
    params: ModelParams

    def __post_init__(self):
        if self.u.grid != self.v.grid:
            raise ValueError("u and v must live on the same grid")
        object.__setattr__(self, "v", self.v.real())


@dataclass
class Trajectory:
    states: list = field(default_factory=list)
    scheme: str = "strang"
    dt: float = 0.0

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.states])

    def __len__(self):
        return len(self.states)

    def __getitem__(self, i):
        return self.states[i]


# -- scalar helpers -----------------------------------------------------------


def phi1(z):
    """``(exp(z) - 1)/z`` with a Taylor branch near zero."""
    z = np.asarray(z, dtype=float)
    small = np.abs(z) < _SERIES_CUTOFF
    zs = np.where(small, 1.0, z)
    out = np.where(small, 1 + z / 2 + z * z / 6 + z**3 / 24, np.expm1(zs) / zs)
    return out if out.ndim else float(out)


def relax_weights(h: float, K: float) -> tuple[float, float, float]:
    """Exact weights of one relaxation step of signed length ``h``.

    With a source interpolated linearly between ``s0`` (left) and ``s1``
    (right), the solution of ``K y' + y = s`` advances as::

        y(t+h) = decay*y(t) + c0*s0 + c1*(s1 - s0)

    and the tuple ``(decay, c0, c1)`` is returned.
    """
    z = h / K
    decay = math.exp(-z)
    c0 = -math.expm1(-z)  # 1 - exp(-z)
    # 1 - (1 - exp(-z))/z
    if abs(z) < _SERIES_CUTOFF:
        c1 = z / 2 - z * z / 6 + z**3 / 24
    else:
        c1 = 1.0 - c0 / z
    return decay, c0, c1


# -- sub-flows ----------------------------------------------------------------


def free_evolution(uhat: Spectrum, t: float) -> Spectrum:
    """Multiply mode ``xi`` by ``exp(2 pi i t |xi|^2)``."""
    phase = np.exp(2j * np.pi * t * uhat.grid.xi_squared)
    return Spectrum(uhat.grid, uhat.coeffs * phase)


def potential_rotation(u: Field, v: Field, dt: float) -> Field:
    """Exact flow of ``i u_t = u v`` for frozen real ``v``."""
    if not v.is_real:
        v = v.real()
    return Field(u.grid, u.values * np.exp(-1j * v.values * dt))


def debye_source(u_values: np.ndarray, alpha: float, grid) -> np.ndarray:
    """``|u|^alpha`` on the grid; two-thirds dealiased in the cubic case."""
    if alpha == 2:
        s = forward_array(np.abs(u_values) ** 2, grid)
        return inverse_array(np.where(dealias_mask(grid), s, 0.0), grid).real
    return np.abs(u_values) ** alpha


def debye_step(v: Field, source, dt: float, params: ModelParams, order: int = 2) -> Field:
    """Exponential-integrator step for ``K v_t + v = eps * source``.

    ``source`` is a pair ``(left, right)`` of real arrays (or Fields) holding
    ``|u|^alpha`` at the substep endpoints; a single array is read as a
    constant source.  Order 1 freezes the left value, order 2 integrates the
    linear interpolant exactly.
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if order not in (1, 2):
        raise ValueError(f"order must be 1 or 2, got {order}")
    s0, s1 = _source_pair(source)
    decay, c0, c1 = relax_weights(dt, params.K)
    out = decay * v.values + params.eps * c0 * s0
    if order == 2:
        out = out + params.eps * c1 * (s1 - s0)
    return Field(v.grid, np.real(out))


def _source_pair(source):
    if isinstance(source, (tuple, list)):
        s0, s1 = source
    else:
        s0 = s1 = source
    s0 = s0.values if isinstance(s0, Field) else np.asarray(s0)
    s1 = s1.values if isinstance(s1, Field) else np.asarray(s1)
    return s0, s1


# -- coupled stepping ---------------------------------------------------------


def strang_step(state: SimState, dt: float) -> SimState:
    """One symmetric split step; the two Debye halves bracket the kinetic flow."""
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    prm = state.params
    grid = state.u.grid
    h = dt / 2

    u = potential_rotation(state.u, state.v, h)
    # u is frozen during D, so the source is constant over each Debye half
    s = debye_source(u.values, prm.alpha, grid)
    v = debye_step(state.v, (s, s), h, prm, order=2)
    u = Field(grid, inverse_array(free_evolution(forward(u), dt).coeffs, grid))
    s = debye_source(u.values, prm.alpha, grid)
    v = debye_step(v, (s, s), h, prm, order=2)
    u = potential_rotation(u, v, h)
    return SimState(state.t + dt, u, v, prm)


def _check_finite(state: SimState):
    umax = float(np.max(np.abs(state.u.values)))
    vmax = float(np.max(np.abs(state.v.values)))
    if not (np.isfinite(umax) and np.isfinite(vmax)) or umax > BLOWUP_THRESHOLD:
        norms = {
            "u_inf": umax,
            "v_inf": vmax,
            "u_l2": lebesgue_norm(2, state.u),
        }
        raise BlowUpError(state.t, norms)


def evolve(state: SimState, T: float, dt: float, save_every: int = 1) -> Trajectory:
    """Advance ``state`` to time ``state.t + T`` with uniform steps of ``dt``.

    The step count is ``round(T/dt)``; snapshots are taken every
    ``save_every`` steps plus the initial and final states.
    """
    if not T > 0:
        raise ValueError(f"horizon T must be positive, got {T}")
    if not 0 < dt <= T * (1 + 1e-12):
        raise ValueError(f"need 0 < dt <= T, got dt={dt}, T={T}")
    if save_every < 1:
        raise ValueError("save_every must be >= 1")
    nsteps = max(1, int(round(T / dt)))
    t0 = state.t
    traj = Trajectory([state], scheme="strang", dt=dt)
    cur = state
    for k in range(1, nsteps + 1):
        cur = strang_step(cur, dt)
        # fix accumulated round-off in t
        cur = replace(cur, t=t0 + k * dt)
        _check_finite(cur)
        if k % save_every == 0 or k == nsteps:
            traj.states.append(cur)
    log.debug("evolved %d steps of dt=%g to t=%g", nsteps, dt, cur.t)
    return traj


def state_norms(state: SimState) -> dict:
    uhat = forward(state.u)
    return {
        "t": state.t,
        "u_l2": lebesgue_norm(2, state.u),
        "u_h1": sobolev_norm(1, uhat),
        "v_l2": lebesgue_norm(2, state.v),
    }


# -- physical rescaling -------------------------------------------------------


def _maxwell_factors(c, k, eta0, eta2, omega0):
    for name, val in (("c", c), ("k", k), ("eta0", eta0), ("omega0", omega0)):
        if not val > 0:
            raise ValueError(f"{name} must be positive, got {val}")
    if eta2 == 0:
        raise ValueError("eta2 must be nonzero")
    amp_u = math.sqrt(omega0 * abs(eta2) / eta0)
    amp_v = omega0 / eta0
    dilation = math.sqrt(c / (k * eta0))
    return amp_u, amp_v, dilation


def maxwell_rescale(A: Field, nu: Field, c, k, eta0, eta2, omega0):
    """Map Maxwell-Debye fields (A, nu) to Schrodinger-Debye fields (u, v).

    The spatial dilation ``sqrt(c/(k eta0))`` is a relabelling of the unit
    torus; only the amplitudes change on the stored grid.  Returns
    ``(u, v, meta)`` where ``meta`` records the factors.
    """
    amp_u, amp_v, dilation = _maxwell_factors(c, k, eta0, eta2, omega0)
    meta = {"amplitude_u": amp_u, "amplitude_v": amp_v, "dilation": dilation}
    return Field(A.grid, A.values * amp_u), Field(nu.grid, nu.values * amp_v), meta


def maxwell_unscale(u: Field, v: Field, c, k, eta0, eta2, omega0):
    amp_u, amp_v, _ = _maxwell_factors(c, k, eta0, eta2, omega0)
    return Field(u.grid, u.values / amp_u), Field(v.grid, v.values / amp_v)
