"""Conservation checks, the H1 balance law, interpolation exponents and the
well-posedness classifier.

With the kinetic term scaled by ``DISPERSION``, smooth solutions satisfy::

    d/dt (DISPERSION * G - C) = (C - eps * P) / K

where ``G = int |grad u|^2``, ``C = int |u|^2 v`` and ``P = int |u|^p`` with
``p = alpha + 2``.  Integrals over the unit torus are grid means.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .propagators import DISPERSION, SimState, Trajectory, debye_source
from .torus import Field, forward, lebesgue_norm, sobolev_norm

__all__ = [
    "NotApplicable",
    "BalanceRecord",
    "BalanceResidual",
    "IntegratedBalance",
    "AprioriExponents",
    "Verdict",
    "balance_terms",
    "balance_records",
    "h1_balance_residual",
    "integrated_balance",
    "integrated_balance_residual",
    "l2_drift",
    "interpolation_check",
    "apriori_exponents",
    "classify_wellposedness",
    "verdict_table",
]


class NotApplicable(ValueError):
    """The interpolation exponent is not below 1."""


@dataclass(frozen=True)
class BalanceRecord:
    t: float
    grad_energy: float
    coupling: float
    potential_p: float
    l2: float
    h1: float

    def __post_init__(self):
        vals = (self.grad_energy, self.coupling, self.potential_p, self.l2, self.h1)
        if not np.all(np.isfinite(vals)):
            raise ValueError(f"non-finite balance terms at t={self.t}")


def balance_terms(state: SimState) -> BalanceRecord:
    """Gradient energy spectrally; coupling and potential by grid quadrature.

    In the cubic case the potential is ``int (P|u|^2)^2`` with ``P`` the
    two-thirds projection, which is the quantity the dealiased source feeds
    back into the coupling.
    """
    u, v, prm = state.u, state.v, state.params
    grid = u.grid
    uhat = forward(u)
    amp2 = np.abs(u.values) ** 2
    grad = float(np.sum(4 * np.pi**2 * grid.xi_squared * np.abs(uhat.coeffs) ** 2))
    coupling = float(np.mean(amp2 * v.values.real))
    src = debye_source(u.values, prm.alpha, grid)
    potential = float(np.mean(amp2 * src)) if prm.alpha == 2 else float(np.mean(np.abs(u.values) ** prm.p))
    return BalanceRecord(
        t=float(state.t),
        grad_energy=grad,
        coupling=coupling,
        potential_p=potential,
        l2=float(np.mean(amp2)),
        h1=sobolev_norm(1, uhat),
    )


def balance_records(traj: Trajectory) -> list[BalanceRecord]:
    return [balance_terms(s) for s in traj.states]


def _uniform_times(traj: Trajectory, minimum: int) -> np.ndarray:
    if len(traj) < minimum:
        raise ValueError(f"need at least {minimum} snapshots, got {len(traj)}")
    t = traj.times
    steps = np.diff(t)
    if not np.allclose(steps, steps[0], rtol=1e-9, atol=1e-14):
        raise ValueError("snapshots must be uniformly spaced")
    return t


def _energy_and_rate(records, params):
    grad = np.array([r.grad_energy for r in records])
    coup = np.array([r.coupling for r in records])
    pot = np.array([r.potential_p for r in records])
    energy = DISPERSION * grad - coup
    rate = (coup - params.eps * pot) / params.K
    return energy, rate


@dataclass
class BalanceResidual:
    times: np.ndarray
    values: np.ndarray

    @property
    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values), initial=0.0))


def h1_balance_residual(traj: Trajectory) -> BalanceResidual:
    """Centered difference of the energy minus the balance right-hand side, interior snapshots."""
    t = _uniform_times(traj, 3)
    energy, rate = _energy_and_rate(balance_records(traj), traj.states[0].params)
    h = t[1] - t[0]
    res = (energy[2:] - energy[:-2]) / (2 * h) - rate[1:-1]
    return BalanceResidual(t[1:-1], res)


@dataclass
class IntegratedBalance:
    times: np.ndarray
    residual: np.ndarray  # direct integration of the balance law, pinned to 0 at t = 0
    printed_residual: np.ndarray  # same with the initial energy terms sign-flipped

    @property
    def final(self) -> float:
        return float(self.residual[-1])

    @property
    def printed_gap(self) -> float:
        """Difference between the two readings at the final time: ``2 (C0 - kappa G0)``."""
        return float(self.printed_residual[-1] - self.residual[-1])


def integrated_balance(traj: Trajectory) -> IntegratedBalance:
    t = _uniform_times(traj, 2)
    if abs(t[0]) > 1e-14:
        raise ValueError("integrated balance needs a trajectory starting at t = 0")
    energy, rate = _energy_and_rate(balance_records(traj), traj.states[0].params)
    h = t[1] - t[0]
    integral = np.concatenate([[0.0], np.cumsum((rate[1:] + rate[:-1]) * h / 2)])
    direct = energy - energy[0] - integral
    printed = energy + energy[0] - integral
    return IntegratedBalance(t, direct, printed)


def integrated_balance_residual(traj: Trajectory) -> float:
    """Final-time residual of the time-integrated balance law (trapezoid in time)."""
    return integrated_balance(traj).final


def l2_drift(traj: Trajectory) -> float:
    """``max_t | ||u(t)||_2 - ||u_0||_2 | / ||u_0||_2`` (absolute when ``u_0 = 0``)."""
    norms = np.array([lebesgue_norm(2, s.u) for s in traj.states])
    scale = norms[0] if norms[0] > 0 else 1.0
    return float(np.max(np.abs(norms - norms[0])) / scale)


# -- interpolation and a priori exponents -------------------------------------------


def _exact(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def interpolation_check(f: Field, p, n: int | None = None) -> tuple[float, float]:
    """``||f||_p / (||f||_2^{1-theta} ||f||_{H^1}^theta)`` with ``theta = n (1/2 - 1/p)``."""
    n = f.grid.dim if n is None else n
    theta = float(n * (Fraction(1, 2) - (0 if p == np.inf else 1 / _exact(p))))
    if theta >= 1:
        raise NotApplicable(f"theta = {theta} >= 1 for n={n}, p={p}")
    l2 = lebesgue_norm(2, f)
    if l2 == 0:
        return 0.0, theta
    h1 = sobolev_norm(1, forward(f))
    return float(lebesgue_norm(p, f) / (l2 ** (1 - theta) * h1**theta)), theta


@dataclass(frozen=True)
class AprioriExponents:
    n: int
    alpha: Fraction
    p: Fraction
    theta0: Fraction
    theta1: Fraction
    theta: Fraction

    @property
    def theta0_ok(self) -> bool:
        return self.theta0 < 1

    @property
    def theta1_ok(self) -> bool:
        return self.theta1 < 1

    @property
    def theta_ok(self) -> bool:
        return self.theta < 1

    @property
    def all_ok(self) -> bool:
        return self.theta0_ok and self.theta1_ok and self.theta_ok

    @property
    def mu1(self) -> str:
        e = self.alpha * (1 - self.theta1)
        return f"mu1(T) = (c/K) T^(1/2) ||u0||_2^({e})"


def apriori_exponents(n: int, alpha) -> AprioriExponents:
    """Exact exponents of the a priori H1 envelope (``alpha`` taken as an exact rational)."""
    a = _exact(alpha)
    if a <= 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    half = Fraction(1, 2)
    p = a + 2
    return AprioriExponents(
        n=n,
        alpha=a,
        p=p,
        theta0=n * (half - Fraction(1, 4)),
        theta1=n * (half - 1 / (2 * a)),
        theta=n * (half - 1 / p),
    )


# -- well-posedness classifier --------------------------------------------------


@dataclass(frozen=True)
class Verdict:
    kind: str  # GlobalWP | LocalWP | NotCovered
    theorem_tag: str
    constraint_trace: tuple

    @property
    def local(self) -> bool:
        return self.kind != "NotCovered"


def _bound(num, den):
    """``num/den``, read as +inf once the denominator is no longer positive."""
    return Fraction(num) / den if den > 0 else None


def _below(a, bound):
    return True if bound is None else a < bound


def classify_wellposedness(n: int, alpha, s) -> Verdict:
    """Literal reading of the local (A-D) and global (E-G) parameter ranges.

    ``n >= 4`` is one bucket.  Upper bounds of the form ``c/(d - k s)`` are
    read as ``+inf`` once ``d - k s <= 0``; the trace records when that
    happens.  The H1 global statements apply at ``s = 1`` exactly.
    """
    if n < 1:
        raise ValueError("dimension must be >= 1")
    a, s = _exact(alpha), _exact(s)
    if a <= 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    trace = []
    local = False
    tag_local = "ABCD"[min(n, 4) - 1]

    def note(label, ok):
        trace.append(f"{label}: {ok}")
        return ok

    if n == 1:
        local |= note("alpha = 2 and s >= 0", a == 2 and s >= 0)
        local |= note("s > 0 and alpha <= 4", s > 0 and a <= 4)
        local |= note("alpha > 6 and s > (1 - 4/alpha)/2", a > 6 and s > (1 - 4 / a) / 2)
    elif n == 2:
        local |= note("alpha = 2 and s > 0", a == 2 and s > 0)
        bound = _bound(2, 1 - s)
        if bound is None:
            trace.append("2/(1-s) read as +inf for s >= 1")
        local |= note(f"2 <= alpha < {bound or 'inf'}", 2 <= a and _below(a, bound))
    else:
        if n == 3:
            local |= note("alpha = 2 and s >= 1", a == 2 and s >= 1)
        bound = _bound(4, n - 2 * s)
        if bound is None:
            trace.append(f"4/({n}-2s) read as +inf for s >= {Fraction(n, 2)}")
        local |= note(f"2 <= alpha < {bound or 'inf'}", 2 <= a and _below(a, bound))

    glob = False
    tag_global = {1: "E", 2: "F", 3: "G"}.get(n)
    if n == 1:
        glob |= note("global: alpha = 2 and s >= 0", a == 2 and s >= 0)
        glob |= note("global: s = 1 and alpha >= 1", s == 1 and a >= 1)
    elif n in (2, 3):
        glob |= note("global: alpha = 2 and s >= 1", a == 2 and s >= 1)
        rng = a >= 2 if n == 2 else 2 <= a < 3
        glob |= note("global: s = 1 and " + ("alpha >= 2" if n == 2 else "2 <= alpha < 3"), s == 1 and rng)

    tags = ([tag_local] if local else []) + ([tag_global] if glob else [])
    kind = "GlobalWP" if glob else "LocalWP" if local else "NotCovered"
    return Verdict(kind, "+".join(tags) or "-", tuple(trace))


def verdict_table(ns, alphas, ss) -> list[tuple]:
    """Rows ``(n, alpha, s, kind, theorem_tag)`` over the cross product, in input order."""
    rows = []
    for n in ns:
        for a in alphas:
            for s in ss:
                v = classify_wellposedness(n, a, s)
                rows.append((n, a, s, v.kind, v.theorem_tag))
    return rows
