"""Exponential sums over paraboloid sections and the counting behind them.

Even-exponent norms are computed exactly: for ``p = 2q``,
``||sum a_g e(<x,g>)||_p^p = ||f^q||_2^2`` is the sum of squared moduli of
the q-fold convolution of the coefficients, which is an integer whenever the
coefficients are.  The sixth-moment bound on the 1-D paraboloid reduces to
counting integer triples with fixed sum and sum of squares, and those counts
are dominated by representations ``X^2 + 3 Y^2 = A``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from fractions import Fraction

import numpy as np

from .torus import Field, Spectrum, forward, inverse, lebesgue_norm, make_grid

__all__ = [
    "BudgetExceeded",
    "Unfactored",
    "ParaboloidSection",
    "CountTable",
    "GrowthFit",
    "AdmissibilityVerdict",
    "exp_sum_lp_norm",
    "quadrature_lp_norm",
    "kp_lower_bound",
    "representation_counts",
    "representation_counts_pairs",
    "check_count_table",
    "eisenstein_solution_count",
    "brute_force_solution_count",
    "sixth_moment_chain",
    "growth_fit",
    "admissible_check",
    "KP_EXPONENT_TABLE",
]

EXP_SUM_BUDGET = 10**8
COUNT_BUDGET_N = 256
FACTOR_LIMIT = 10**12
BRUTE_LIMIT = 10**8


class BudgetExceeded(ValueError):
    """An enumeration would exceed its configured budget."""


class Unfactored(ValueError):
    """The integer is beyond both the factorisation and brute-force budgets."""


# -- point sets -----------------------------------------------------------------


@dataclass(frozen=True)
class ParaboloidSection:
    """Integer points on the paraboloid ``(n, |n|^2)``.

    ``ParaboloidSection(d, N)`` is ``{(n_1..n_{d-1}, |n|^2): |n_j| < N}``;
    :meth:`one_dim` gives ``{(n, n^2): |n| <= N}``.
    """

    d: int
    N: int
    closed: bool = False  # True: |n_j| <= N

    def __post_init__(self):
        if self.d < 2:
            raise ValueError("ambient dimension must be >= 2")
        if self.N < (0 if self.closed else 1):
            raise ValueError(f"cutoff too small: N={self.N}")

    @classmethod
    def one_dim(cls, N: int) -> "ParaboloidSection":
        return cls(2, N, closed=True)

    @property
    def points(self) -> np.ndarray:
        top = self.N if self.closed else self.N - 1
        axis = np.arange(-top, top + 1)
        base = np.stack(np.meshgrid(*([axis] * (self.d - 1)), indexing="ij"), -1).reshape(-1, self.d - 1)
        return np.concatenate([base, np.sum(base**2, axis=1, keepdims=True)], axis=1)

    def __len__(self):
        top = self.N if self.closed else self.N - 1
        return (2 * top + 1) ** (self.d - 1)


def _as_points(S) -> np.ndarray:
    pts = S.points if isinstance(S, ParaboloidSection) else np.asarray(S)
    pts = np.asarray(pts, dtype=np.int64)
    return pts.reshape(len(pts), -1)


# -- exact even norms -------------------------------------------------------------


def _check_even(p) -> int:
    if p != int(p) or int(p) % 2 or p < 2:
        raise ValueError(f"exact evaluation needs an even integer p >= 2, got {p}")
    return int(p) // 2


def _convolve_power(points: np.ndarray, coeffs: np.ndarray, q: int):
    """Keys and values of the q-fold self-convolution of ``coeffs`` on ``points``."""
    lo = points.min(axis=0)
    span = points.max(axis=0) - lo
    radix = q * span + 1
    if np.prod(radix.astype(float)) >= 2**62:
        raise BudgetExceeded("frequency range too large to encode")
    place = np.concatenate([[1], np.cumprod(radix[::-1])[:-1]])[::-1].astype(np.int64)
    base = ((points - lo) * place).sum(axis=1)
    keys, vals = base, coeffs.astype(complex)
    for _ in range(q - 1):
        k = np.add.outer(keys, base).ravel()
        v = np.multiply.outer(vals, coeffs).ravel()
        keys, inv = np.unique(k, return_inverse=True)
        vals = np.bincount(inv, weights=v.real, minlength=len(keys)) + 1j * np.bincount(
            inv, weights=v.imag, minlength=len(keys)
        )
    return keys, vals


def exp_sum_lp_norm(S, coeffs, p: int, budget: int = EXP_SUM_BUDGET) -> float:
    """``||sum_{g in S} a_g e^{2 pi i <x, g>}||_{L^p(T^d)}`` for even ``p``, exactly."""
    q = _check_even(p)
    pts = _as_points(S)
    a = np.asarray(coeffs, dtype=complex).ravel()
    if len(a) != len(pts):
        raise ValueError("one coefficient per point is required")
    if float(len(pts)) ** q > budget:
        raise BudgetExceeded(f"|S|^{q} = {float(len(pts))**q:.3g} exceeds budget {budget:.3g}")
    _, vals = _convolve_power(pts, a, q)
    return float(np.sum(np.abs(vals) ** 2) ** (1.0 / p))


def _quadrature_grid(pts: np.ndarray, p: float):
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    center = (lo + hi) // 2
    span = int((hi - lo).max())
    M = max(4, int(math.ceil(p)) * span + 2)
    M += M % 2
    return make_grid(pts.shape[1], M), pts - center


def _field_on_grid(pts, a, p):
    grid, shifted = _quadrature_grid(pts, p)
    coeffs = np.zeros(grid.shape, complex)
    np.add.at(coeffs, tuple((shifted + grid.M // 2).T), a)
    return grid, inverse(Spectrum(grid, coeffs))


def quadrature_lp_norm(S, coeffs, p: float) -> float:
    """Grid-quadrature ``L^p`` norm on a torus grid fine enough to be exact for even ``p``."""
    pts = _as_points(S)
    _, f = _field_on_grid(pts, np.asarray(coeffs, complex).ravel(), p)
    return lebesgue_norm(p, f)


def kp_lower_bound(S, p: int, trials: int = 16, seed: int = 0, ascent_steps: int = 60,
                   return_coeffs: bool = False):
    """Lower bound for the restriction constant ``K_p(S)``.

    Candidates are the flat vector, ``trials`` random Gaussian vectors, and the
    best of those refined by the nonlinear power iteration
    ``a <- P_S(|f|^{p-2} f)/||.||``, which never decreases ``||f||_p`` on the
    unit sphere.  Each candidate is scored by the exact norm.
    """
    pts = _as_points(S)
    q = _check_even(p)
    if float(len(pts)) ** q > EXP_SUM_BUDGET:
        raise BudgetExceeded("candidate scoring exceeds the enumeration budget")
    rng = np.random.default_rng(seed)

    def score(a):
        return exp_sum_lp_norm(pts, a, p) / np.linalg.norm(a)

    cands = [np.ones(len(pts), complex)]
    cands += [rng.standard_normal(len(pts)) + 1j * rng.standard_normal(len(pts)) for _ in range(trials)]
    scores = [score(a) for a in cands]
    best = cands[int(np.argmax(scores))] / np.linalg.norm(cands[int(np.argmax(scores))])

    grid, shifted = _quadrature_grid(pts, p)
    idx = tuple((shifted + grid.M // 2).T)
    a = best.copy()
    for _ in range(ascent_steps):
        coeffs = np.zeros(grid.shape, complex)
        coeffs[idx] = a
        f = inverse(Spectrum(grid, coeffs)).values
        g = np.abs(f) ** (p - 2) * f
        a_new = forward(Field(grid, g)).coeffs[idx]
        nrm = np.linalg.norm(a_new)
        if nrm == 0:
            break
        a_new /= nrm
        if np.linalg.norm(a_new - a) < 1e-12:
            a = a_new
            break
        a = a_new
    cands.append(a)
    scores.append(score(a))
    k = int(np.argmax(scores))
    value = float(scores[k])
    if return_coeffs:
        return value, cands[k] / np.linalg.norm(cands[k])
    return value


# -- representation counts ----------------------------------------------------------


@dataclass
class CountTable:
    """``r_{n,j}``: triples in ``[-N, N]^3`` with sum ``n`` and sum of squares ``j``."""

    N: int
    n: np.ndarray
    j: np.ndarray
    count: np.ndarray

    @property
    def max_count(self) -> int:
        return int(self.count.max(initial=0))

    @property
    def total(self) -> int:
        return int(self.count.sum())

    def as_dict(self) -> dict:
        return {(int(a), int(b)): int(c) for a, b, c in zip(self.n, self.j, self.count)}

    def get(self, n: int, j: int) -> int:
        lo = np.searchsorted(self._keys, self._key(n, j))
        if lo < len(self._keys) and self._keys[lo] == self._key(n, j):
            return int(self.count[lo])
        return 0

    def _key(self, n, j):
        return (np.asarray(n, np.int64) + 3 * self.N) * (3 * self.N**2 + 1) + np.asarray(j, np.int64)

    @property
    def _keys(self):
        return self._key(self.n, self.j)


def representation_counts(N: int, budget: int = COUNT_BUDGET_N) -> CountTable:
    """Enumerate all triples with entries in ``[-N, N]``; partial tables are merged per ``n_1``."""
    if N < 0:
        raise ValueError("N must be non-negative")
    if N > budget:
        raise BudgetExceeded(f"N={N} exceeds the enumeration budget {budget}")
    axis = np.arange(-N, N + 1, dtype=np.int64)
    n2, n3 = np.meshgrid(axis, axis, indexing="ij")
    n2, n3 = n2.ravel(), n3.ravel()
    s23, q23 = n2 + n3, n2 * n2 + n3 * n3
    width = 3 * N * N + 1
    parts_k, parts_c = [], []
    for n1 in axis:
        key = (n1 + s23 + 3 * N) * width + (n1 * n1 + q23)
        k, c = np.unique(key, return_counts=True)
        parts_k.append(k)
        parts_c.append(c)
    keys, inv = np.unique(np.concatenate(parts_k), return_inverse=True)
    counts = np.bincount(inv, weights=np.concatenate(parts_c)).astype(np.int64)
    return CountTable(N, keys // width - 3 * N, keys % width, counts)


def representation_counts_pairs(N: int) -> CountTable:
    """Same table from pairs ``(n_1, n_2)`` with ``|n - n_1 - n_2| <= N`` imposed; small N only."""
    if N > 24:
        raise BudgetExceeded("pair enumeration is for small N")
    acc: dict = {}
    rng = range(-N, N + 1)
    for n in range(-3 * N, 3 * N + 1):
        for n1 in rng:
            for n2 in rng:
                n3 = n - n1 - n2
                if abs(n3) <= N:
                    key = (n, n1 * n1 + n2 * n2 + n3 * n3)
                    acc[key] = acc.get(key, 0) + 1
    keys = sorted(acc)
    return CountTable(
        N,
        np.array([k[0] for k in keys], np.int64),
        np.array([k[1] for k in keys], np.int64),
        np.array([acc[k] for k in keys], np.int64),
    )


def check_count_table(table: CountTable) -> dict:
    """Evaluate the table invariants; every entry of the result is a bool or a count."""
    N = table.N
    d = table.as_dict()
    symmetric = all(d.get((-n, j), 0) == c for (n, j), c in d.items())
    A = 6 * table.j - 2 * table.n**2
    counts = np.array([eisenstein_solution_count(int(a)) if a > 0 else (1 if a == 0 else 0)
                       for a in np.unique(A)])
    lookup = dict(zip(np.unique(A).tolist(), counts.tolist()))
    dom = np.array([lookup[int(a)] for a in A])
    return {
        "total": table.total == (2 * N + 1) ** 3,
        "symmetric": symmetric,
        "representable": bool(np.all(dom > 0)),
        "dominated": bool(np.all(table.count <= dom)),
        "violations": int(np.sum(table.count > dom)),
    }


# -- X^2 + 3 Y^2 = A --------------------------------------------------------------


@lru_cache(maxsize=None)
def _small_primes(limit: int = 10**6) -> np.ndarray:
    sieve = np.ones(limit + 1, bool)
    sieve[:2] = False
    for i in range(2, int(limit**0.5) + 1):
        if sieve[i]:
            sieve[i * i::i] = False
    return np.flatnonzero(sieve)


def _factorize(A: int) -> dict:
    out = {}
    for p in _small_primes().tolist():
        if p * p > A:
            break
        e = 0
        while A % p == 0:
            A //= p
            e += 1
        if e:
            out[p] = e
    if A > 1:
        out[A] = out.get(A, 0) + 1
    return out


def eisenstein_solution_count(A: int) -> int:
    """Number of ``(X, Y)`` in ``Z^2`` with ``X^2 + 3Y^2 = A``.

    Elements of ``Z[rho]`` of norm ``A`` number ``6 * prod_p c_p`` where
    ``c_p = e + 1`` for split primes (``p = 1 mod 3``), ``1`` for the ramified
    prime 3 and ``[e even]`` for inert primes (``p = 2 mod 3``).  The form
    ``X^2 + 3Y^2`` sees the suborder ``Z[sqrt(-3)]``: all of them when
    ``4 | A``, a third (one associate pair per class) when ``A`` is odd, none
    when ``A = 2 mod 4``.
    """
    A = int(A)
    if A < 0:
        return 0
    if A == 0:
        return 1
    if A > FACTOR_LIMIT:
        if A <= BRUTE_LIMIT:
            return brute_force_solution_count(A)
        raise Unfactored(f"A={A} exceeds the factorisation budget")
    if A % 4 == 2:
        return 0
    ideals = 1
    for p, e in _factorize(A).items():
        if p == 3:
            continue
        if p % 3 == 1:
            ideals *= e + 1
        elif e % 2:
            return 0
    return 6 * ideals if A % 4 == 0 else 2 * ideals


def brute_force_solution_count(A: int) -> int:
    A = int(A)
    if A < 0:
        return 0
    if A > BRUTE_LIMIT:
        raise BudgetExceeded(f"A={A} exceeds the brute-force budget")
    total = 0
    for y in range(math.isqrt(A // 3) + 1):
        r = A - 3 * y * y
        x = math.isqrt(r)
        if x * x == r:
            total += (1 if x == 0 else 2) * (1 if y == 0 else 2)
    return total


def sixth_moment_chain(N: int, coeffs, table: CountTable | None = None) -> tuple[float, float]:
    """``(||f||_6^6, max r * (sum |a|^2)^3)`` for ``f`` supported on the 1-D section ``S_N``."""
    a = np.asarray(coeffs, complex).ravel()
    S = ParaboloidSection.one_dim(N)
    if len(a) != len(S):
        raise ValueError(f"need {len(S)} coefficients")
    lhs = exp_sum_lp_norm(S, a, 6) ** 6
    table = table or representation_counts(N)
    return lhs, table.max_count * float(np.sum(np.abs(a) ** 2)) ** 3


# -- growth fit ---------------------------------------------------------------------


@dataclass
class GrowthFit:
    N: list
    max_counts: list
    c: float
    residuals: list
    trend: float  # slope of residuals against log N
    intercept: float = 0.0

    def report(self) -> dict:
        return {
            "N": list(self.N),
            "max_counts": list(self.max_counts),
            "c": self.c,
            "residuals": list(self.residuals),
            "residual_trend": self.trend,
            "intercept": self.intercept,
        }

    @property
    def residuals_increasing(self) -> bool:
        return bool(np.all(np.diff(self.residuals) > 0))


def growth_fit(Ns, max_counts, intercept: bool = False) -> GrowthFit:
    """Least-squares ``log max_count ~ c * log N / log log N``.

    The default has no intercept, matching ``max_count ~ exp(c log N / log log N)``;
    ``intercept=True`` allows a constant factor in front.
    """
    Ns = [int(n) for n in Ns]
    if len(Ns) < 4 or len(set(Ns)) < 4:
        raise ValueError("growth fit needs at least four distinct N")
    if min(Ns) < 8:
        raise ValueError("growth fit needs N >= 8")
    logN = np.log(np.asarray(Ns, float))
    x = logN / np.log(logN)
    y = np.log(np.asarray(max_counts, float))
    design = np.stack([x, np.ones_like(x)], axis=1) if intercept else x[:, None]
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    res = y - design @ coef
    trend = float(np.polyfit(logN, res, 1)[0])
    b = float(coef[1]) if intercept else 0.0
    return GrowthFit(Ns, [int(m) for m in max_counts], float(coef[0]), res.tolist(), trend, b)


# -- admissible exponents --------------------------------------------------------


# (d, p) -> exponent e with K_p(S_{d,N}) << N^{e + eps}
KP_EXPONENT_TABLE = {
    (2, 6): (Fraction(0), "K_6(S_N) < exp(c log N / log log N)"),
    (3, 4): (Fraction(0), "K_4(S_{3,N}) << N^eps"),
    (4, 4): (Fraction(1, 4), "K_4(S_{4,N}) << N^{1/4+eps}"),
    (5, 4): (Fraction(1, 2), "K_4(S_{5,N}) << N^{1/2+eps}"),
}


@dataclass(frozen=True)
class AdmissibilityVerdict:
    kind: str  # admissible-by-table | admissible-by-threshold | upgraded | unknown
    rule: str
    trace: tuple = field(default_factory=tuple)

    @property
    def admissible(self) -> bool:
        return self.kind != "unknown"


def _critical_exponent(d, p):
    return Fraction(d - 1, 2) - Fraction(d + 1) / p


def admissible_check(d: int, p, evidence: dict | None = None) -> AdmissibilityVerdict:
    """Classify ``p`` for ``S_{d,N}`` (``d`` ambient, ``n = d - 1`` spatial dimensions).

    Rules, in order: the definition gate ``p >= 2(d+1)/(d-1)``; the threshold
    ``p >= 2(n+4)/n`` for ``n >= 4``; the recorded exponent table; upgrade
    from a smaller tabulated admissible exponent.
    """
    if d < 2:
        raise ValueError("ambient dimension must be >= 2")
    table = dict(KP_EXPONENT_TABLE if evidence is None else evidence)
    p = Fraction(p).limit_denominator(10**9) if not isinstance(p, Fraction) else p
    n = d - 1
    p0 = Fraction(2 * (d + 1), d - 1)
    trace = [f"p0 = 2(d+1)/(d-1) = {p0}"]
    if p < p0:
        trace.append(f"p = {p} < p0")
        return AdmissibilityVerdict("unknown", "threshold unmet", tuple(trace))
    if n >= 4:
        bound = Fraction(2 * (n + 4), n)
        trace.append(f"n = {n} >= 4, 2(n+4)/n = {bound}")
        if p >= bound:
            return AdmissibilityVerdict("admissible-by-threshold", "p >= 2(n+4)/n", tuple(trace))

    def tabulated(q):
        if (d, q) not in table:
            return None
        exp, note = table[(d, q)]
        return note if Fraction(exp) <= _critical_exponent(d, q) else None

    note = tabulated(p)
    if note is not None:
        trace.append(f"table: {note}")
        return AdmissibilityVerdict("admissible-by-table", note, tuple(trace))
    lower = sorted(q for (dd, q) in table if dd == d and p0 <= q < p and tabulated(q))
    if lower:
        q = lower[0]
        trace.append(f"table: {tabulated(q)}; upgrade {q} -> {p}")
        return AdmissibilityVerdict("upgraded", f"upgrade from p1 = {q}", tuple(trace))
    trace.append("no rule applies")
    return AdmissibilityVerdict("unknown", "no rule applies", tuple(trace))
