"""Closed-form predictions for random partitioning instances.

Everything here is double precision; none of it feeds back into the exact
solvers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass


class DomainError(ValueError):
    pass


@dataclass(frozen=True)
class EnsembleMoments:
    mean_sq: float   # <x^2>
    variance: float  # <x^2> - <x>^2

    def __post_init__(self):
        if not (self.variance >= 0 and self.mean_sq >= self.variance):
            raise DomainError(f"need mean_sq >= variance >= 0, got {self.mean_sq}, {self.variance}")

    @property
    def mean(self) -> float:
        return math.sqrt(self.mean_sq - self.variance)


def moments_uniform_bits(b: int) -> EnsembleMoments:
    """Moments of the discrete uniform distribution on ``0 .. 2**b - 1``."""
    if b < 1:
        raise DomainError("bit width must be positive")
    # exact rationals first; 2**(2b) overflows nothing in int arithmetic
    span = 1 << b
    variance = (span * span - 1) / 12
    mean = (span - 1) / 2
    return EnsembleMoments(variance + mean * mean, variance)


def uniform_unit_moments() -> EnsembleMoments:
    """Moments of the continuous uniform distribution on [0, 1)."""
    return EnsembleMoments(1 / 3, 1 / 12)


def _solve_fixed_point(rhs: float, coef: float, tol: float = 1e-9) -> float:
    """Largest root of ``n - coef*log2(n) = rhs``."""
    # g(n) = n - coef*log2(n) is minimal at n* = coef/ln 2
    n_star = coef / math.log(2)
    g_min = n_star - coef * math.log2(n_star)
    if rhs <= g_min:
        raise DomainError(f"no critical size above 1 (rhs {rhs:.4g} <= {g_min:.4g})")

    n = max(rhs, 2.0)
    for _ in range(200):
        nxt = rhs + coef * math.log2(n)
        if abs(nxt - n) <= tol * abs(nxt):
            n = nxt
            break
        n = nxt
    else:
        n = None
    if n is not None and n > max(n_star, 1.0):
        return n

    lo, hi = max(n_star, 1.0), max(500.0, 2 * abs(rhs) + 2)
    g = lambda x: x - coef * math.log2(x) - rhs
    while g(hi) < 0:
        hi *= 2
    while hi - lo > tol * hi:
        mid = 0.5 * (lo + hi)
        if g(mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def critical_n(moments: EnsembleMoments, balanced: bool) -> float:
    """Critical instance size where perfect partitions start to appear."""
    if balanced:
        if moments.variance <= 0:
            raise DomainError("balanced critical size needs positive variance")
        rhs = math.log2(math.pi * math.sqrt(moments.variance))
        n = _solve_fixed_point(rhs, 1.0)
    else:
        if moments.mean_sq <= 0:
            raise DomainError("critical size needs positive <x^2>")
        rhs = 0.5 * math.log2(math.pi / 2 * moments.mean_sq)
        n = _solve_fixed_point(rhs, 0.5)
    if n <= 1:
        raise DomainError("critical size does not exceed 1")
    return n


def expected_optimum(moments: EnsembleMoments, n: int, balanced: bool) -> float:
    """Average optimal partition difference for ``1 << n << n_c``."""
    if balanced:
        return math.pi * math.sqrt(moments.variance) * n * 2.0 ** (-n)
    return math.sqrt(2 * math.pi * moments.mean_sq) * math.sqrt(n) * 2.0 ** (-n)


def bldm_prediction(n: float) -> float:
    """Conjectured mean BLDM difference for ``n`` uniform numbers in [0, 1)."""
    if n < 2:
        raise DomainError("bldm_prediction needs n >= 2")
    return (math.sqrt(2) - 1) * n ** (-(2 / 3) * math.log(n))
