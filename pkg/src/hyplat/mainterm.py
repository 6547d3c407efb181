"""Main-term constant c_n and empirical error-exponent fits."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import mpmath
import numpy as np

DEFAULT_BITS = 128


def zeta_at_integer(k: int, bits: int = DEFAULT_BITS) -> mpmath.mpf:
    """zeta(k) for integer k >= 2 by Euler-Maclaurin summation."""
    if int(k) != k or k < 2:
        raise ValueError("zeta_at_integer needs an integer k >= 2")
    k = int(k)
    with mpmath.workprec(bits + 20):
        N = max(10, bits // 3)
        J = bits // 6 + 5
        s = mpmath.fsum(mpmath.mpf(m) ** -k for m in range(1, N))
        Nf = mpmath.mpf(N)
        s += Nf ** (1 - k) / (k - 1) + Nf ** -k / 2
        # B_2j/(2j)! * k(k+1)...(k+2j-2) * N^(-k-2j+1)
        rising = mpmath.mpf(k)
        for j in range(1, J + 1):
            s += mpmath.bernoulli(2 * j) / mpmath.factorial(2 * j) * rising * Nf ** (-k - 2 * j + 1)
            rising *= (k + 2 * j - 1) * (k + 2 * j)
        out = +s
    return out


@dataclass(frozen=True)
class AsymptoticConstant:
    n: int
    value: mpmath.mpf
    precision_bits: int

    def __float__(self):
        return float(self.value)


@lru_cache(maxsize=None)
def main_constant(n: int, bits: int = DEFAULT_BITS) -> AsymptoticConstant:
    """c_n = pi^(n^2/2) / (Gamma((n^2-n+2)/2) Gamma(n/2) zeta(2)...zeta(n))."""
    if n < 2:
        raise ValueError("n must be >= 2")
    with mpmath.workprec(bits + 20):
        log_c = (mpmath.mpf(n * n) / 2) * mpmath.log(mpmath.pi)
        log_c -= mpmath.loggamma(mpmath.mpf(n * n - n + 2) / 2)
        log_c -= mpmath.loggamma(mpmath.mpf(n) / 2)
        log_c -= mpmath.fsum(mpmath.log(zeta_at_integer(k, bits)) for k in range(2, n + 1))
        value = mpmath.exp(log_c)
    return AsymptoticConstant(n, value, bits)


def main_term(n: int, T: float, bits: int = DEFAULT_BITS) -> float:
    if T < 0:
        raise ValueError("T must be non-negative")
    return float(main_constant(n, bits).value) * float(T) ** (n * (n - 1))


@dataclass
class FitReport:
    n: int
    main_exponent: int
    fitted_error_exponent: float
    residual: float
    points_used: list[tuple[float, int]]
    excluded: list[tuple[float, int]] = field(default_factory=list)
    signs: list[int] = field(default_factory=list)

    def to_row(self) -> dict:
        return {"n": self.n, "main_exponent": self.main_exponent,
                "fitted_error_exponent": self.fitted_error_exponent,
                "residual": self.residual,
                "points_used": [[t, c] for t, c in self.points_used],
                "excluded": [[t, c] for t, c in self.excluded],
                "signs": self.signs}


def fit_error_exponent(n: int, points: Sequence[tuple[float, int]]) -> FitReport:
    """Least-squares slope of log|count - c_n T^{n(n-1)}| against log T.

    ``points`` are (T, count) pairs from one dimension and one base point.
    """
    points = [(float(t), int(c)) for t, c in points]
    ts = [t for t, _ in points]
    if any(b <= a for a, b in zip(ts, ts[1:])):
        raise ValueError("T values must be strictly increasing")
    c_n = main_constant(n).value
    used, excluded, signs = [], [], []
    xs, ys = [], []
    for t, count in points:
        with mpmath.workprec(DEFAULT_BITS):
            err = mpmath.mpf(count) - c_n * mpmath.mpf(t) ** (n * (n - 1))
        if err == 0:
            excluded.append((t, count))
            continue
        signs.append(1 if err > 0 else -1)
        used.append((t, count))
        xs.append(math.log(t))
        ys.append(float(mpmath.log(abs(err))))
    if len(used) < 3:
        raise ValueError(f"need at least 3 points with non-zero error, have {len(used)}")
    A = np.vstack([xs, np.ones(len(xs))]).T
    (slope, _), res, *_ = np.linalg.lstsq(A, np.array(ys), rcond=None)
    residual = float(res[0]) if len(res) else 0.0
    return FitReport(n, n * (n - 1), float(slope), residual, used, excluded, signs)
