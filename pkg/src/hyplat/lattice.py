"""Exact integer lattice helpers.

Unimodular completion of a primitive vector, LLL/size reduction, and
Fincke-Pohst enumeration of integer points in an ellipsoid.  Everything that
decides membership is exact; floats are only used to steer the enumeration,
with a slack that is always re-checked in integer arithmetic by the caller.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np


def ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with a*x + b*y = g = gcd(a, b) >= 0."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def integer_det(rows: Sequence[Sequence[int]]) -> int:
    """Exact determinant by fraction-free Bareiss elimination."""
    m = [list(map(int, r)) for r in rows]
    n = len(m)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = m[k][k]
        for i in range(k + 1, n):
            mik = m[i][k]
            row_i, row_k = m[i], m[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * pivot - mik * row_k[j]) // prev
        prev = pivot
    return sign * m[n - 1][n - 1]


def cofactor_row(rows: Sequence[Sequence[int]]) -> list[int]:
    """Cofactor vector v of an (n-1) x n integer matrix.

    For any row x, det([rows; x]) = sum_k x[k] * v[k].
    """
    n = len(rows) + 1
    out = []
    for k in range(n):
        minor = [[r[j] for j in range(n) if j != k] for r in rows]
        sgn = -1 if (n - 1 + k) % 2 else 1
        out.append(sgn * integer_det(minor))
    return out


def unimodular_completion(v: Sequence[int]) -> tuple[list[int], list[list[int]]]:
    """For primitive v, return (p, basis) with p.v = 1 and basis a Z-basis of v^perp.

    Column operations bring v to (1, 0, ..., 0); the accumulated unimodular
    matrix has p as its first column and the kernel basis as the rest.
    """
    n = len(v)
    w = [int(x) for x in v]
    cols = [[int(i == j) for i in range(n)] for j in range(n)]
    for i in range(1, n):
        a, b = w[0], w[i]
        if b == 0:
            continue
        g, x, y = ext_gcd(a, b)
        c0, ci = cols[0], cols[i]
        cols[0] = [x * s + y * t for s, t in zip(c0, ci)]
        cols[i] = [(-b // g) * s + (a // g) * t for s, t in zip(c0, ci)]
        w[0], w[i] = g, 0
    if w[0] == -1:
        cols[0] = [-s for s in cols[0]]
        w[0] = 1
    if w[0] != 1:
        raise ValueError(f"vector {list(v)} is not primitive (gcd {abs(w[0])})")
    return cols[0], cols[1:]


def _dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def lll_reduce(basis: Sequence[Sequence[int]], delta: Fraction = Fraction(99, 100)) -> list[list[int]]:
    """Textbook LLL in exact rational arithmetic.

    Ranks here are tiny (at most n - 1 for desk-scale n), so the cubic cost of
    recomputing Gram-Schmidt after each swap is irrelevant.
    """
    b = [list(map(int, r)) for r in basis]
    k = len(b)
    if k <= 1:
        return b

    def gso(b):
        bstar, mu = [], [[Fraction(0)] * k for _ in range(k)]
        norms = []
        for i in range(k):
            v = [Fraction(x) for x in b[i]]
            for j in range(i):
                mu[i][j] = _dot(b[i], bstar[j]) / norms[j]
                v = [x - mu[i][j] * y for x, y in zip(v, bstar[j])]
            bstar.append(v)
            norms.append(_dot(v, v))
        return mu, norms

    mu, norms = gso(b)
    i = 1
    while i < k:
        for j in range(i - 1, -1, -1):
            q = round(mu[i][j])
            if q:
                b[i] = [x - q * y for x, y in zip(b[i], b[j])]
                mu, norms = gso(b)
        if norms[i] >= (delta - mu[i][i - 1] ** 2) * norms[i - 1]:
            i += 1
        else:
            b[i], b[i - 1] = b[i - 1], b[i]
            mu, norms = gso(b)
            i = max(i - 1, 1)
    return b


def ellipsoid_points(gram: np.ndarray, radius_sq: float,
                     center: np.ndarray | None = None) -> Iterator[tuple[int, ...]]:
    """Yield all c in Z^k with (c - center)^T gram (c - center) <= radius_sq.

    Fincke-Pohst on the LDL^T factorisation of ``gram``.  Callers pass a
    radius with a small relative slack and re-check candidates exactly.
    """
    G = np.asarray(gram, dtype=float)
    k = G.shape[0]
    t = np.zeros(k) if center is None else np.asarray(center, dtype=float)
    # G = R^T R with R upper triangular; the form is sum_i d_i (y_i + sum_{j>i} q_ij y_j)^2
    R = np.linalg.cholesky(G).T
    d = np.diag(R) ** 2
    if np.any(d <= 0) or not np.all(np.isfinite(d)):
        raise ValueError("Gram matrix is not positive definite")
    q = R / np.diag(R)[:, None]
    x = [0] * k
    out_c = [0] * k

    def rec(i: int, budget: float):
        s = t[i] - sum(q[i, j] * (x[j] - t[j]) for j in range(i + 1, k))
        half = math.sqrt(max(budget, 0.0) / d[i])
        lo, hi = math.ceil(s - half - 1e-12), math.floor(s + half + 1e-12)
        for c in range(lo, hi + 1):
            rem = budget - d[i] * (c - s) ** 2
            if rem < -1e-9 * (1.0 + radius_sq):
                continue
            x[i] = c
            if i == 0:
                out_c[:] = x
                yield tuple(out_c)
            else:
                yield from rec(i - 1, rem)

    if k == 0:
        yield ()
        return
    yield from rec(k - 1, radius_sq)
