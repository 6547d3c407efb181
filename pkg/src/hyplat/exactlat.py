"""Exact counts of gamma in SL_n(Z) with ||z^-1 gamma w||_F <= T.

Identity base points are counted exactly: rows r_1..r_{n-1} are enumerated
with an integer norm budget, and the last row is then a point of the affine
lattice {x : x . v = 1} (v the cofactor vector), counted by Fincke-Pohst on a
reduced basis of v^perp.  General base points go through a floating point
quadratic form with a certification margin.
"""
from __future__ import annotations

import bisect
import enum
import itertools
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from .lattice import (cofactor_row, ellipsoid_points, integer_det, lll_reduce,
                      unimodular_completion)


class Method(str, enum.Enum):
    ROW_RECURSIVE = "ROW_RECURSIVE"
    GENERIC_FORM = "GENERIC_FORM"
    NAIVE = "NAIVE"


class NotPositiveDefiniteError(ValueError):
    """The quadratic form assembled from (z, w) is not numerically positive definite."""


IDENTITY = "identity"


@dataclass(frozen=True)
class BallSpec:
    n: int
    radius_sq: Fraction
    z: np.ndarray | None = None
    w: np.ndarray | None = None
    tol: float = 1e-9

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("n must be at least 2")
        object.__setattr__(self, "radius_sq", Fraction(self.radius_sq))
        if self.radius_sq < 0:
            raise ValueError("radius_sq must be non-negative")
        if (self.z is None) != (self.w is None):
            raise ValueError("give both z and w, or neither")
        if self.z is not None:
            z = np.array(self.z, dtype=float)
            w = np.array(self.w, dtype=float)
            for name, m in (("z", z), ("w", w)):
                if m.shape != (self.n, self.n):
                    raise ValueError(f"{name} must be {self.n}x{self.n}")
                if abs(np.linalg.det(m) - 1.0) > 1e-8:
                    raise ValueError(f"det {name} must be 1")
            object.__setattr__(self, "z", z)
            object.__setattr__(self, "w", w)

    @property
    def is_identity(self) -> bool:
        return self.z is None

    @property
    def budget(self) -> int:
        """Integer norm budget: ||gamma||^2 <= T^2 iff ||gamma||^2 <= floor(T^2)."""
        return math.floor(self.radius_sq)

    def to_document(self) -> dict:
        r = self.radius_sq
        doc = {"n": self.n, "radius_sq": f"{r.numerator}/{r.denominator}", "tol": self.tol}
        if self.is_identity:
            doc["base"] = IDENTITY
        else:
            doc["base"] = {"z": self.z.tolist(), "w": self.w.tolist()}
        return doc

    @classmethod
    def from_document(cls, doc: dict) -> "BallSpec":
        radius = doc["radius_sq"]
        if not isinstance(radius, (str, int)) or isinstance(radius, bool):
            raise ValueError("radius_sq must be an exact rational string 'p/q'")
        radius = parse_rational(str(radius))
        base = doc.get("base", IDENTITY)
        tol = float(doc.get("tol", 1e-9))
        if base == IDENTITY:
            return cls(int(doc["n"]), radius, tol=tol)
        return cls(int(doc["n"]), radius, np.array(base["z"]), np.array(base["w"]), tol)


def parse_rational(text: str) -> Fraction:
    """Parse 'p/q' or an integer; decimals are refused to keep boundaries exact."""
    if "." in text or "e" in text.lower():
        raise ValueError(f"radius {text!r} is not an exact rational 'p/q'")
    return Fraction(text)


@dataclass
class CountRecord:
    spec: BallSpec
    count: int
    method: Method
    borderline: int = 0
    seconds: float = 0.0

    def to_row(self) -> dict:
        r = self.spec.radius_sq
        return {"n": self.spec.n, "radius_sq": f"{r.numerator}/{r.denominator}",
                "count": self.count, "method": self.method.value,
                "borderline": self.borderline, "seconds": round(self.seconds, 6)}


def frobenius_sq(M) -> int:
    return sum(int(x) * int(x) for row in M for x in row)


def _twisted_form(z, w) -> tuple[np.ndarray, np.ndarray]:
    """P = (z z^T)^{-1}, S = w w^T; ||z^-1 M w||^2 = tr(P M S M^T)."""
    z = np.asarray(z, dtype=float)
    w = np.asarray(w, dtype=float)
    zzt = z @ z.T
    try:
        np.linalg.cholesky(zzt)
        P = np.linalg.inv(zzt)
        np.linalg.cholesky(P)
        np.linalg.cholesky(w @ w.T)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError("assembled form lost positive definiteness") from exc
    if np.linalg.cond(zzt) > 1e12:
        raise NotPositiveDefiniteError(f"z is ill-conditioned (cond {np.linalg.cond(zzt):.3g})")
    return P, w @ w.T


def twisted_norm_sq(M, z, w) -> float:
    P, S = _twisted_form(z, w)
    M = np.asarray(M, dtype=float)
    return float(np.trace(P @ M @ S @ M.T))


# --- final-row lattice counts -------------------------------------------------

@lru_cache(maxsize=None)
def _final_row_norms(key: tuple[int, ...], max_budget: int) -> np.ndarray:
    """Sorted squared norms of all x in Z^n with x . key = 1 and ||x||^2 <= max_budget.

    The count only depends on v up to signed permutations, so callers pass the
    sorted absolute values as ``key``.
    """
    p, basis = unimodular_completion(key)
    basis = lll_reduce(basis)
    B = np.array(basis, dtype=float)
    pv = np.array(p, dtype=float)
    gram = B @ B.T
    # project p onto span(basis): ||p + c B||^2 = ||p_perp||^2 + (c - t)^T gram (c - t)
    t = -np.linalg.solve(gram, B @ pv)
    perp = pv + t @ B
    off = float(perp @ perp)
    slack = 1e-9 * (1 + max_budget)
    norms = []
    for c in ellipsoid_points(gram, max_budget - off + slack, t):
        x = list(p)
        for ci, b in zip(c, basis):
            if ci:
                x = [xi + ci * bi for xi, bi in zip(x, b)]
        nn = sum(xi * xi for xi in x)
        if nn <= max_budget:
            norms.append(nn)
    norms.sort()
    return np.array(norms, dtype=np.int64)


def final_row_count(v: Sequence[int], budget: int) -> int:
    """#{x in Z^n : x . v = 1, ||x||^2 <= budget}."""
    if budget < 1 or not any(v):
        return 0
    if math.gcd(*map(int, v)) != 1:
        return 0
    key = tuple(sorted(abs(int(x)) for x in v))
    return bisect.bisect_right(_final_row_norms(key, budget), budget)


def final_row_solutions(v: Sequence[int], budget: int) -> list[tuple[int, ...]]:
    """All x with x . v = 1 and ||x||^2 <= budget, in lexicographic order."""
    if budget < 1 or not any(v) or math.gcd(*map(int, v)) != 1:
        return []
    p, basis = unimodular_completion(v)
    basis = lll_reduce(basis)
    B = np.array(basis, dtype=float)
    pv = np.array(p, dtype=float)
    gram = B @ B.T
    t = -np.linalg.solve(gram, B @ pv)
    perp = pv + t @ B
    out = []
    for c in ellipsoid_points(gram, budget - float(perp @ perp) + 1e-9 * (1 + budget), t):
        x = tuple(p[i] + sum(ci * b[i] for ci, b in zip(c, basis)) for i in range(len(v)))
        if sum(xi * xi for xi in x) <= budget:
            out.append(x)
    return sorted(out)


# --- row enumeration ----------------------------------------------------------

@lru_cache(maxsize=32)
def _row_vectors(n: int, budget: int) -> tuple[np.ndarray, np.ndarray]:
    """All integer n-vectors with ||r||^2 <= budget, lexicographic, with their norms."""
    m = math.isqrt(budget)
    grid = np.array(list(itertools.product(range(-m, m + 1), repeat=n)), dtype=np.int64).reshape(-1, n)
    norms = (grid * grid).sum(axis=1)
    keep = norms <= budget
    grid, norms = grid[keep], norms[keep]
    grid.setflags(write=False)
    norms.setflags(write=False)
    return grid, norms


@dataclass(frozen=True)
class SubTask:
    spec: BallSpec
    start: int
    stop: int


def partition_workload(spec: BallSpec, k: int) -> list[SubTask]:
    """Split the (lexicographic) first-row candidates into k contiguous ranges."""
    if k < 1:
        raise ValueError("k must be >= 1")
    rows, _ = _row_vectors(spec.n, spec.budget)
    total = len(rows)
    cuts = [total * i // k for i in range(k + 1)]
    return [SubTask(spec, cuts[i], cuts[i + 1]) for i in range(k)]


def _last_layer_count(prefix: list[list[int]], rem: int, n: int, max_budget: int) -> int:
    """Count completions of ``prefix`` (n-2 rows) by rows r_{n-1}, r_n within ``rem``."""
    # v(r) = r @ W is linear in the (n-1)-th row
    W = np.array([cofactor_row(prefix + [[int(i == j) for j in range(n)]]) for i in range(n)],
                 dtype=np.int64)
    if not W.any():
        return 0
    rows, norms = _row_vectors(n, max_budget)
    sel = norms <= rem
    return _count_block(rows[sel] @ W, rem - norms[sel], max_budget)


def _count_block(V: np.ndarray, budgets: np.ndarray, max_budget: int) -> int:
    keep = budgets >= 1
    V, budgets = V[keep], budgets[keep]
    if len(V) == 0:
        return 0
    g = np.gcd.reduce(V, axis=1)
    keep = g == 1
    V, budgets = V[keep], budgets[keep]
    if len(V) == 0:
        return 0
    keys = np.sort(np.abs(V), axis=1)
    uniq, inv = np.unique(keys, axis=0, return_inverse=True)
    inv = inv.reshape(-1)
    order = np.argsort(inv, kind="stable")
    bounds = np.searchsorted(inv[order], np.arange(len(uniq) + 1))
    total = 0
    for u in range(len(uniq)):
        norms = _final_row_norms(tuple(int(x) for x in uniq[u]), max_budget)
        if len(norms) == 0:
            continue
        b = budgets[order[bounds[u]:bounds[u + 1]]]
        total += int(np.searchsorted(norms, b, side="right").sum())
    return total


def count_subtask(task: SubTask) -> int:
    spec = task.spec
    n, budget = spec.n, spec.budget
    rows, norms = _row_vectors(n, budget)
    if n == 2:
        W = np.array([[0, 1], [-1, 0]], dtype=np.int64)
        sl = slice(task.start, task.stop)
        return _count_block(rows[sl] @ W, budget - norms[sl], budget)
    total = 0
    for idx in range(task.start, task.stop):
        total += _descend([rows[idx].tolist()], budget - int(norms[idx]), n, budget)
    return total


def _descend(prefix: list[list[int]], rem: int, n: int, max_budget: int) -> int:
    if len(prefix) == n - 2:
        return _last_layer_count(prefix, rem, n, max_budget)
    rows, norms = _row_vectors(n, max_budget)
    total = 0
    for idx in np.nonzero(norms <= rem)[0]:
        total += _descend(prefix + [rows[idx].tolist()], rem - int(norms[idx]), n, max_budget)
    return total


def count_identity_ball(spec: BallSpec, workers: int = 1) -> CountRecord:
    if not spec.is_identity:
        raise ValueError("count_identity_ball needs identity base points")
    t0 = time.perf_counter()
    tasks = partition_workload(spec, max(workers, 1))
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(workers) as ex:
            parts = list(ex.map(count_subtask, tasks))
    else:
        parts = [count_subtask(t) for t in tasks]
    return CountRecord(spec, sum(parts), Method.ROW_RECURSIVE, 0, time.perf_counter() - t0)


def enumerate_ball(spec: BallSpec) -> Iterator[tuple[tuple[int, ...], ...]]:
    """Yield members of the identity ball as tuples of row tuples, lexicographically."""
    if not spec.is_identity:
        raise ValueError("enumerate_ball supports identity base points only")
    n, budget = spec.n, spec.budget
    rows, norms = _row_vectors(n, budget)

    def rec(prefix, rem):
        if len(prefix) == n - 1:
            for x in final_row_solutions(cofactor_row(prefix), rem):
                yield tuple(map(tuple, prefix)) + (x,)
            return
        for idx in np.nonzero(norms <= rem)[0]:
            yield from rec(prefix + [rows[idx].tolist()], rem - int(norms[idx]))

    yield from rec([], budget)


def count_naive(spec: BallSpec) -> CountRecord:
    """Brute-force oracle: scan all matrices with entries bounded by T."""
    t0 = time.perf_counter()
    n, budget = spec.n, spec.budget
    m = math.isqrt(budget)
    entries = range(-m, m + 1)
    count = 0
    for mat in itertools.product(itertools.product(entries, repeat=n), repeat=n):
        if frobenius_sq(mat) <= budget and integer_det(mat) == 1:
            count += 1
    return CountRecord(spec, count, Method.NAIVE, 0, time.perf_counter() - t0)


def count_general_ball(spec: BallSpec, tol: float | None = None) -> CountRecord:
    """Count under the twisted form; candidates within tol*T^2 of the boundary are flagged."""
    tol = spec.tol if tol is None else tol
    if tol <= 0:
        raise ValueError("tol must be positive")
    t0 = time.perf_counter()
    n = spec.n
    if spec.is_identity:
        z = w = np.eye(n)
    else:
        z, w = spec.z, spec.w
    P, S = _twisted_form(z, w)
    # row-major vec: ||z^-1 X w||^2 = vec(X)^T (P kron S) vec(X)
    Q = np.kron(P, S)
    try:
        np.linalg.cholesky(Q)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError("twisted form is not positive definite") from exc
    r2 = float(spec.radius_sq)
    count = borderline = 0
    for c in ellipsoid_points(Q, r2 * (1 + tol) + 1e-12):
        x = np.array(c, dtype=float)
        val = float(x @ Q @ x)
        if val >= r2 * (1 + tol):
            continue
        mat = [c[i * n:(i + 1) * n] for i in range(n)]
        if integer_det(mat) != 1:
            continue
        count += 1
        if abs(val - r2) < tol * r2:
            borderline += 1
    return CountRecord(spec, count, Method.GENERIC_FORM, borderline, time.perf_counter() - t0)
