"""Spectral types E(d, f) for SL_n(Z) and the exponents attached to them.

A type is a multiset of blocks (d_j, f_j) with sum d_j = n and f_j | d_j.  A
block with f_j >= 2 carries a GL(f_j) cusp form; d_j / f_j > 1 stacks shifted
copies of its parameter (a Speh block).
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .sphtrans import SpectralParameter

Block = tuple[int, int]


@dataclass(frozen=True)
class SpectralType:
    n: int
    blocks: tuple[Block, ...]

    def __post_init__(self):
        blocks = tuple(sorted((int(d), int(f)) for d, f in self.blocks))[::-1]
        object.__setattr__(self, "blocks", blocks)
        if sum(d for d, _ in blocks) != self.n:
            raise ValueError(f"block sizes {blocks} do not sum to {self.n}")
        for d, f in blocks:
            if f < 1 or d % f:
                raise ValueError(f"f = {f} does not divide d = {d}")

    @property
    def r(self) -> int:
        return len(self.blocks)

    @property
    def is_constant(self) -> bool:
        return self.blocks == ((self.n, 1),)

    @property
    def is_cuspidal(self) -> bool:
        return self.blocks == ((self.n, self.n),)

    @property
    def tags(self) -> list[str]:
        out = []
        if self.is_constant:
            out.append("CONSTANT")
        if self.is_cuspidal:
            out.append("CUSPIDAL")
        return out


def _partitions(n: int, largest: int | None = None):
    largest = n if largest is None else largest
    if n == 0:
        yield ()
        return
    for k in range(min(n, largest), 0, -1):
        for rest in _partitions(n - k, k):
            yield (k,) + rest


@lru_cache(maxsize=None)
def _all_types(n: int) -> tuple[SpectralType, ...]:
    seen = set()
    out = []
    for parts in _partitions(n):
        choices = [[(d, f) for f in range(1, d + 1) if d % f == 0] for d in parts]

        def rec(i, acc):
            if i == len(choices):
                key = tuple(sorted(acc))
                if key not in seen:
                    seen.add(key)
                    out.append(SpectralType(n, key))
                return
            for c in choices[i]:
                rec(i + 1, acc + [c])

        rec(0, [])
    return tuple(sorted(out, key=lambda t: (t.r, [(-d, -f) for d, f in t.blocks])))


def enumerate_types(n: int, include_constant: bool = False) -> list[SpectralType]:
    if n < 2:
        raise ValueError("n must be >= 2")
    return [t for t in _all_types(n) if include_constant or not t.is_constant]


def re_bound(t: SpectralType) -> Fraction:
    """max_j ((d_j/f_j - 1)/2 + [f_j >= 2]/2), using ||Re mu_j|| <= 1/2 for cusp forms."""
    return max(Fraction(d, f) / 2 - Fraction(1, 2) + (Fraction(1, 2) if f >= 2 else 0)
               for d, f in t.blocks)


def coincidence_count(t: SpectralType) -> Fraction:
    return sum((Fraction(d, 2) * (Fraction(d, f) - 1) for d, f in t.blocks), Fraction(0))


def supnorm_exponent(t: SpectralType) -> Fraction:
    return Fraction(t.n * (t.n - 1), 2) - coincidence_count(t)


def avg_supnorm_exponent(t: SpectralType) -> Fraction:
    return sum((Fraction(f * (f - 1), 2) for _, f in t.blocks), Fraction(0))


def cover_exponent(t: SpectralType) -> int:
    return sum(f for _, f in t.blocks) - 1


@dataclass(frozen=True)
class ExponentProfile:
    re_max: Fraction
    coincidence: Fraction
    supnorm_exp: Fraction
    avg_supnorm_exp: Fraction
    cover_exp: int


def profile(t: SpectralType) -> ExponentProfile:
    return ExponentProfile(re_bound(t), coincidence_count(t), supnorm_exponent(t),
                           avg_supnorm_exponent(t), cover_exponent(t))


def profile_row(t: SpectralType) -> dict:
    p = profile(t)
    return {"n": t.n, "blocks": [list(b) for b in t.blocks], "tags": t.tags,
            "re_bound": str(p.re_max), "coincidence": str(p.coincidence),
            "supnorm_exp": str(p.supnorm_exp), "avg_supnorm_exp": str(p.avg_supnorm_exp),
            "cover_exp": p.cover_exp}


@dataclass(frozen=True)
class SpectralPoint:
    type: SpectralType
    cusp_params: tuple[tuple[complex, ...], ...]
    s: tuple[complex, ...]
    assembled: SpectralParameter


def instantiate(t: SpectralType, s: Sequence[complex],
                cusp_params: Sequence[Sequence[complex] | None] | None = None,
                tol: float = 1e-9) -> SpectralPoint:
    """Assemble the n-vector: block j contributes mu_j + s_j + (d_j/f_j - 1 - 2k)/2, k < d_j/f_j.

    ``cusp_params[j]`` is the GL(f_j) parameter of block j (ignored/zero when f_j = 1).
    """
    if len(s) != t.r:
        raise ValueError(f"need {t.r} shifts s_j, got {len(s)}")
    s = tuple(complex(x) for x in s)
    if abs(sum(d * x for (d, _), x in zip(t.blocks, s))) > tol:
        raise ValueError("shifts must satisfy sum d_j s_j = 0")
    cusp_params = cusp_params or [None] * t.r
    if len(cusp_params) != t.r:
        raise ValueError("one cusp parameter per block")
    vec: list[complex] = []
    used = []
    for (d, f), sj, cp in zip(t.blocks, s, cusp_params):
        if f == 1:
            m = (0j,)
        else:
            if cp is None or len(cp) != f:
                raise ValueError(f"block ({d},{f}) needs a cusp parameter of length {f}")
            m = tuple(complex(x) for x in cp)
            if abs(sum(m)) > tol:
                raise ValueError("cusp parameters must sum to zero")
        used.append(m)
        q = d // f
        for k in range(q):
            shift = (q - 1 - 2 * k) / 2
            vec.extend(x + sj + shift for x in m)
    return SpectralPoint(t, tuple(used), s, SpectralParameter(tuple(vec)))


def supnorm_envelope(mu) -> float:
    """prod_{i<j} (1 + |mu_i - mu_j|)."""
    m = np.asarray(mu.mu if isinstance(mu, SpectralParameter) else mu, dtype=complex)
    diff = np.abs(m[:, None] - m[None, :])
    iu = np.triu_indices(len(m), 1)
    return float(np.prod(1 + diff[iu]))


# --- case tables for n = 3, 4 --------------------------------------------------

@dataclass(frozen=True)
class CaseGroup:
    """One group of cases with error term T^{t0 + t1*beta} delta^{d0 + d1*beta}."""
    name: str
    cases: tuple[str, ...]
    t_exp: tuple[Fraction, Fraction]
    delta_exp: tuple[Fraction, Fraction]
    beta_range: tuple[Fraction, Fraction] | None = None

    def at(self, beta: Fraction = Fraction(0)) -> tuple[Fraction, Fraction]:
        return (self.t_exp[0] + self.t_exp[1] * beta, self.delta_exp[0] + self.delta_exp[1] * beta)


F = Fraction


def _g(name, cases, t, d, beta=None):
    t = t if isinstance(t, tuple) else (F(t), F(0))
    d = d if isinstance(d, tuple) else (F(d), F(0))
    return CaseGroup(name, tuple(cases), t, d, beta)


# case labels per type (blocks sorted descending); subcases split tempered / non-tempered
CASE_LABELS = {
    3: {((3, 3),): ("1a", "1b"), ((2, 2), (1, 1)): ("2a", "2b"),
        ((2, 1), (1, 1)): ("3",), ((1, 1), (1, 1), (1, 1)): ("4",)},
    4: {((4, 4),): ("1a", "1b", "1c"), ((4, 2),): ("2",), ((3, 3), (1, 1)): ("3a", "3b"),
        ((3, 1), (1, 1)): ("4",), ((2, 2), (2, 2)): ("5a", "5b", "5c"),
        ((2, 2), (2, 1)): ("6a", "6b"), ((2, 1), (2, 1)): ("7",),
        ((2, 2), (1, 1), (1, 1)): ("8a", "8b"), ((2, 1), (1, 1), (1, 1)): ("9",),
        ((1, 1), (1, 1), (1, 1), (1, 1)): ("10",)},
}


def case_table(n: int) -> dict:
    """Grouped error terms for n = 3, 4 and the smoothing term T^{n(n-1)} delta.

    The beta group for n = 4 has delta exponent -5/2 + beta/2: the denominator
    exponent n(n-1)/4 + (1 + ||Re mu||)/2 with ||Re mu|| = beta, which gives
    delta^{-9/4} at beta = 1/2.
    """
    if n == 3:
        groups = [
            _g("tempered", ["1a", "2a", "4"], 3, -2),
            _g("non-tempered", ["1b", "2b", "3"], F(9, 2), F(-1, 2)),
        ]
    elif n == 4:
        groups = [
            _g("tempered", ["1a", "3a", "5a", "6a", "8a", "10"], 6, -4),
            _g("one non-tempered pair", ["1b", "3b", "5b", "8b", "9"], (F(6), F(4)),
               (F(-5, 2), F(1, 2)), (F(0), F(1, 2))),
            _g("two non-tempered pairs", ["1c", "2", "5c", "6b", "7"], 8, F(-1, 2)),
            _g("Epstein", ["4"], 10, 0),
        ]
    else:
        raise ValueError("case tables exist for n in {3, 4} only")
    smoothing = _g("smoothing", [], n * (n - 1), 1)
    return {"n": n, "groups": groups, "smoothing": smoothing}
