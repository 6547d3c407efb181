"""Error-exponent optimisation over the smoothing width delta = T^{-alpha}.

Every objective is an exponent of T with the epsilons dropped.  Closed forms are
cross-checked by a grid-plus-golden-section oracle that only ever evaluates the
objective.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .spectrum import case_table

ALPHA_LO, ALPHA_HI = 0.01, 1.99
GRID_STEP = 1e-3
INVPHI = (math.sqrt(5) - 1) / 2


@dataclass
class OptimizationResult:
    n: int
    alpha_star: float
    error_exponent: float
    delta_gain: float
    witness: str
    method: str
    discrepancy: float | None = None
    closed_alpha: float | None = None
    caveat: str | None = None
    exact: dict = field(default_factory=dict)

    def to_row(self) -> dict:
        return {"n": self.n, "alpha_star": self.alpha_star, "error_exponent": self.error_exponent,
                "delta": self.delta_gain, "witness": self.witness, "method": self.method,
                "discrepancy": self.discrepancy, "caveat": self.caveat}


def golden_min(f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-9) -> float:
    """Golden-section search for the minimiser of a unimodal f on [lo, hi]."""
    a, b = lo, hi
    x1 = b - INVPHI * (b - a)
    x2 = a + INVPHI * (b - a)
    f1, f2 = f(x1), f(x2)
    while b - a > tol:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - INVPHI * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + INVPHI * (b - a)
            f2 = f(x2)
    return (a + b) / 2


def grid_minimize(f: Callable[[float], float], lo: float = ALPHA_LO, hi: float = ALPHA_HI,
                  step: float = GRID_STEP, tol: float = 1e-9) -> float:
    """Scan [lo, hi] at ``step``, then refine around the best grid point by golden section."""
    k = int(round((hi - lo) / step))
    best = min(range(k + 1), key=lambda i: f(lo + i * step))
    a = max(lo, lo + (best - 1) * step)
    b = min(hi, lo + (best + 1) * step)
    return golden_min(f, a, b, tol)


# --- general n >= 5 ---------------------------------------------------------

def phi(alpha: float, n: int, d: float, f: float) -> float:
    if not (1 <= f <= d <= n) or alpha <= 0:
        raise ValueError("need 1 <= f <= d <= n and alpha > 0")
    return (n * (n - 1) / 2 + n * d / (2 * f)
            - alpha * (-n * (n + 1) / 4 + 1.5 + 0.5 * (d * d / f - 2 * f - n + d)))


def psi_pieces(alpha: float, n: int) -> tuple[float, float, float]:
    smoothing = n * (n - 1) - alpha
    diag = n * n / 4 * (alpha + 2) + 3 * alpha * n / 4 - 1.5 * alpha
    interior = n * n / 4 * (alpha + 1 / (2 * alpha) + 2) + 0.75 * n * (alpha - 1) - 0.375 * alpha
    return smoothing, diag, interior


PSI_NAMES = ("smoothing", "f = d", "f = 1, d = d0")


def psi(alpha: float, n: int) -> float:
    if n < 5:
        raise ValueError("psi is the n >= 5 objective; use small_rank_delta for n in {3, 4}")
    if not 0 < alpha < 2:
        raise ValueError("alpha must lie in (0, 2)")
    return max(psi_pieces(alpha, n))


def hand_case_exponent(n: int) -> float:
    """The d_1 = n-1, f_1 = 1 case, handled separately: T^{n(n-1) - n/2}."""
    return n * (n - 1) - n / 2


def theorem1_closed_alpha(n: int) -> float:
    if n == 5:
        return 5 / math.sqrt(77)
    return n / (2 * n - 1 - math.sqrt(2 * n * n - 10 * n - 4))


def theorem1_closed_delta(n: int) -> float:
    if n == 5:
        return 5 * (9 - math.sqrt(77)) / 4
    return theorem1_closed_alpha(n)


def optimize_theorem1(n: int) -> OptimizationResult:
    if n < 5:
        raise ValueError("n must be >= 5; use small_rank_delta")
    a_grid = grid_minimize(lambda a: psi(a, n))
    a_closed = theorem1_closed_alpha(n)
    e_closed = n * (n - 1) - theorem1_closed_delta(n)
    pieces = psi_pieces(a_closed, n)
    top = max(pieces)
    witness = " = ".join(name for name, v in zip(PSI_NAMES, pieces) if top - v <= 1e-9 * abs(top))
    return OptimizationResult(
        n=n, alpha_star=a_closed, error_exponent=e_closed, delta_gain=n * (n - 1) - e_closed,
        witness=witness, method="CLOSED_FORM", discrepancy=abs(a_closed - a_grid),
        closed_alpha=a_closed,
        exact={"grid_alpha": a_grid, "grid_error_exponent": psi(a_grid, n),
               "closed_psi": psi(a_closed, n)})


# --- n = 3, 4 ------------------------------------------------------------------

Affine = tuple[Fraction, Fraction]  # value = c0 + c1 * alpha


def _small_rank_pieces(n: int, scale: Fraction = Fraction(1)) -> list[tuple[str, Affine]]:
    """Exponents T^{t} delta^{d} -> t - alpha*d (delta = T^-alpha), sup over beta taken."""
    table = case_table(n)
    pieces = []
    for g in table["groups"]:
        betas = [Fraction(0)] if g.beta_range is None else list(g.beta_range)
        # affine in beta, so the sup over (0, 1/2] is at an end point (closure at 0)
        for b in betas:
            t, d = g.at(b)
            label = g.name if g.beta_range is None else f"{g.name} (beta={b})"
            pieces.append((label, (scale * t, -scale * d)))
    t, d = table["smoothing"].at()
    pieces.append(("smoothing", (scale * t, -scale * d)))
    return pieces


def _minimax_affine(pieces: list[tuple[str, Affine]], lo: Fraction, hi: Fraction):
    """Exact minimiser of the max of affine functions on [lo, hi]."""
    cands = {lo, hi}
    for i in range(len(pieces)):
        for j in range(i + 1, len(pieces)):
            (a0, a1), (b0, b1) = pieces[i][1], pieces[j][1]
            if a1 != b1:
                x = (b0 - a0) / (a1 - b1)
                if lo <= x <= hi:
                    cands.add(x)

    def top(x):
        return max(c0 + c1 * x for _, (c0, c1) in pieces)

    best = min(sorted(cands), key=top)
    return best, top(best)


def small_rank_delta(n: int, scale: Fraction = Fraction(1)) -> OptimizationResult:
    """Exact minimax over alpha in (0, 2) of the case-table error terms."""
    if n not in (3, 4):
        raise ValueError("small_rank_delta handles n in {3, 4}")
    pieces = _small_rank_pieces(n, Fraction(scale))
    alpha, value = _minimax_affine(pieces, Fraction(0), Fraction(2))
    active = [name for name, (c0, c1) in pieces if c0 + c1 * alpha == value]
    a_grid = grid_minimize(lambda a: max(float(c0) + float(c1) * a for _, (c0, c1) in pieces))
    err = value / scale
    gain = n * (n - 1) - err
    return OptimizationResult(
        n=n, alpha_star=float(alpha), error_exponent=float(err), delta_gain=float(gain),
        witness=" = ".join(active), method="CLOSED_FORM", discrepancy=abs(float(alpha) - a_grid),
        closed_alpha=float(alpha),
        exact={"alpha": alpha, "error_exponent": err, "delta": gain, "grid_alpha": a_grid})


# --- large-n variant: spectral sum split by f = 1 ------------------------------

def phi_tilde(alpha: float, n: int, d: float, f: float) -> float:
    if not (1 <= f <= d <= n) or not 0 < alpha < 2:
        raise ValueError("need 1 <= f <= d <= n and 0 < alpha < 2")
    base = n * (n - 1) / 2 + n / 2 * (d / f - (1 if f == 1 else 0))
    inner = n * (n - 1) / 4 + 1.5 - 0.5 * (f * f + d) - 0.5 * (n - d) * (n - d + 1)
    return base + max(0.0, -alpha * inner)


BOUNDARY_POINTS = ("(1,1)", "(n-1,1)", "(2,2)", "(n,2)", "(n,n)")


def phi_tilde_boundary(alpha: float, n: int) -> dict[str, float]:
    pts = [(1, 1), (n - 1, 1), (2, 2), (n, 2), (n, n)]
    return {name: phi_tilde(alpha, n, d, f) for name, (d, f) in zip(BOUNDARY_POINTS, pts)}


def theorem2_closed_alpha(n: int) -> float:
    return 2 * (n * n - 2 * n) / (n * n + 3 * n - 2)


def theorem2_reduced(alpha: float, n: int) -> float:
    return max(n * (n - 1) - alpha, n * n - 1.5 * n, (2 + alpha) * n * n / 4 + 0.75 * alpha * (n - 2))


def theorem2_full(alpha: float, n: int) -> float:
    return max([n * (n - 1) - alpha, *phi_tilde_boundary(alpha, n).values()])


def optimize_theorem2(n: int, min_n: int = 5) -> OptimizationResult:
    a_closed = theorem2_closed_alpha(n)
    e_closed = theorem2_reduced(a_closed, n)
    a_grid = grid_minimize(lambda a: theorem2_full(a, n))
    vals = {"smoothing": n * (n - 1) - a_grid, **phi_tilde_boundary(a_grid, n)}
    witness = max(vals, key=vals.get)
    caveat = None
    if n < min_n:
        caveat = f"n = {n} below {min_n}: the large-n reduction of the maximum is not asserted"
    if witness not in ("smoothing", "(n,n)", "(n-1,1)"):
        caveat = (caveat + "; " if caveat else "") + f"candidate {witness} wins at the grid optimum"
    return OptimizationResult(
        n=n, alpha_star=a_closed, error_exponent=e_closed, delta_gain=n * (n - 1) - e_closed,
        witness=witness, method="CLOSED_FORM", discrepancy=abs(a_closed - a_grid),
        closed_alpha=a_closed, caveat=caveat,
        exact={"grid_alpha": a_grid, "grid_error_exponent": theorem2_full(a_grid, n)})


# --- literature baselines ------------------------------------------------------

def theorem1_delta(n: int) -> float:
    if n in (3, 4):
        return float(small_rank_delta(n).exact["delta"])
    return theorem1_closed_delta(n)


def baselines(n: int) -> dict:
    if n < 2:
        raise ValueError("n must be >= 2")
    eta = 0 if n % 2 == 0 else 1
    out = {"n": n,
           "DRS": Fraction(1, n + 1),
           "GNY": Fraction(2 * (n - 1), (n + 1) * (n + eta)),
           "heuristic": Fraction(2 * (n - 1), n + 1),
           "thm2": Fraction(2 * (n * n - 2 * n), n * n + 3 * n - 2)}
    out["thm1"] = theorem1_delta(n) if n >= 3 else None
    return out
