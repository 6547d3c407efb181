"""Count SL_2(Z) and SL_3(Z) balls over a T-grid and fit the error exponent."""
import argparse
import json
from dataclasses import asdict, dataclass, field
from fractions import Fraction

from hyplat.exactlat import BallSpec, count_identity_ball
from hyplat.mainterm import fit_error_exponent, main_constant


DEFAULT_T = {2: [20, 40, 60, 80, 100, 150, 200], 3: [4, 6, 8, 10]}


@dataclass
class ScanConfig:
    n: int = 2
    t_values: list[int] = field(default_factory=list)
    workers: int = 1

    def __post_init__(self):
        if not self.t_values:
            self.t_values = DEFAULT_T.get(self.n, [2, 3, 4])


def run(cfg: ScanConfig) -> dict:
    c = float(main_constant(cfg.n).value)
    rows = []
    for T in cfg.t_values:
        rec = count_identity_ball(BallSpec(cfg.n, Fraction(T * T)), cfg.workers)
        main = c * T ** (cfg.n * (cfg.n - 1))
        rows.append({"T": T, "count": rec.count, "ratio": rec.count / main,
                     "error": rec.count - main, "seconds": round(rec.seconds, 3)})
        print(json.dumps(rows[-1]), flush=True)
    fit = fit_error_exponent(cfg.n, [(r["T"], r["count"]) for r in rows])
    return {"config": asdict(cfg), "rows": rows, "fitted_error_exponent": fit.fitted_error_exponent}


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=2)
    ap.add_argument("--t-values", type=lambda s: [int(x) for x in s.split(",")])
    ap.add_argument("--workers", type=int, default=1)
    a = ap.parse_args()
    cfg = ScanConfig(a.n, a.t_values or [], a.workers)
    out = run(cfg)
    print(json.dumps({"fitted_error_exponent": out["fitted_error_exponent"]}))
