"""Tabulate optimised smoothing exponents and the literature baselines."""
import argparse
from dataclasses import dataclass

from hyplat.expopt import baselines, optimize_theorem1, optimize_theorem2, small_rank_delta


@dataclass
class TableConfig:
    n_max: int = 20


def main(cfg: TableConfig) -> None:
    print(f"{'n':>4} {'DRS':>8} {'GNY':>8} {'thm1':>8} {'alpha1':>8} {'thm2':>8} "
          f"{'heur':>8}  witness")
    for n in range(3, cfg.n_max + 1):
        b = baselines(n)
        r1 = small_rank_delta(n) if n in (3, 4) else optimize_theorem1(n)
        r2 = optimize_theorem2(n)
        print(f"{n:>4} {float(b['DRS']):8.4f} {float(b['GNY']):8.4f} {r1.delta_gain:8.4f} "
              f"{r1.alpha_star:8.4f} {r2.delta_gain:8.4f} {float(b['heuristic']):8.4f}  "
              f"{r1.witness}{'  [' + r2.caveat + ']' if r2.caveat else ''}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-max", type=int, default=20)
    main(TableConfig(ap.parse_args().n_max))
