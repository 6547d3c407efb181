"""Measure the torus-chart normalisation kappa_n against the contour route."""
import json
from dataclasses import dataclass

from hyplat.sphtrans import KAPPA, calibrate_kappa, chi_transform_contour, chi_transform_direct


@dataclass
class CalibrationConfig:
    n2_point: tuple = (10.0, (1j, -1j))
    n3_point: tuple = (4.0, (0.7j, 0.2j, -0.9j))


def main(cfg: CalibrationConfig = CalibrationConfig()) -> None:
    for n, (T, mu) in ((2, cfg.n2_point), (3, cfg.n3_point)):
        k = calibrate_kappa(n, T, mu)
        print(json.dumps({"n": n, "T": T, "kappa": k, "frozen": KAPPA[n]}))
    # hold-out check at other points with the frozen value
    for n, T, mu in ((2, 100.0, (10j, -10j)), (2, 10.0, (0.3 + 2j, -0.3 - 2j)),
                     (3, 5.0, (1.1j, -0.4j, -0.7j))):
        c = chi_transform_contour(n, T, mu).value
        d = chi_transform_direct(n, T, mu).value
        print(json.dumps({"n": n, "T": T, "rel_diff": abs(c - d) / abs(c)}))


if __name__ == "__main__":
    main()
