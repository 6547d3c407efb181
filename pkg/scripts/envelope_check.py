"""Ratio of the n = 2 transform to its bounded-regime envelope along the tempered line."""
import argparse
import json
from dataclasses import dataclass

import numpy as np

from hyplat.sphtrans import chi_transform_contour, lemma3_envelope


@dataclass
class EnvelopeConfig:
    t_values: tuple = (10.0, 20.0, 40.0)
    tau_max: float = 50.0
    points: int = 101


def main(cfg: EnvelopeConfig) -> None:
    taus = np.linspace(0, cfg.tau_max, cfg.points)
    for T in cfg.t_values:
        r = [abs(chi_transform_contour(2, T, (1j * t, -1j * t)).value)
             / lemma3_envelope(2, T, (1j * t, -1j * t)) for t in taus]
        print(json.dumps({"T": T, "sup_ratio": max(r), "argmax_tau": float(taus[int(np.argmax(r))])}))


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--tau-max", type=float, default=50.0)
    main(EnvelopeConfig(tau_max=ap.parse_args().tau_max))
