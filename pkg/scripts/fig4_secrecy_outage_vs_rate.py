"""Both secrecy outage formulations, p_s and p_so, vs secrecy rate.

Legitimate link at 5 dB and one eavesdropper branch at 0 dB, for a
Rayleigh, a Nakagami (m = 5) and a Rician (K = 5) eavesdropper. The
legitimate link is Rayleigh and mu = gamma.
"""
import argparse
import csv
from pathlib import Path

import numpy as np

from secduality import FadingModel, SecrecyScenario, duality_map, p_s, p_so

EAVESDROPPERS = {
    "rayleigh": FadingModel.rayleigh(1.0),
    "nakagami_m5": FadingModel.nakagami(5.0, 1.0),
    "rice_k5": FadingModel.rice(5.0, 1.0),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("results/fig4.csv"))
    args = ap.parse_args()

    desired = FadingModel.rayleigh(10 ** 0.5)
    rows = [["eavesdropper", "rate_bits", "p_s", "p_so"]]
    for name, eve in EAVESDROPPERS.items():
        for rate in np.arange(0.1, 4.01, 0.1):
            sc = SecrecyScenario(desired, [eve], rate=float(rate), mu=duality_map(float(rate)).gamma)
            rows.append([name, f"{rate:.1f}", f"{p_s(sc):.12g}", f"{p_so(sc):.12g}"])
    args.out.parent.mkdir(parents=True, exist_ok=True)
    with args.out.open("w", newline="") as fh:
        csv.writer(fh, lineterminator="\n").writerows(rows)
    print(f"wrote {len(rows) - 1} rows to {args.out}")


if __name__ == "__main__":
    main()
