"""Probability of positive secrecy capacity vs mean legitimate SNR.

Rayleigh legitimate link, one Rician eavesdropper branch at 0 dB with
K in {1, 5, 10}. Larger K should lower p_s_plus at every SNR.
"""
import argparse
import csv
from pathlib import Path

import numpy as np

from secduality import FadingModel, SecrecyScenario, p_s_plus


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("results/fig3.csv"))
    args = ap.parse_args()

    rows = [["K", "mean_snr_db", "p_s_plus"]]
    for K in (1.0, 5.0, 10.0):
        eve = FadingModel.rice(K, 1.0)
        for db in np.arange(0.0, 41.0, 1.0):
            sc = SecrecyScenario(FadingModel.rayleigh(10 ** (db / 10)), [eve])
            rows.append([f"{K:g}", f"{db:g}", f"{p_s_plus(sc):.12g}"])
    args.out.parent.mkdir(parents=True, exist_ok=True)
    with args.out.open("w", newline="") as fh:
        csv.writer(fh, lineterminator="\n").writerows(rows)
    print(f"wrote {len(rows) - 1} rows to {args.out}")


if __name__ == "__main__":
    main()
