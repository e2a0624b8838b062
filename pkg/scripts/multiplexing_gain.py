"""Ratio of each equal rate to 0.5 log2 P as the power grows.

Shows how slowly the ratios approach their limits: the lattice ratio carries
a constant offset of order 0.5 log2(gamma2) / (0.5 log2 P).
"""
import argparse
import math

import numpy as np

from cmacr.cmacr_regions import GaussianScenario, lattice_equal_rate, symmetric_df_rate, symmetric_upper_bound
from cmacr.numerics import db_to_linear
from cmacr.tables import write_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--gamma2", type=float, default=0.1)
    ap.add_argument("--eta2", type=float, default=10.0)
    ap.add_argument("--out", default="results/multiplexing_gain.csv")
    args = ap.parse_args()

    rows = []
    for p_db in np.arange(20, 401, 20):
        P = db_to_linear(float(p_db))
        s = GaussianScenario.symmetric(P, args.gamma2, args.eta2)
        ref = 0.5 * math.log2(P)
        rows.append((float(p_db), symmetric_df_rate(s) / ref, lattice_equal_rate(s) / ref,
                     symmetric_upper_bound(s) / ref))
        print("P={:4.0f} dB  df {:.4f}  lattice {:.4f}  upper {:.4f}".format(*rows[-1]))
    write_csv(args.out, ["p_db", "df_ratio", "lattice_ratio", "upper_ratio"], rows,
              "equal rate over 0.5 log2 P", vars(args))


if __name__ == "__main__":
    main()
