"""Relay error rate of XOR decoding against joint decoding as the relay link degrades.

Both decoders see the same codes, messages and noise for a given trial, so the
difference is purely the decoding rule at the relay.
"""
import argparse

import numpy as np

from cmacr.binary_region import BinaryScenario
from cmacr.gf2_sim import SimConfig, run_sim
from cmacr.tables import write_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--n", type=int, default=24)
    ap.add_argument("--k", type=int, default=6)
    ap.add_argument("--eps", type=float, default=0.05, help="source-to-receiver crossover")
    ap.add_argument("--trials", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="results/xor_vs_joint.csv")
    args = ap.parse_args()

    rows = []
    for eps3 in np.round(np.arange(0.0, 0.26, 0.025), 3):
        kw = dict(scenario=BinaryScenario(args.eps, args.eps, float(eps3)), n=args.n, k1=args.k, k2=args.k,
                  trials=args.trials, master_seed=args.seed)
        x = run_sim(SimConfig(relay_decoder="xor", **kw))
        j = run_sim(SimConfig(relay_decoder="joint", **kw))
        rows.append((float(eps3), x.relay_error_rate, j.relay_error_rate,
                     x.end_to_end_error_rate, j.end_to_end_error_rate))
        print(f"eps3={eps3:.3f}  relay xor {rows[-1][1]:.4f}  joint {rows[-1][2]:.4f}")
    write_csv(args.out, ["eps3", "relay_xor", "relay_joint", "e2e_xor", "e2e_joint"], rows,
              "relay decoding rule comparison", vars(args))


if __name__ == "__main__":
    main()
