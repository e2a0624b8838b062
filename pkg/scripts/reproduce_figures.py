"""Write the CSV data behind every figure into one directory."""
import argparse
import time
from pathlib import Path

from cmacr.cli import FIGURES


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="results/figures")
    args = ap.parse_args()
    out = Path(args.out_dir)
    for fig, fn in sorted(FIGURES.items()):
        t0 = time.perf_counter()
        paths = fn(out)
        print(f"figure {fig}: {len(paths)} files in {time.perf_counter() - t0:.1f} s")


if __name__ == "__main__":
    main()
