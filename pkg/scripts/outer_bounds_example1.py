"""Outer bounds for Example 1 written as CSV frontiers, with a short comparison table."""

import argparse
from pathlib import Path

import numpy as np

from dmic.outer_bound import analytic_outer_bound, basic_outer_bound, construct_y2prime, dbc_region
from dmic.reference import example1


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="results")
    ap.add_argument("--refine-step", type=float, default=0.02)
    args = ap.parse_args()
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    ch = example1()
    dc = construct_y2prime(ch, collapse=True)
    regions = {
        "dbc": dbc_region(dc, refine_step=args.refine_step),
        "analytic": analytic_outer_bound(dc),
        "basic": basic_outer_bound(ch),
    }
    for name, reg in regions.items():
        (out / f"example1_{name}.csv").write_text(reg.to_csv())
        print(name, reg.summary())
    print("\n  R1    " + "  ".join(f"{n:>8}" for n in regions))
    for r1 in np.linspace(0, 0.3, 7):
        print(f"{r1:5.2f}   " + "  ".join(f"{float(reg.r2_at(r1)):8.4f}" for reg in regions.values()))


if __name__ == "__main__":
    main()
