"""Example 1: classification, sum capacity and the collapsed degraded construction."""

import argparse
import json

from dmic import classify, sumcap
from dmic.outer_bound import construct_y2prime
from dmic.reference import example1


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--grid-step", type=float, default=0.05)
    ap.add_argument("--oracle-step", type=float, default=0.01)
    args = ap.parse_args()

    ch = example1()
    w = classify.is_physically_degraded_zic(ch)
    print("p(y1|x1,y2) witness:", w.q.rows.tolist())
    print("weak MI condition min gap:", classify.weak_mi_gap(ch).min_gap)
    res = sumcap.sum_capacity_weak(ch, sumcap.SumCapConfig(grid_step=args.grid_step))
    orc = sumcap.grid_oracle(ch, "weak", args.oracle_step)
    print(f"sum capacity {res.value:.9f} bits (oracle {orc.value:.9f})")
    print(json.dumps(res.argmax.to_dict()))
    dc = construct_y2prime(ch, collapse=True)
    print("p(y2'|x1,x2):", dc.bc.rows.tolist())
    print("p(y1|y2'):", dc.link.rows.tolist())


if __name__ == "__main__":
    main()
