"""Search for one-sided channels meeting the weak-interference MI condition without being degraded."""

import argparse

from dmic import optimize
from dmic.channel import dumps_channel
from dmic.classify import _gap_weak, counterexample_search, is_stochastically_degraded
from dmic.errors import Infeasible


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--trials", type=int, default=500)
    ap.add_argument("--sizes", default="2,2,2,2")
    ap.add_argument("--verify-step", type=float, default=0.01)
    args = ap.parse_args()
    sizes = tuple(int(s) for s in args.sizes.split(","))

    ch = counterexample_search(args.seed, args.trials, sizes)
    if ch is None:
        print("nothing found")
        return
    fine = optimize.grid_search(_gap_weak(ch), (ch.n_x1, ch.n_x2), args.verify_step, maximize=False)
    print(dumps_channel(ch))
    print(f"min gap on a {args.verify_step} lattice: {fine.value:.3e}")
    try:
        is_stochastically_degraded(ch)
    except Infeasible as exc:
        print(f"garbling LP residual: {exc.certificate:.3e}")


if __name__ == "__main__":
    main()
