"""Example 2 (Y1 = X1 X2, Y2 = X1 xor X2): mixed interference and its sum capacity."""

from dmic import classify, sumcap
from dmic.reference import example2


def main():
    ch = example2()
    rep = classify.is_mixed(ch)
    print(f"mixed: {rep.mixed} (mixed MI condition min gap {rep.gap.min_gap:.3e})")
    res = sumcap.sum_capacity_mixed(ch)
    print(f"sum capacity {res.value:.12f} bits")
    for name, value in res.bounds.items():
        print(f"  {name}: {value:.6f}")


if __name__ == "__main__":
    main()
