"""Brute-force references kept independent of the package's numpy paths."""

import math
from collections import defaultdict
from itertools import product


def atoms(p1, p2, tensor):
    """Enumerate (probability, (x1, x2, y1, y2)) for a nested-list channel."""
    out = []
    for a, b in product(range(len(p1)), range(len(p2))):
        for c, row in enumerate(tensor[a][b]):
            for d, v in enumerate(row):
                w = p1[a] * p2[b] * v
                if w > 0:
                    out.append((w, (a, b, c, d)))
    return out


def H(atom_list, idx):
    m = defaultdict(float)
    for w, o in atom_list:
        m[tuple(o[i] for i in idx)] += w
    return -sum(w * math.log2(w) for w in m.values() if w > 0)


def I(atom_list, a, b, c=()):
    a, b, c = tuple(a), tuple(b), tuple(c)
    return H(atom_list, a + c) + H(atom_list, b + c) - H(atom_list, a + b + c) - (H(atom_list, c) if c else 0.0)


def h2(p):
    return 0.0 if p in (0.0, 1.0) else -p * math.log2(p) - (1 - p) * math.log2(1 - p)
