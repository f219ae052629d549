"""Entropy and mutual information in bits, plus binary-entropy helpers."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .channel import JointDistribution
from .errors import InvalidDistribution, OutOfRange, OverlappingGroups

ZERO_MASS = 1e-15
MI_NEG_TOL = 1e-12

Group = str | Sequence[str]


def _plogp(p: np.ndarray) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    safe = np.where(p > ZERO_MASS, p, 1.0)
    return np.where(p > ZERO_MASS, p * np.log2(safe), 0.0)


def entropy(dist) -> float:
    """Shannon entropy of a probability vector (any shape is flattened)."""
    p = np.asarray(dist, dtype=float).ravel()
    if p.size == 0 or not np.all(np.isfinite(p)) or np.any(p < 0) or abs(p.sum() - 1.0) > 1e-9:
        raise InvalidDistribution("entropy needs a nonnegative vector summing to 1")
    return float(max(-_plogp(p).sum(), 0.0))


def h2(p):
    """Binary entropy function, vectorised."""
    p = np.asarray(p, dtype=float)
    out = -(_plogp(p) + _plogp(1.0 - p))
    return float(out) if out.ndim == 0 else out


def _clamp(value: float) -> float:
    if value < -MI_NEG_TOL:
        # larger negatives mean a broken joint, not rounding
        raise InvalidDistribution(f"information measure came out negative: {value}")
    return max(value, 0.0)


def _names(group: Group) -> tuple[str, ...]:
    return (group,) if isinstance(group, str) else tuple(group)


def _disjoint(*groups: Group) -> list[tuple[str, ...]]:
    names = [_names(g) for g in groups]
    seen: set[str] = set()
    for g in names:
        if seen & set(g) or len(set(g)) != len(g):
            raise OverlappingGroups(f"variable groups overlap: {names}")
        seen |= set(g)
    return names


def _H(joint: JointDistribution, names: tuple[str, ...]) -> float:
    if not names:
        return 0.0
    return -float(_plogp(joint.marginal(names)).sum())


def mutual_information(joint: JointDistribution, a: Group, b: Group) -> float:
    a, b = _disjoint(a, b)
    return _clamp(_H(joint, a) + _H(joint, b) - _H(joint, a + b))


def conditional_mutual_information(joint: JointDistribution, a: Group, b: Group, c: Group) -> float:
    a, b, c = _disjoint(a, b, c)
    return _clamp(_H(joint, a + c) + _H(joint, b + c) - _H(joint, a + b + c) - _H(joint, c))


def check_markov(joint: JointDistribution, a: Group, b: Group, c: Group, tol: float = 1e-9) -> bool:
    """True iff ``a - b - c`` is a Markov chain, i.e. ``I(a; c | b) <= tol``."""
    return conditional_mutual_information(joint, a, c, b) <= tol


def binary_entropy_inverse(h: float) -> float:
    """The ``p`` in ``[0, 1/2]`` with ``h2(p) = h``, by bisection."""
    if not 0.0 <= h <= 1.0:
        raise OutOfRange(f"binary entropy must lie in [0, 1], got {h}")
    if h == 0.0:
        return 0.0
    if h == 1.0:
        return 0.5
    lo, hi = 0.0, 0.5
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if h2(mid) < h:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def binary_convolution(a: float, b: float) -> float:
    """``a * (1 - b) + b * (1 - a)``: crossover of two cascaded BSCs."""
    for v in (a, b):
        if not 0.0 <= v <= 1.0:
            raise OutOfRange(f"probability out of [0, 1]: {v}")
    return a + b - 2.0 * a * b


# -- batched evaluation ------------------------------------------------------------
# The optimisers evaluate thousands of inputs at once. Arrays carry a leading batch
# axis followed by one axis per variable.


def batch_entropy(mass: np.ndarray, keep: Sequence[int]) -> np.ndarray:
    """Entropy of the marginal on variable axes ``keep`` (0-based, batch axis excluded)."""
    nvar = mass.ndim - 1
    drop = tuple(1 + i for i in range(nvar) if i not in keep)
    m = mass.sum(axis=drop) if drop else mass
    return -_plogp(m).reshape(m.shape[0], -1).sum(axis=1)


def batch_cmi(mass: np.ndarray, a: Sequence[int], b: Sequence[int], c: Sequence[int] = ()) -> np.ndarray:
    """``I(a; b | c)`` for every batch row; no clamping."""
    a, b, c = tuple(a), tuple(b), tuple(c)
    hc = batch_entropy(mass, c) if c else 0.0
    return batch_entropy(mass, a + c) + batch_entropy(mass, b + c) - batch_entropy(mass, a + b + c) - hc
