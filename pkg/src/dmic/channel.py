"""Channel objects for two-user discrete memoryless interference channels.

A channel is stored as a dense array ``p[x1, x2, y1, y2]``. Composite indices
such as ``(x1, x2)`` or ``(x1, y2)`` are flattened row-major with ``x1`` as
the slow index, so the row for ``(x1, y2)`` is ``x1 * n_y2 + y2``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import InputError, NegativeEntry, RowSumViolation, ShapeMismatch

ROW_TOL = 1e-9
LABELS = ("X1", "X2", "Y1", "Y2")


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def _check_stochastic(rows: np.ndarray, index_of, tol: float = ROW_TOL) -> None:
    if not np.all(np.isfinite(rows)):
        raise InputError("non-finite probability entry")
    if np.any(rows < 0):
        bad = tuple(int(i) for i in np.argwhere(rows < 0)[0])
        raise NegativeEntry(f"negative probability at index {bad}")
    sums = rows.reshape(rows.shape[: rows.ndim - index_of] + (-1,)).sum(axis=-1)
    dev = np.abs(sums - 1.0)
    if np.any(dev > tol):
        bad = tuple(int(i) for i in np.argwhere(dev > tol)[0])
        raise RowSumViolation(bad, float(sums[bad]))


@dataclass(frozen=True)
class ChannelTensor:
    """Joint transition law ``p(y1, y2 | x1, x2)``; build it with :func:`validate_channel`."""

    p: np.ndarray

    @property
    def shape(self) -> tuple[int, int, int, int]:
        return tuple(int(s) for s in self.p.shape)

    @property
    def n_x1(self) -> int:
        return self.p.shape[0]

    @property
    def n_x2(self) -> int:
        return self.p.shape[1]

    @property
    def n_y1(self) -> int:
        return self.p.shape[2]

    @property
    def n_y2(self) -> int:
        return self.p.shape[3]

    def __eq__(self, other):
        return isinstance(other, ChannelTensor) and np.array_equal(self.p, other.p)

    def __hash__(self):
        return hash((self.shape, self.p.tobytes()))


@dataclass(frozen=True)
class Dmc:
    """Row-stochastic matrix ``rows[input, output]``."""

    rows: np.ndarray

    def __post_init__(self):
        rows = _frozen(self.rows)
        if rows.ndim != 2 or min(rows.shape) < 1:
            raise ShapeMismatch(f"a DMC needs a non-empty 2-D array, got shape {rows.shape}")
        _check_stochastic(rows, 1)
        object.__setattr__(self, "rows", rows)

    @property
    def n_in(self) -> int:
        return self.rows.shape[0]

    @property
    def n_out(self) -> int:
        return self.rows.shape[1]

    def __eq__(self, other):
        return isinstance(other, Dmc) and np.array_equal(self.rows, other.rows)

    def __hash__(self):
        return hash((self.rows.shape, self.rows.tobytes()))


@dataclass(frozen=True)
class ProductInput:
    """Independent input laws ``p(x1) p(x2)``."""

    p1: np.ndarray
    p2: np.ndarray

    def __post_init__(self):
        for name in ("p1", "p2"):
            v = _frozen(getattr(self, name))
            if v.ndim != 1 or v.size < 1:
                raise ShapeMismatch(f"{name} must be a non-empty vector")
            _check_stochastic(v[None, :], 1)
            object.__setattr__(self, name, v)

    @classmethod
    def uniform(cls, n1: int, n2: int) -> "ProductInput":
        return cls(np.full(n1, 1.0 / n1), np.full(n2, 1.0 / n2))

    def to_dict(self) -> dict:
        return {"p_x1": self.p1.tolist(), "p_x2": self.p2.tolist()}


@dataclass(frozen=True)
class JointDistribution:
    """Joint law over labelled finite variables; ``mass`` has one axis per label."""

    labels: tuple[str, ...]
    mass: np.ndarray = field(repr=False)

    def __post_init__(self):
        mass = _frozen(self.mass)
        labels = tuple(self.labels)
        if mass.ndim != len(labels) or len(set(labels)) != len(labels):
            raise ShapeMismatch("one distinct label per axis is required")
        if np.any(mass < 0) or abs(mass.sum() - 1.0) > ROW_TOL:
            raise InputError("joint mass must be nonnegative and sum to 1")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "mass", mass)

    @property
    def dims(self) -> tuple[int, ...]:
        return self.mass.shape

    def axes(self, group: str | Sequence[str]) -> tuple[int, ...]:
        names = (group,) if isinstance(group, str) else tuple(group)
        try:
            return tuple(self.labels.index(n) for n in names)
        except ValueError as exc:
            raise InputError(f"unknown variable in {names}; have {self.labels}") from exc

    def marginal(self, group: str | Sequence[str]) -> np.ndarray:
        """Marginal over ``group``, axes kept in the order given."""
        keep = self.axes(group)
        drop = tuple(i for i in range(self.mass.ndim) if i not in keep)
        m = self.mass.sum(axis=drop)
        order = np.argsort(np.argsort(keep))
        return np.transpose(m, order) if m.ndim > 1 else m


def validate_channel(data, shape: Sequence[int] | None = None) -> ChannelTensor:
    """Check ``data`` is a valid ``[x1][x2][y1][y2]`` tensor and wrap it."""
    try:
        p = np.array(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ShapeMismatch(f"channel data is not a rectangular numeric array: {exc}") from exc
    if p.ndim != 4 or min(p.shape) < 1:
        raise ShapeMismatch(f"channel tensor must be 4-D and non-empty, got shape {p.shape}")
    if shape is not None and tuple(p.shape) != tuple(shape):
        raise ShapeMismatch(f"declared shape {tuple(shape)} but data has shape {p.shape}")
    _check_stochastic(p, 2)
    if np.any(p > 1.0):
        raise InputError("probability entry above 1")
    return ChannelTensor(_frozen(p))


def marginal_y1(ch: ChannelTensor) -> Dmc:
    return Dmc(ch.p.sum(axis=3).reshape(ch.n_x1 * ch.n_x2, ch.n_y1))


def marginal_y2(ch: ChannelTensor) -> Dmc:
    return Dmc(ch.p.sum(axis=2).reshape(ch.n_x1 * ch.n_x2, ch.n_y2))


def compose_zic(py2_given_x2: Dmc, py1_given_x1y2: Dmc) -> ChannelTensor:
    """Physically degraded one-sided channel ``p(y2|x2) p'(y1|x1,y2)``."""
    n_x2, n_y2 = py2_given_x2.rows.shape
    n_rows, n_y1 = py1_given_x1y2.rows.shape
    if n_rows % n_y2:
        raise ShapeMismatch(f"p'(y1|x1,y2) has {n_rows} rows, not a multiple of |Y2|={n_y2}")
    n_x1 = n_rows // n_y2
    pp = py1_given_x1y2.rows.reshape(n_x1, n_y2, n_y1)
    p = np.einsum("bt,atc->abct", py2_given_x2.rows, pp)
    return validate_channel(p)


def independent_channels(py1_given_x1: Dmc, py2_given_x2: Dmc) -> ChannelTensor:
    """Two decoupled point-to-point links (no interference at all)."""
    return validate_channel(np.einsum("ac,bt->abct", py1_given_x1.rows, py2_given_x2.rows))


def deterministic_channel(f1, f2, n_x1: int, n_x2: int, n_y1: int, n_y2: int) -> ChannelTensor:
    """Channel with ``y1 = f1(x1, x2)`` and ``y2 = f2(x1, x2)``."""
    p = np.zeros((n_x1, n_x2, n_y1, n_y2))
    for a in range(n_x1):
        for b in range(n_x2):
            p[a, b, f1(a, b), f2(a, b)] = 1.0
    return validate_channel(p)


def joint_under_input(ch: ChannelTensor, inp: ProductInput) -> JointDistribution:
    if inp.p1.size != ch.n_x1 or inp.p2.size != ch.n_x2:
        raise ShapeMismatch("input distribution sizes do not match the channel alphabets")
    mass = inp.p1[:, None, None, None] * inp.p2[None, :, None, None] * ch.p
    return JointDistribution(LABELS, mass / mass.sum())


# -- file format -----------------------------------------------------------------


def channel_from_dict(obj: dict) -> ChannelTensor:
    if not isinstance(obj, dict):
        raise InputError("channel file must hold a JSON object")
    if "p" in obj:
        shape = [obj.get(k) for k in ("x1", "x2", "y1", "y2")]
        if any(s is None for s in shape):
            raise ShapeMismatch("tensor form needs x1, x2, y1, y2 alphabet sizes")
        return validate_channel(obj["p"], shape=shape)
    if "p_y2_given_x2" in obj and "p_y1_given_x1y2" in obj:
        py2 = Dmc(np.array(obj["p_y2_given_x2"], dtype=float))
        py1 = Dmc(np.array(obj["p_y1_given_x1y2"], dtype=float))
        return compose_zic(py2, py1)
    raise InputError("expected keys 'p' (tensor form) or 'p_y2_given_x2'/'p_y1_given_x1y2'")


def channel_to_dict(ch: ChannelTensor) -> dict:
    return {"x1": ch.n_x1, "x2": ch.n_x2, "y1": ch.n_y1, "y2": ch.n_y2, "p": ch.p.tolist()}


def dumps_channel(ch: ChannelTensor) -> str:
    return json.dumps(channel_to_dict(ch)) + "\n"


def loads_channel(text: str) -> ChannelTensor:
    return channel_from_dict(json.loads(text))


def load_channel(path: str | Path) -> ChannelTensor:
    return loads_channel(Path(path).read_text())


def save_channel(ch: ChannelTensor, path: str | Path) -> None:
    Path(path).write_text(dumps_channel(ch))
