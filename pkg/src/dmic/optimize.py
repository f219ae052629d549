"""Global maximisation over products of probability simplices.

Objectives are batched: ``fun(blocks)`` receives one ``(N, n_k)`` array per simplex
block and returns ``N`` values. Two stages are provided: an exhaustive lattice
search (the certificate) and a multistart projected-gradient ascent that only
refines. Both are deterministic; block-parallel evaluation reduces in a fixed
order so results do not depend on the worker count.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .errors import BudgetExceeded, InputError

Objective = Callable[[list[np.ndarray]], np.ndarray]

CHUNK = 1 << 15
# values this close count as equal when choosing among maxima
TIE_TOL = 1e-12


def lattice_resolution(step: float) -> int:
    """Number of lattice intervals per unit for a grid ``step``."""
    if not 0.0 < step <= 1.0:
        raise InputError(f"grid step must lie in (0, 1], got {step}")
    k = round(1.0 / step)
    if abs(k * step - 1.0) > 1e-9:
        k = math.ceil(1.0 / step)
    return int(k)


def simplex_grid_size(n: int, step: float) -> int:
    k = lattice_resolution(step)
    return math.comb(k + n - 1, n - 1)


@lru_cache(maxsize=64)
def _simplex_grid(n: int, k: int) -> np.ndarray:
    pts = []

    def rec(prefix, left, slots):
        if slots == 1:
            pts.append(prefix + [left])
            return
        for v in range(left + 1):
            rec(prefix + [v], left - v, slots - 1)

    rec([], k, n)
    out = np.array(pts, dtype=float) / k
    out.setflags(write=False)
    return out


def simplex_grid(n: int, step: float) -> np.ndarray:
    """All points of the simplex lattice with spacing ``step``, in lexicographic order."""
    return _simplex_grid(int(n), lattice_resolution(step))


def project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection of each row of ``v`` onto the probability simplex."""
    v = np.atleast_2d(np.asarray(v, dtype=float))
    n = v.shape[1]
    u = -np.sort(-v, axis=1)
    css = np.cumsum(u, axis=1) - 1.0
    idx = np.arange(1, n + 1)
    cond = u - css / idx > 0
    rho = n - 1 - np.argmax(cond[:, ::-1], axis=1)
    theta = css[np.arange(v.shape[0]), rho] / (rho + 1)
    return np.maximum(v - theta[:, None], 0.0)


@dataclass(frozen=True)
class SearchResult:
    value: float
    point: tuple[np.ndarray, ...]
    evaluations: int
    method: str


def _map(fn, items, workers: int):
    if workers <= 1:
        return list(map(fn, items))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def grid_search(
    fun: Objective,
    dims: Sequence[int],
    step: float,
    *,
    budget: int = 10**8,
    workers: int = 1,
    maximize: bool = True,
) -> SearchResult:
    """Exhaustive search over the product of simplex lattices.

    Ties go to the lexicographically smallest lattice point.
    """
    sizes = [simplex_grid_size(n, step) for n in dims]
    total = math.prod(sizes)
    if total > budget:
        raise BudgetExceeded(total, budget)
    grids = [simplex_grid(n, step) for n in dims]
    sign = 1.0 if maximize else -1.0
    strides = [math.prod(sizes[i + 1:]) for i in range(len(sizes))]

    def block(start):
        idx = np.arange(start, min(start + CHUNK, total))
        parts = [g[(idx // s) % n] for g, s, n in zip(grids, strides, sizes)]
        vals = sign * np.asarray(fun(parts), dtype=float)
        top = vals.max()
        j = int(np.argmax(vals >= top - TIE_TOL))
        return top, vals[j], int(idx[j])

    found = _map(block, range(0, total, CHUNK), workers)
    overall = max(top for top, _, _ in found)
    _, best_val, best_idx = next(f for f in found if f[0] >= overall - TIE_TOL)
    point = tuple(g[(best_idx // s) % n].copy() for g, s, n in zip(grids, strides, sizes))
    return SearchResult(float(sign * best_val), point, total, "grid")


def _normalized(blocks: list[np.ndarray]) -> list[np.ndarray]:
    out = []
    for b in blocks:
        b = np.maximum(b, 0.0)
        out.append(b / b.sum(axis=1, keepdims=True))
    return out


def multistart_ascent(
    fun: Objective,
    dims: Sequence[int],
    starts: Sequence[tuple[np.ndarray, ...]],
    *,
    fd_step: float = 1e-6,
    max_iter: int = 500,
    rtol: float = 1e-10,
    maximize: bool = True,
    line_search_depth: int = 30,
    workers: int = 1,
) -> SearchResult:
    """Projected-gradient ascent run from every start simultaneously.

    Gradients are central finite differences of the objective composed with
    clipping and renormalisation, so probes just outside the simplex stay valid.
    Each step halves the trial length until the objective strictly improves; a
    start stops once the relative improvement drops below ``rtol`` or no trial
    improves. The best final point wins, ties going to the lowest start index.
    """
    dims = [int(n) for n in dims]
    sign = 1.0 if maximize else -1.0
    nb = len(dims)
    offsets = np.cumsum([0] + dims)
    d = int(offsets[-1])
    S = len(starts)
    if S == 0:
        raise InputError("at least one start is required")
    x = np.concatenate([np.stack([np.asarray(s[k], dtype=float) for s in starts]) for k in range(nb)], axis=1)
    for k in range(nb):
        x[:, offsets[k]:offsets[k + 1]] = project_simplex(x[:, offsets[k]:offsets[k + 1]])
    evals = 0

    def f(z: np.ndarray) -> np.ndarray:
        nonlocal evals
        evals += z.shape[0]
        blocks = _normalized([z[:, offsets[k]:offsets[k + 1]] for k in range(nb)])
        return sign * np.asarray(fun(blocks), dtype=float)

    def f_chunked(z: np.ndarray) -> np.ndarray:
        parts = _map(f, [z[i:i + CHUNK] for i in range(0, z.shape[0], CHUNK)], workers)
        return np.concatenate(parts)

    def project(z: np.ndarray) -> np.ndarray:
        z = z.copy()
        for k in range(nb):
            z[:, offsets[k]:offsets[k + 1]] = project_simplex(z[:, offsets[k]:offsets[k + 1]])
        return z

    fx = f_chunked(x)
    t = np.ones(S)
    active = np.ones(S, dtype=bool)
    eye = np.eye(d) * fd_step
    halvings = 0.5 ** np.arange(line_search_depth)
    for _ in range(max_iter):
        ids = np.flatnonzero(active)
        if ids.size == 0:
            break
        xa = x[ids]
        probes = np.concatenate([(xa[:, None, :] + eye[None]), (xa[:, None, :] - eye[None])], axis=1)
        fp = f_chunked(probes.reshape(-1, d)).reshape(ids.size, 2 * d)
        grad = (fp[:, :d] - fp[:, d:]) / (2 * fd_step)
        steps = (2.0 * t[ids])[:, None] * halvings[None, :]
        trial = xa[:, None, :] + steps[:, :, None] * grad[:, None, :]
        trial = project(trial.reshape(-1, d)).reshape(ids.size, line_search_depth, d)
        ft = f_chunked(trial.reshape(-1, d)).reshape(ids.size, line_search_depth)
        better = ft > fx[ids][:, None]
        for row, i in enumerate(ids):
            hits = np.flatnonzero(better[row])
            if hits.size == 0:
                active[i] = False
                continue
            j = hits[0]
            gain = ft[row, j] - fx[i]
            x[i] = trial[row, j]
            fx[i] = ft[row, j]
            t[i] = steps[row, j]
            if gain <= rtol * max(1.0, abs(fx[i])):
                active[i] = False
    best = int(np.argmax(fx >= fx.max() - TIE_TOL))
    xb = x[best]
    point = tuple(xb[offsets[k]:offsets[k + 1]].copy() for k in range(nb))
    # report the value at the returned point exactly as the objective sees it
    value = float(np.asarray(fun([p[None, :] for p in point]), dtype=float)[0])
    return SearchResult(value, point, evals + 1, "multistart ascent")


def random_starts(dims: Sequence[int], count: int, seed: int) -> list[tuple[np.ndarray, ...]]:
    """Flat-Dirichlet starting points; start ``i`` uses its own generator seeded ``seed ^ i``."""
    out = []
    for i in range(count):
        rng = np.random.default_rng(int(seed) ^ i)
        out.append(tuple(rng.dirichlet(np.ones(n)) for n in dims))
    return out


def vertex_starts(dims: Sequence[int]) -> list[tuple[np.ndarray, ...]]:
    """Every product of simplex vertices; cheap to include and often optimal."""
    return [tuple(np.eye(n)[i] for n, i in zip(dims, combo))
            for combo in itertools.product(*(range(n) for n in dims))]


def two_stage(
    fun: Objective,
    dims: Sequence[int],
    *,
    grid_step: float,
    starts: int,
    seed: int,
    fd_step: float,
    max_iter: int,
    rtol: float = 1e-10,
    budget: int = 10**8,
    workers: int = 1,
    maximize: bool = True,
) -> SearchResult:
    """Lattice search, then ascent seeded with the lattice incumbent plus random starts."""
    g = grid_search(fun, dims, grid_step, budget=budget, workers=workers, maximize=maximize)
    if starts <= 0:
        return g
    seeds = [g.point] + random_starts(dims, starts - 1, seed)
    a = multistart_ascent(fun, dims, seeds, fd_step=fd_step, max_iter=max_iter, rtol=rtol,
                          maximize=maximize, workers=workers)
    sign = 1.0 if maximize else -1.0
    total = g.evaluations + a.evaluations
    if sign * a.value > sign * g.value + TIE_TOL:
        return SearchResult(a.value, a.point, total, "grid + multistart ascent")
    return SearchResult(g.value, g.point, total, "grid + multistart ascent")
