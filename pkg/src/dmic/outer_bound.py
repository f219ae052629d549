"""Outer bounds for one-sided channels with weak interference.

The channel is re-expressed as a degraded interference channel by replacing
``Y2`` with a relabelling ``Y2' = f(X1, Y2)`` that is injective in ``Y2`` for
each ``X1``. Treating ``(X1, X2)`` as one input gives a degraded broadcast
channel whose capacity region contains the interference channel's.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.spatial.distance import directed_hausdorff

from . import optimize
from .channel import ChannelTensor, Dmc, validate_channel
from .classify import is_physically_degraded_zic
from .errors import BudgetExceeded, NonConstantConditionalEntropy, UnsupportedInputSize
from .info import _plogp, batch_cmi, h2
from .sumcap import X1, X2, Y1, Y2, batch_joint

ROW_MATCH_TOL = 1e-9
FRONTIER_TOL = 1e-12
REFINE_HALVINGS = 4


def _H_rows(p: np.ndarray) -> np.ndarray:
    return -_plogp(p).sum(axis=-1) + 0.0


# -- regions ---------------------------------------------------------------------------


def frontier_indices(points: np.ndarray) -> np.ndarray:
    """Vertices of the upper-right boundary of the convex, down-closed hull of ``points``.

    Returned in order of increasing ``r1`` (so decreasing ``r2``); every returned
    point is Pareto-optimal.
    """
    pts = np.asarray(points, dtype=float)
    if pts.shape[0] == 0:
        return np.zeros(0, dtype=int)
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    hull: list[int] = []
    for i in order:
        while len(hull) >= 2:
            o, a = pts[hull[-2]], pts[hull[-1]]
            b = pts[i]
            cross = (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
            if cross >= 0:
                hull.pop()
            else:
                break
        hull.append(int(i))
    # drop duplicates in r1 (keep the highest), then the rising part before the top
    r2 = pts[hull, 1]
    top = int(np.flatnonzero(r2 >= r2.max() - FRONTIER_TOL)[-1])
    out = [hull[top]]
    for i in hull[top + 1:]:
        # float noise in r1 alone must not add a vertex
        if pts[i, 0] - pts[out[-1], 0] > FRONTIER_TOL:
            out.append(i)
    return np.array(out, dtype=int)


@dataclass(frozen=True)
class RateRegion:
    """Down-closed rate region given by its Pareto frontier (bits), sorted by ``r1``."""

    points: np.ndarray
    kind: str
    provenance: dict = field(default_factory=dict)

    @classmethod
    def from_points(cls, points, kind: str, provenance: dict | None = None) -> "RateRegion":
        pts = np.maximum(np.asarray(points, dtype=float).reshape(-1, 2), 0.0)
        pts = pts[frontier_indices(pts)]
        pts.setflags(write=False)
        return cls(pts, kind, provenance or {})

    @property
    def r1_max(self) -> float:
        return float(self.points[:, 0].max())

    @property
    def r2_max(self) -> float:
        return float(self.points[:, 1].max())

    @property
    def max_sum(self) -> float:
        return float(self.points.sum(axis=1).max())

    def r2_at(self, r1) -> np.ndarray:
        """Largest ``r2`` with ``(r1, r2)`` in the region; ``-inf`` past the R1 intercept."""
        r1 = np.asarray(r1, dtype=float)
        out = np.interp(r1, self.points[:, 0], self.points[:, 1])
        return np.where(r1 <= self.r1_max, out, -np.inf)

    def r1_at(self, r2) -> np.ndarray:
        """Largest ``r1`` with ``(r1, r2)`` in the region; ``-inf`` past the R2 intercept."""
        r2 = np.asarray(r2, dtype=float)
        out = np.interp(-r2, -self.points[:, 1], self.points[:, 0])
        return np.where(r2 <= self.r2_max, out, -np.inf)

    def contains(self, r1, r2, slack: float = 0.0) -> np.ndarray:
        r1 = np.maximum(np.asarray(r1, dtype=float) - slack, 0.0)
        r2 = np.asarray(r2, dtype=float) - slack
        return (r1 <= self.r1_max) & (r2 <= self.r2_at(r1))

    def boundary(self, n: int = 2001) -> np.ndarray:
        """Points along the closed boundary: R2 axis, frontier, then down to the R1 axis."""
        poly = np.vstack([[0.0, self.r2_max], self.points, [self.r1_max, 0.0]])
        seg = np.linalg.norm(np.diff(poly, axis=0), axis=1)
        cum = np.concatenate([[0.0], np.cumsum(seg)])
        t = np.linspace(0.0, cum[-1], n)
        return np.column_stack([np.interp(t, cum, poly[:, 0]), np.interp(t, cum, poly[:, 1])])

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("r1_bits,r2_bits\n")
        for r1, r2 in self.points:
            buf.write(f"{r1:.12g},{r2:.12g}\n")
        return buf.getvalue()

    def summary(self) -> dict:
        return {"kind": self.kind, "r1_intercept": self.r1_max, "r2_intercept": self.r2_max,
                "max_sum": self.max_sum, "points": int(self.points.shape[0])}


def frontier_hausdorff(a: RateRegion, b: RateRegion, n: int = 2001) -> float:
    pa, pb = a.boundary(n), b.boundary(n)
    return max(directed_hausdorff(pa, pb)[0], directed_hausdorff(pb, pa)[0])


# -- degraded construction -----------------------------------------------------------------


@dataclass(frozen=True)
class DegradedConstruction:
    dmdic: ChannelTensor      # outputs (Y1, Y2')
    mapping: np.ndarray       # [x1, y2] -> y2'
    collapsed: bool
    bc: Dmc                   # p(y2' | x1 x2), rows x1 * |X2| + x2
    link: Dmc                 # p(y1 | y2')

    @property
    def n_y2prime(self) -> int:
        return self.link.n_in

    def to_dict(self) -> dict:
        return {"collapsed": self.collapsed, "mapping": self.mapping.tolist(),
                "p_y2p_given_x1x2": self.bc.rows.tolist(), "p_y1_given_y2p": self.link.rows.tolist()}


def _collapse_classes(q: np.ndarray) -> np.ndarray:
    """Greedy merge of ``(x1, y2)`` pairs with equal rows, never two pairs sharing ``x1``."""
    n1, m2, _ = q.shape
    reps: list[np.ndarray] = []
    owners: list[set[int]] = []
    mapping = np.zeros((n1, m2), dtype=int)
    for a in range(n1):
        for t in range(m2):
            for c, row in enumerate(reps):
                if a not in owners[c] and np.max(np.abs(row - q[a, t])) <= ROW_MATCH_TOL:
                    owners[c].add(a)
                    mapping[a, t] = c
                    break
            else:
                reps.append(q[a, t])
                owners.append({a})
                mapping[a, t] = len(reps) - 1
    return mapping


def construct_y2prime(ch: ChannelTensor, collapse: bool = False, tol: float = 1e-9) -> DegradedConstruction:
    """Relabel receiver 2's output so both outputs are ordered by degradation.

    Without ``collapse`` the relabelling is the pair index ``x1 * |Y2| + y2``.
    With it, pairs whose degrading rows coincide share a label, lowest index first.
    """
    w = is_physically_degraded_zic(ch, tol)
    n1, n2, m1, m2 = ch.shape
    q = w.q.rows.reshape(n1, m2, m1)
    mapping = _collapse_classes(q) if collapse else np.arange(n1 * m2).reshape(n1, m2)
    k = int(mapping.max()) + 1
    py2 = ch.p.sum(axis=2)[0]  # [x2, y2]
    dmdic = np.zeros((n1, n2, m1, k))
    bc = np.zeros((n1, n2, k))
    link = np.zeros((k, m1))
    for a in range(n1):
        for t in range(m2):
            c = mapping[a, t]
            dmdic[a, :, :, c] += py2[:, t][:, None] * q[a, t][None, :]
            bc[a, :, c] += py2[:, t]
            link[c] = q[a, t]
    dmdic = validate_channel(dmdic)
    # unlabelled symbols cannot occur; keep the link total
    used = np.zeros(k, dtype=bool)
    used[mapping.ravel()] = True
    link[~used] = 1.0 / m1
    mapping.setflags(write=False)
    return DegradedConstruction(dmdic, mapping, k < n1 * m2, Dmc(bc.reshape(n1 * n2, k)), Dmc(link))


def degradedness_residual(dc: DegradedConstruction, p1: np.ndarray, p2: np.ndarray) -> np.ndarray:
    """``I(X1 X2; Y1 | Y2')`` for a batch of product inputs; zero on a sound construction."""
    m = batch_joint(dc.dmdic, np.atleast_2d(p1), np.atleast_2d(p2))
    return batch_cmi(m, [X1, X2], [Y1], [Y2])


# -- degraded broadcast channel region -----------------------------------------------------


def _dbc_rates(W: np.ndarray, L: np.ndarray, hx: np.ndarray, pu: np.ndarray, pxu: np.ndarray):
    py2u = pxu @ W
    py1u = py2u @ L
    py1 = np.einsum("nu,nuc->nc", pu, py1u)
    r1 = _H_rows(py1) - np.einsum("nu,nu->n", pu, _H_rows(py1u))
    r2 = np.einsum("nu,nu->n", pu, _H_rows(py2u) - pxu @ hx)
    return np.column_stack([r1, r2])


def _neighbours(pu: np.ndarray, pxu: np.ndarray, step: float):
    """All single transfers of ``step`` mass between two coordinates of one simplex."""
    k, nx = pxu.shape
    out_u, out_x = [], []

    def moves(v):
        for i in range(v.size):
            if v[i] <= 0:
                continue
            for j in range(v.size):
                if i != j:
                    w = v.copy()
                    d = min(step, v[i])
                    w[i] -= d
                    w[j] += d
                    yield w

    for w in moves(pu):
        out_u.append(w)
        out_x.append(pxu)
    for u in range(k):
        for w in moves(pxu[u]):
            x = pxu.copy()
            x[u] = w
            out_u.append(pu)
            out_x.append(x)
    return np.array(out_u), np.array(out_x)


def dbc_region(
    dc: DegradedConstruction,
    u_size: int | None = None,
    step: float = 0.1,
    refine_step: float = 0.02,
    refine_rounds: int = 200,
    budget: int = 10**7,
    workers: int = 1,
) -> RateRegion:
    """Grid sweep of ``(I(U;Y1), I(X;Y2'|U))`` over ``p(u) p(x|u)``, closed under time sharing.

    ``X`` is the composite input ``(X1, X2)``. Hull vertices found by the sweep
    are then improved by local moves of ``refine_step`` until the hull stops growing,
    and again with the move halved a few times.
    """
    W, L = dc.bc.rows, dc.link.rows
    nx = W.shape[0]
    k = u_size or min(L.shape[1], W.shape[1], nx)
    hx = _H_rows(W)
    sizes = [optimize.simplex_grid_size(k, step)] + [optimize.simplex_grid_size(nx, step)] * k
    total = math.prod(sizes)
    if total > budget:
        raise BudgetExceeded(total, budget)
    gu = optimize.simplex_grid(k, step)
    gx = optimize.simplex_grid(nx, step)
    strides = [math.prod(sizes[i + 1:]) for i in range(len(sizes))]

    def block(start):
        idx = np.arange(start, min(start + optimize.CHUNK, total))
        pu = gu[(idx // strides[0]) % sizes[0]]
        pxu = np.stack([gx[(idx // strides[u + 1]) % sizes[u + 1]] for u in range(k)], axis=1)
        r = _dbc_rates(W, L, hx, pu, pxu)
        keep = frontier_indices(r)
        return r[keep], pu[keep], pxu[keep]

    parts = optimize._map(block, range(0, total, optimize.CHUNK), workers)
    rates = np.concatenate([p[0] for p in parts])
    pus = np.concatenate([p[1] for p in parts])
    pxus = np.concatenate([p[2] for p in parts])
    keep = frontier_indices(rates)
    rates, pus, pxus = rates[keep], pus[keep], pxus[keep]
    evaluations = total

    move = refine_step
    for _ in range(refine_rounds if refine_step else 0):
        cand_u, cand_x = [], []
        for pu, pxu in zip(pus, pxus):
            nu, nxx = _neighbours(pu, pxu, move)
            cand_u.append(nu)
            cand_x.append(nxx)
        cu, cx = np.concatenate(cand_u), np.concatenate(cand_x)
        evaluations += cu.shape[0]
        if evaluations > budget:
            break
        cr = _dbc_rates(W, L, hx, cu, cx)
        grew = _outside(rates, cr)
        all_r = np.concatenate([rates, cr])
        keep = frontier_indices(all_r)
        rates = all_r[keep]
        pus = np.concatenate([pus, cu])[keep]
        pxus = np.concatenate([pxus, cx])[keep]
        if not grew:
            # converged at this move size; shrink a few times before stopping
            if move <= refine_step / 2**REFINE_HALVINGS:
                break
            move /= 2

    prov = {"generator": "dbc_region", "u_size": k, "step": step, "refine_step": refine_step,
            "evaluations": evaluations, "collapsed": dc.collapsed}
    return RateRegion.from_points(rates, "outer", prov)


def _outside(rates: np.ndarray, new: np.ndarray, tol: float = 1e-12) -> bool:
    """Whether any of ``new`` lies strictly outside the region spanned by ``rates``."""
    region = RateRegion.from_points(rates, "outer")
    return bool(np.any(~region.contains(new[:, 0] - tol, new[:, 1] - tol)))


# -- f_T and the analytic bound --------------------------------------------------------------


def _h2_inverse_array(h: np.ndarray) -> np.ndarray:
    lo = np.zeros_like(h)
    hi = np.full_like(h, 0.5)
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        below = h2(mid) < h
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    out = 0.5 * (lo + hi)
    out[h <= 0] = 0.0
    out[h >= 1] = 0.5
    return out


@dataclass(frozen=True)
class FtCurve:
    """Piecewise-linear convex ``f_T``: least output entropy given input entropy ``s``."""

    channel: Dmc
    knots: np.ndarray  # columns s, f

    def __call__(self, s):
        return np.interp(s, self.knots[:, 0], self.knots[:, 1])


def lower_convex_envelope(points: np.ndarray) -> np.ndarray:
    """Lower convex hull vertices of 2-D ``points``, sorted by the first coordinate."""
    order = np.lexsort((points[:, 1], points[:, 0]))
    hull: list[np.ndarray] = []
    for i in order:
        b = points[i]
        if hull and hull[-1][0] == b[0]:
            continue
        while len(hull) >= 2:
            o, a = hull[-2], hull[-1]
            if (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]) <= 0:
                hull.pop()
            else:
                break
        hull.append(b)
    return np.array(hull)


def ft_curve(t: Dmc, points: int = 2001) -> FtCurve:
    """``f_T`` for a binary-input link as the lower convex envelope of ``(h2(p), H(pT))``.

    Inputs are sampled uniformly in input entropy on both branches ``p <= 1/2``
    and ``p >= 1/2``, ``points`` in total.
    """
    if t.n_in != 2:
        raise UnsupportedInputSize(f"f_T is only implemented for binary-input links, got {t.n_in} inputs")
    half = max((points + 1) // 2, 2)
    s = np.linspace(0.0, 1.0, half)
    p = _h2_inverse_array(s)
    p = np.concatenate([p, 1.0 - p])
    s = np.concatenate([s, s])
    out = p[:, None] * t.rows[0][None, :] + (1.0 - p)[:, None] * t.rows[1][None, :]
    f = _H_rows(out)
    knots = lower_convex_envelope(np.column_stack([s, f]))
    knots.setflags(write=False)
    return FtCurve(t, knots)


def mrs_gerber(p: float, s):
    """Closed form ``h2(p * h2^-1(s))`` of ``f_T`` for a BSC with crossover ``p``."""
    q = _h2_inverse_array(np.atleast_1d(np.asarray(s, dtype=float)))
    return h2(p * (1 - q) + q * (1 - p))


def max_input_information(W: np.ndarray, step: float = 0.05, starts: int = 16, seed: int = 0) -> float:
    """Capacity of the single-user channel ``W`` (rows = inputs), by the same two-stage search."""
    hx = _H_rows(W)

    def fun(blocks):
        px = blocks[0]
        return _H_rows(px @ W) - px @ hx

    return optimize.two_stage(fun, (W.shape[0],), grid_step=step, starts=starts, seed=seed,
                              fd_step=1e-6, max_iter=500).value


def analytic_outer_bound(dc: DegradedConstruction, n_points: int = 201, ft_points: int = 2001) -> RateRegion:
    """Curve ``R1(x) = log|Y1| - f_T(x + c)`` for ``R2 = x``, where ``c = H(Y2'|X)``."""
    hx = _H_rows(dc.bc.rows)
    if np.max(hx) - np.min(hx) > 1e-9:
        raise NonConstantConditionalEntropy(f"H(Y2'|X=x) ranges over [{hx.min():.6g}, {hx.max():.6g}]")
    c = float(hx[0])
    ft = ft_curve(dc.link, ft_points)
    cap = max_input_information(dc.bc.rows)
    x = np.linspace(0.0, cap, n_points)
    s = np.clip(x + c, 0.0, math.log2(dc.link.n_in))
    r1 = np.maximum(math.log2(dc.link.n_out) - ft(s), 0.0)
    prov = {"generator": "analytic_outer_bound", "conditional_entropy": c, "n_points": n_points,
            "ft_points": ft_points, "max_r2": cap}
    return RateRegion.from_points(np.column_stack([r1, x]), "outer", prov)


# -- the three-inequality bound ---------------------------------------------------------------


def basic_outer_bound(ch: ChannelTensor, step: float = 0.02, budget: int = 10**8) -> RateRegion:
    """Union over product inputs of ``{R1 <= I(X1;Y1|X2), R2 <= I(X2;Y2),
    R1 + R2 <= I(X1;Y1) + I(X2;Y2)}``, closed under time sharing."""
    total = optimize.simplex_grid_size(ch.n_x1, step) * optimize.simplex_grid_size(ch.n_x2, step)
    if total > budget:
        raise BudgetExceeded(total, budget)
    g1 = optimize.simplex_grid(ch.n_x1, step)
    g2 = optimize.simplex_grid(ch.n_x2, step)
    corners = []
    for start in range(0, total, optimize.CHUNK):
        idx = np.arange(start, min(start + optimize.CHUNK, total))
        m = batch_joint(ch, g1[idx // g2.shape[0]], g2[idx % g2.shape[0]])
        a = np.maximum(batch_cmi(m, [X1], [Y1], [X2]), 0.0)
        b = np.maximum(batch_cmi(m, [X2], [Y2]), 0.0)
        s = np.maximum(batch_cmi(m, [X1], [Y1]), 0.0) + b
        top = np.minimum(b, s)
        right = np.minimum(a, s)
        corners += [
            np.column_stack([np.zeros_like(top), top]),
            np.column_stack([np.minimum(a, s - top), top]),
            np.column_stack([right, np.minimum(b, s - right)]),
            np.column_stack([right, np.zeros_like(right)]),
        ]
    prov = {"generator": "basic_outer_bound", "step": step, "evaluations": total}
    return RateRegion.from_points(np.concatenate(corners), "outer", prov)


def achievable_grid(sum_rate: float, r1_cap: float, r2_cap: float, n: int = 101) -> np.ndarray:
    """Lattice points of ``{r1 + r2 <= sum_rate, r1 <= r1_cap, r2 <= r2_cap}``."""
    r1, r2 = np.meshgrid(np.linspace(0, r1_cap, n), np.linspace(0, r2_cap, n))
    pts = np.column_stack([r1.ravel(), r2.ravel()])
    return pts[pts.sum(axis=1) <= sum_rate + 1e-15]
