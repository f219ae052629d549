"""Interference classes: one-sided, weak (degraded), the weak-interference MI gap, mixed."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np
from scipy.optimize import linprog

from . import optimize
from .channel import ChannelTensor, Dmc, ProductInput, marginal_y1, marginal_y2, validate_channel
from .errors import Infeasible, NotFactorizable, NotOneSided
from .info import batch_cmi
from .sumcap import X1, X2, Y1, Y2, batch_joint

FEAS_TOL = 1e-8


@dataclass(frozen=True)
class DegradednessWitness:
    """Degrading map ``q(y1 | x1, y2)``, rows indexed ``x1 * |Y2| + y2``."""

    q: Dmc
    residual: float
    kind: str

    def to_dict(self) -> dict:
        return {"kind": self.kind, "residual": self.residual, "p_y1_given_x1y2": self.q.rows.tolist()}


@dataclass(frozen=True)
class GapConfig:
    grid_step: float = 0.05
    starts: int = 32
    iterations: int = 200
    fd_step: float = 1e-4
    seed: int = 0
    budget: int = 10**8
    workers: int = 1


@dataclass(frozen=True)
class GapReport:
    min_gap: float
    argmin_input: ProductInput
    method: str
    evaluations: int

    def to_dict(self) -> dict:
        return {"min_gap": self.min_gap, "argmin": self.argmin_input.to_dict(),
                "method": self.method, "evaluations": self.evaluations}


@dataclass(frozen=True)
class MixedReport:
    mixed: bool
    markov_physical: DegradednessWitness | None
    markov_stochastic: DegradednessWitness | None
    gap: GapReport

    @property
    def markov(self) -> bool:
        return self.markov_physical is not None or self.markov_stochastic is not None

    def to_dict(self) -> dict:
        return {
            "mixed": self.mixed,
            "markov_physical": self.markov_physical is not None,
            "markov_stochastic": self.markov_stochastic is not None,
            "min_gap": self.gap.min_gap,
            "gap": self.gap.to_dict(),
        }


def is_one_sided(ch: ChannelTensor, tol: float = 1e-9) -> bool:
    py2 = ch.p.sum(axis=2)  # [x1, x2, y2]
    return bool(np.max(np.abs(py2 - py2[:1])) <= tol)


def _require_one_sided(ch: ChannelTensor, tol: float) -> None:
    if not is_one_sided(ch, tol):
        raise NotOneSided("p(y2|x1,x2) depends on x1")


def _quotient_witness(ch: ChannelTensor, py2: np.ndarray, tol: float, kind: str) -> DegradednessWitness:
    """Shared exact-quotient test; ``py2[x1, x2, y2]`` is the conditioning law."""
    n1, n2, m1, m2 = ch.shape
    q = np.full((n1, m2, m1), 1.0 / m1)
    worst = 0.0
    for a in range(n1):
        for t in range(m2):
            live = np.flatnonzero(py2[a, :, t] > tol)
            if live.size == 0:
                continue
            rows = ch.p[a, live, :, t] / py2[a, live, t][:, None]
            worst = max(worst, float(np.max(np.abs(rows - rows[:1]))))
            q[a, t] = rows[0]
    recon = py2[:, :, None, :] * np.transpose(q, (0, 2, 1))[:, None, :, :]
    residual = float(np.max(np.abs(recon - ch.p)))
    if worst > tol or residual > tol:
        raise NotFactorizable(max(worst, residual))
    q = np.maximum(q, 0.0)
    q /= q.sum(axis=2, keepdims=True)
    return DegradednessWitness(Dmc(q.reshape(n1 * m2, m1)), residual, kind)


def is_physically_degraded_zic(ch: ChannelTensor, tol: float = 1e-9) -> DegradednessWitness:
    """Recover ``p'(y1|x1,y2)`` from ``p(y1,y2|x1,x2) = p(y2|x2) p'(y1|x1,y2)``.

    Raises NotOneSided or NotFactorizable. Rows for pairs ``(x1, y2)`` that no
    ``x2`` can produce are uniform.
    """
    _require_one_sided(ch, tol)
    py2 = np.broadcast_to(ch.p.sum(axis=2)[:1], (ch.n_x1, ch.n_x2, ch.n_y2))
    return _quotient_witness(ch, py2, tol, "physical")


def garbling_lp(w: np.ndarray, v: np.ndarray) -> tuple[np.ndarray, float]:
    """Best stochastic ``Q`` for ``w @ Q = v`` in L1, by phase-1 linear programming.

    Returns ``(Q, residual)`` where ``residual`` is the minimal total L1
    violation; zero (up to solver precision) iff an exact garbling exists.
    """
    r, m = w.shape  # r conditioning rows, m intermediate symbols
    k = v.shape[1]
    nq = m * k
    ne = r * k
    # variables: Q (row-major m x k), slack+ (ne), slack- (ne)
    a_eq = np.zeros((ne + m, nq + 2 * ne))
    b_eq = np.zeros(ne + m)
    for i in range(r):
        for c in range(k):
            row = i * k + c
            a_eq[row, c:nq:k] = w[i]
            a_eq[row, nq + row] = 1.0
            a_eq[row, nq + ne + row] = -1.0
            b_eq[row] = v[i, c]
    for t in range(m):
        a_eq[ne + t, t * k:(t + 1) * k] = 1.0
        b_eq[ne + t] = 1.0
    cost = np.concatenate([np.zeros(nq), np.ones(2 * ne)])
    res = linprog(cost, A_eq=a_eq, b_eq=b_eq, bounds=(0, None), method="highs-ds")
    if res.status != 0:
        return np.full((m, k), 1.0 / k), float("inf")
    q = np.maximum(res.x[:nq].reshape(m, k), 0.0)
    q /= q.sum(axis=1, keepdims=True)
    # symbols that are never produced carry no constraint
    dead = ~np.any(w > 0, axis=0)
    q[dead] = 1.0 / k
    return q, float(res.fun)


def _garbling_witness(ch: ChannelTensor, py2: np.ndarray, tol: float, kind: str) -> DegradednessWitness:
    n1, n2, m1, m2 = ch.shape
    py1 = ch.p.sum(axis=3)  # [x1, x2, y1]
    blocks = []
    worst = 0.0
    for a in range(n1):
        q, cert = garbling_lp(py2[a], py1[a])
        err = float(np.max(np.abs(py2[a] @ q - py1[a])))
        if cert > tol or err > tol:
            raise Infeasible(a, max(cert, err))
        worst = max(worst, err)
        blocks.append(q)
    return DegradednessWitness(Dmc(np.concatenate(blocks)), worst, kind)


def is_stochastically_degraded(ch: ChannelTensor, tol: float = FEAS_TOL) -> DegradednessWitness:
    """Find ``Q_x1`` with ``sum_y2 p(y2|x2) Q_x1(y1|y2) = p(y1|x1,x2)`` for every ``x1``.

    Raises NotOneSided or Infeasible (carrying the phase-1 residual).
    """
    _require_one_sided(ch, 1e-9)
    py2 = np.broadcast_to(ch.p.sum(axis=2)[:1], (ch.n_x1, ch.n_x2, ch.n_y2))
    return _garbling_witness(ch, py2, tol, "stochastic")


def weak_interference_witness(ch: ChannelTensor, tol: float = 1e-9) -> DegradednessWitness | None:
    """Physical witness if there is one, else stochastic, else None."""
    if not is_one_sided(ch, tol):
        return None
    try:
        return is_physically_degraded_zic(ch, tol)
    except NotFactorizable:
        pass
    try:
        return is_stochastically_degraded(ch, max(tol, FEAS_TOL))
    except Infeasible:
        return None


def reconstruct_y1_marginal(ch: ChannelTensor, w: DegradednessWitness) -> np.ndarray:
    """``sum_y2 p(y2|x2) q(y1|x1,y2)`` as a ``[x1, x2, y1]`` array."""
    py2 = ch.p.sum(axis=2)
    q = w.q.rows.reshape(ch.n_x1, ch.n_y2, ch.n_y1)
    return np.einsum("abt,atc->abc", py2, q)


# -- mutual-information gaps ------------------------------------------------------------


def _gap_weak(ch):
    def fun(blocks):
        m = batch_joint(ch, blocks[0], blocks[1])
        return batch_cmi(m, [X2], [Y2]) - batch_cmi(m, [X2], [Y1], [X1])
    return fun


def _gap_mixed(ch):
    def fun(blocks):
        m = batch_joint(ch, blocks[0], blocks[1])
        return batch_cmi(m, [X1], [Y2], [X2]) - batch_cmi(m, [X1], [Y1], [X2])
    return fun


def minimize_gap(ch: ChannelTensor, fun, config: GapConfig) -> GapReport:
    res = optimize.two_stage(
        fun, (ch.n_x1, ch.n_x2), grid_step=config.grid_step, starts=config.starts,
        seed=config.seed, fd_step=config.fd_step, max_iter=config.iterations,
        budget=config.budget, workers=config.workers, maximize=False,
    )
    inp = ProductInput(res.point[0], res.point[1])
    return GapReport(res.value, inp, res.method, res.evaluations)


def weak_mi_gap(ch: ChannelTensor, config: GapConfig = GapConfig()) -> GapReport:
    """Minimum over product inputs of ``I(X2;Y2) - I(X2;Y1|X1)``."""
    _require_one_sided(ch, 1e-9)
    return minimize_gap(ch, _gap_weak(ch), config)


def mixed_mi_gap(ch: ChannelTensor, config: GapConfig = GapConfig()) -> GapReport:
    """Minimum over product inputs of ``I(X1;Y2|X2) - I(X1;Y1|X2)``."""
    return minimize_gap(ch, _gap_mixed(ch), config)


def mixed_markov_physical(ch: ChannelTensor, tol: float = 1e-9) -> DegradednessWitness:
    """Exact factorisation ``p(y2|x1,x2) p'(y1|x1,y2)``; raises NotFactorizable."""
    return _quotient_witness(ch, ch.p.sum(axis=2), tol, "physical")


def mixed_markov_stochastic(ch: ChannelTensor, tol: float = FEAS_TOL) -> DegradednessWitness:
    """Garbling ``sum_y2 p(y2|x1,x2) Q_x1(y1|y2) = p(y1|x1,x2)``; raises Infeasible."""
    return _garbling_witness(ch, ch.p.sum(axis=2), tol, "stochastic")


def is_mixed(ch: ChannelTensor, tol: float = 1e-9, config: GapConfig = GapConfig()) -> MixedReport:
    phys = stoch = None
    try:
        phys = mixed_markov_physical(ch, tol)
    except NotFactorizable:
        pass
    try:
        stoch = mixed_markov_stochastic(ch, max(tol, FEAS_TOL))
    except Infeasible:
        pass
    gap = mixed_mi_gap(ch, config)
    ok = (phys is not None or stoch is not None) and gap.min_gap >= -tol
    return MixedReport(bool(ok), phys, stoch, gap)


# -- counterexamples to the converse of the Markov-implies-MI-condition direction ----------


def random_one_sided_channel(rng: np.random.Generator, sizes: Sequence[int]) -> ChannelTensor:
    """``p(y2|x2) p(y1|x1,x2,y2)`` with every row drawn from a flat Dirichlet."""
    n1, n2, m1, m2 = sizes
    py2 = rng.dirichlet(np.ones(m2), size=n2)
    py1 = rng.dirichlet(np.ones(m1), size=(n1, n2, m2))
    return validate_channel(np.einsum("bt,abtc->abct", py2, py1))


def _random_stream(seed: int, sizes: Sequence[int]) -> Iterator[ChannelTensor]:
    rng = np.random.default_rng(seed)
    while True:
        yield random_one_sided_channel(rng, sizes)


def counterexample_search(
    seed: int,
    trials: int,
    sizes: Sequence[int] = (2, 2, 2, 2),
    config: GapConfig = GapConfig(),
    tol: float = 1e-9,
    stream: Iterable[ChannelTensor] | None = None,
) -> ChannelTensor | None:
    """First sampled one-sided channel meeting the MI condition without being degraded.

    ``stream`` replaces the seeded Dirichlet sampler (useful for injecting
    candidates); at most ``trials`` candidates are examined.
    """
    if min(sizes) < 2:
        raise ValueError("alphabet sizes must be at least 2")
    source = iter(stream) if stream is not None else _random_stream(seed, sizes)
    coarse = GapConfig(grid_step=max(config.grid_step, 0.1), starts=0, budget=config.budget)
    for _ in range(trials):
        try:
            ch = next(source)
        except StopIteration:
            return None
        if not is_one_sided(ch) or weak_interference_witness(ch, tol) is not None:
            continue
        if weak_mi_gap(ch, coarse).min_gap < -tol:
            continue
        if weak_mi_gap(ch, config).min_gap >= -tol:
            return ch
    return None
