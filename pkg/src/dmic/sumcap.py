"""Sum capacities by global maximisation over product input distributions.

Weak one-sided interference: ``max I(X1;Y1) + I(X2;Y2)``.
Mixed interference: ``max I(X2;Y2|X1) + min{I(X1;Y1), I(X1;Y2)}``.
Both maximisations are nonconvex; values come from a lattice search that
certifies the result to within the lattice error, refined by multistart ascent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import optimize
from .channel import ChannelTensor, ProductInput, joint_under_input
from .errors import NotApplicable, ParameterOutOfRange
from .info import batch_cmi, conditional_mutual_information, mutual_information

X1, X2, Y1, Y2 = 0, 1, 2, 3


def batch_joint(ch: ChannelTensor, p1: np.ndarray, p2: np.ndarray) -> np.ndarray:
    """``(N, |X1|, |X2|, |Y1|, |Y2|)`` joints for ``N`` product inputs."""
    return p1[:, :, None, None, None] * p2[:, None, :, None, None] * ch.p[None]


def _terms_weak(m):
    return {"I(X1;Y1)": batch_cmi(m, [X1], [Y1]), "I(X2;Y2)": batch_cmi(m, [X2], [Y2])}


def _terms_mixed(m):
    return {
        "I(X2;Y2|X1)": batch_cmi(m, [X2], [Y2], [X1]),
        "I(X1;Y1)": batch_cmi(m, [X1], [Y1]),
        "I(X1;Y2)": batch_cmi(m, [X1], [Y2]),
    }


def _combine_weak(t):
    return t["I(X1;Y1)"] + t["I(X2;Y2)"]


def _combine_mixed(t):
    return t["I(X2;Y2|X1)"] + np.minimum(t["I(X1;Y1)"], t["I(X1;Y2)"])


def _terms_bound19(m):
    return {"I(X1X2;Y2)": batch_cmi(m, [X1, X2], [Y2])}


def _terms_bound20(m):
    return {"I(X1;Y1)": batch_cmi(m, [X1], [Y1]), "I(X2;Y2|X1)": batch_cmi(m, [X2], [Y2], [X1])}


OBJECTIVES: dict[str, tuple[Callable, Callable]] = {
    "weak": (_terms_weak, _combine_weak),
    "mixed": (_terms_mixed, _combine_mixed),
    "mac_y2": (_terms_bound19, lambda t: t["I(X1X2;Y2)"]),
    "mixed_bound": (_terms_bound20, lambda t: t["I(X1;Y1)"] + t["I(X2;Y2|X1)"]),
}


def batched_objective(ch: ChannelTensor, name: str) -> optimize.Objective:
    terms, combine = OBJECTIVES[name]

    def fun(blocks):
        return combine(terms(batch_joint(ch, blocks[0], blocks[1])))

    return fun


def objective_terms(ch: ChannelTensor, name: str, inp: ProductInput) -> dict[str, float]:
    terms, _ = OBJECTIVES[name]
    t = terms(batch_joint(ch, inp.p1[None], inp.p2[None]))
    return {k: max(float(v[0]), 0.0) for k, v in t.items()}


def objective_weak(ch: ChannelTensor, inp: ProductInput) -> float:
    j = joint_under_input(ch, inp)
    return mutual_information(j, "X1", "Y1") + mutual_information(j, "X2", "Y2")


def objective_mixed(ch: ChannelTensor, inp: ProductInput) -> float:
    j = joint_under_input(ch, inp)
    first = conditional_mutual_information(j, "X2", "Y2", "X1")
    return first + min(mutual_information(j, "X1", "Y1"), mutual_information(j, "X1", "Y2"))


@dataclass(frozen=True)
class SumCapConfig:
    grid_step: float = 0.05
    starts: int = 64
    seed: int = 0
    fd_step: float = 1e-6
    max_iter: int = 500
    rtol: float = 1e-10
    budget: int = 10**8
    workers: int = 1
    tol: float = 1e-9


@dataclass(frozen=True)
class SumCapacityResult:
    value: float
    argmax: ProductInput
    method: str
    objective_terms: dict[str, float]
    evaluations: int
    grid_step: float
    grid_error_bound: float
    regime: str = "proven"
    bounds: dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "value_bits": self.value,
            "argmax": self.argmax.to_dict(),
            "method": self.method,
            "objective_terms": self.objective_terms,
            "evaluations": self.evaluations,
            "grid_step": self.grid_step,
            "grid_error_bound": self.grid_error_bound,
            "regime": self.regime,
            "bounds": self.bounds,
        }


def _lipschitz_slack(ch: ChannelTensor, step: float) -> float:
    # crude: total output-entropy range times the lattice spacing
    return step * (math.log2(ch.n_y1) + math.log2(ch.n_y2) + 1.0)


def _result(ch, name, res: optimize.SearchResult, step, regime="proven", bounds=None):
    inp = ProductInput(res.point[0], res.point[1])
    return SumCapacityResult(
        value=max(res.value, 0.0),
        argmax=inp,
        method=res.method,
        objective_terms=objective_terms(ch, name, inp),
        evaluations=res.evaluations,
        grid_step=step,
        grid_error_bound=_lipschitz_slack(ch, step),
        regime=regime,
        bounds=bounds or {},
    )


def grid_oracle(ch: ChannelTensor, objective: str = "weak", step: float = 0.01,
                budget: int = 10**8, workers: int = 1) -> SumCapacityResult:
    """Brute-force lattice maximum; the reference for every computed capacity."""
    res = optimize.grid_search(batched_objective(ch, objective), (ch.n_x1, ch.n_x2), step,
                               budget=budget, workers=workers)
    return _result(ch, objective, res, step)


def maximize_objective(ch: ChannelTensor, objective: str, config: SumCapConfig) -> optimize.SearchResult:
    return optimize.two_stage(
        batched_objective(ch, objective), (ch.n_x1, ch.n_x2),
        grid_step=config.grid_step, starts=config.starts, seed=config.seed,
        fd_step=config.fd_step, max_iter=config.max_iter, rtol=config.rtol,
        budget=config.budget, workers=config.workers,
    )


def sum_capacity_weak(ch: ChannelTensor, config: SumCapConfig = SumCapConfig(),
                      force: bool = False) -> SumCapacityResult:
    from .classify import weak_interference_witness

    regime = "proven"
    if weak_interference_witness(ch, config.tol) is None:
        if not force:
            raise NotApplicable("WeakInterference: channel is neither physically nor stochastically degraded")
        regime = "unproven regime"
    res = maximize_objective(ch, "weak", config)
    return _result(ch, "weak", res, config.grid_step, regime)


def sum_capacity_mixed(ch: ChannelTensor, config: SumCapConfig = SumCapConfig(),
                       force: bool = False) -> SumCapacityResult:
    from .classify import GapConfig, is_mixed

    regime = "proven"
    report = is_mixed(ch, config.tol, GapConfig(grid_step=config.grid_step, seed=config.seed,
                                                budget=config.budget, workers=config.workers))
    if not report.mixed:
        if not force:
            raise NotApplicable("MixedInterference: Markov condition or mutual-information condition fails")
        regime = "unproven regime"
    res = maximize_objective(ch, "mixed", config)
    b19 = maximize_objective(ch, "mac_y2", config)
    b20 = maximize_objective(ch, "mixed_bound", config)
    bounds = {"max I(X1X2;Y2)": b19.value, "max I(X1;Y1)+I(X2;Y2|X1)": b20.value}
    return _result(ch, "mixed", res, config.grid_step, regime, bounds)


# -- Gaussian references -------------------------------------------------------------


def _check_powers(P1, P2):
    if P1 < 0 or P2 < 0:
        raise ParameterOutOfRange("powers must be nonnegative")


def gaussian_zic_sum_capacity(P1: float, P2: float, a: float) -> float:
    """Gaussian one-sided channel with weak interference, ``0 <= a < 1``."""
    _check_powers(P1, P2)
    if not 0.0 <= a < 1.0:
        raise ParameterOutOfRange("one-sided weak interference needs 0 <= a < 1")
    return 0.5 * math.log2(1 + P2) + 0.5 * math.log2(1 + P1 / (1 + a * P2))


def gaussian_mixed_sum_capacity(P1: float, P2: float, a: float, b: float) -> float:
    """Gaussian channel with mixed interference, ``a <= 1 <= b``."""
    _check_powers(P1, P2)
    if not (0.0 <= a <= 1.0 and b >= 1.0):
        raise ParameterOutOfRange("mixed interference needs 0 <= a <= 1 and b >= 1")
    first = min(0.5 * math.log2(1 + P1 / (1 + a * P2)), 0.5 * math.log2(1 + b * P1 / (1 + P2)))
    return first + 0.5 * math.log2(1 + P2)
