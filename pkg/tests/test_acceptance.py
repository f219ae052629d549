"""One test per acceptance criterion; results are echoed as PASS/FAIL lines at the end of the run."""

import json
import os
import subprocess
import sys
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE, DATA, bsc, random_stochastic_only, random_zic
from dmic.channel import Dmc, compose_zic, marginal_y1
from dmic.classify import is_physically_degraded_zic, weak_mi_gap
from dmic.info import batch_cmi
from dmic.outer_bound import (achievable_grid, analytic_outer_bound, basic_outer_bound, construct_y2prime,
                              dbc_region, frontier_hausdorff, ft_curve, mrs_gerber)
from dmic.reference import EX1_PY1_GIVEN_X1Y2, EX1_PY2_GIVEN_X2
from dmic.sumcap import X1, X2, Y1, Y2, batch_joint, gaussian_zic_sum_capacity

EX1 = str(DATA / "example1.json")
EX2 = str(DATA / "example2.json")


def record(n, ok, detail):
    ACCEPTANCE[n] = (bool(ok), detail)
    assert ok, detail


def cli(*argv, env=None):
    t0 = time.perf_counter()
    res = subprocess.run([sys.executable, "-m", "dmic", *argv], capture_output=True, text=True,
                         env={**os.environ, **(env or {})})
    return res, time.perf_counter() - t0


def test_criterion_01_example1_sum_capacity():
    res, dt = cli("sumcap", EX1, "--theorem", "weak", "--oracle", "--json")
    rep = json.loads(res.stdout)
    value, delta = rep["value_bits"], rep["oracle"]["delta"]
    ok = res.returncode == 0 and abs(value - 0.531) <= 1e-3 and abs(delta) <= 2e-3 and dt < 30
    record(1, ok, f"C = {value:.6f} bits, oracle delta {delta:.1e}, {dt:.1f} s")


def test_criterion_02_collapsed_broadcast_rows():
    from dmic.reference import example1
    bc = construct_y2prime(example1(), collapse=True).bc.rows
    expected = [[.1, .9], [.9, .1], [.9, .1], [.1, .9]]
    record(2, bc.tolist() == expected, f"p(y2'|x1,x2) = {bc.tolist()}")


def test_criterion_03_example2():
    res, _ = cli("sumcap", EX2, "--theorem", "mixed", "--json")
    value = json.loads(res.stdout)["value_bits"]
    cls, _ = cli("classify", EX2, "--json")
    rep = json.loads(cls.stdout)
    gap = rep["mixed_evidence"]["min_gap"]
    ok = res.returncode == 0 and abs(value - 1.0) <= 1e-9 and rep["mixed"] is True and gap >= -1e-9
    record(3, ok, f"C = {value:.12f} bits, mixed={rep['mixed']}, mixed MI condition min gap {gap:.2e}")


def test_criterion_04_witness(ex1):
    w = is_physically_degraded_zic(ex1)
    err = np.max(np.abs(w.q.rows - np.array(EX1_PY1_GIVEN_X1Y2)))
    recon = compose_zic(Dmc(EX1_PY2_GIVEN_X2), w.q)
    rerr = np.max(np.abs(marginal_y1(recon).rows - marginal_y1(ex1).rows))
    record(4, err <= 1e-12 and rerr <= 1e-8, f"witness error {err:.1e}, marginal reconstruction error {rerr:.1e}")


def _ineq12_margin(rng):
    n1, n2, m1, m2, nu = rng.integers(2, 4, size=5)
    ch = random_zic(rng, n1, n2, m1, m2)
    px1 = rng.dirichlet(np.ones(n1))
    pu = rng.dirichlet(np.ones(nu))
    px2u = rng.dirichlet(np.ones(n2), size=nu)
    # joint over (U, X1, X2, Y1, Y2) with X1 independent of (U, X2)
    m = pu[:, None, None, None, None] * px1[None, :, None, None, None] * px2u[:, None, :, None, None] * ch.p[None]
    m = m[None]
    iu_y2 = batch_cmi(m, [0], [1 + Y2])[0]
    iu_y1_x1 = batch_cmi(m, [0], [1 + Y1], [1 + X1])[0]
    return iu_y2 - iu_y1_x1


def test_criterion_05_auxiliary_inequality():
    rng = np.random.default_rng(12)
    t0 = time.perf_counter()
    worst = min(_ineq12_margin(rng) for _ in range(1000))
    dt = time.perf_counter() - t0
    record(5, worst >= -1e-9 and dt < 60, f"min I(U;Y2) - I(U;Y1|X1) over 1000 draws = {worst:.2e}, {dt:.1f} s")


def test_criterion_06_implication():
    rng = np.random.default_rng(6)
    worst = np.inf
    for i in range(200):
        sizes = rng.integers(2, 4, size=4)
        ch = random_zic(rng, *sizes) if i % 2 else random_stochastic_only(rng, *sizes)
        worst = min(worst, weak_mi_gap(ch).min_gap)
    record(6, worst >= -1e-6, f"min weak MI condition gap over 200 degraded channels = {worst:.2e}")


def test_criterion_07_ft():
    s = np.linspace(0, 1, 101)
    errs = {p: float(np.max(np.abs(ft_curve(bsc(p))(s) - mrs_gerber(p, s)))) for p in (0.05, 0.1, 0.25, 0.4)}
    ident = float(np.max(np.abs(ft_curve(Dmc(np.eye(2)))(s) - s)))
    ok = max(errs.values()) <= 1e-4 and ident <= 1e-9
    record(7, ok, f"max BSC error {max(errs.values()):.1e}, identity error {ident:.1e}")


@pytest.fixture(scope="module")
def ex1_bounds(ex1):
    dc = construct_y2prime(ex1, collapse=True)
    return {
        "dc": dc,
        "dbc": dbc_region(dc, refine_step=0.02),
        "dbc_bijection": dbc_region(construct_y2prime(ex1), refine_step=0.02),
        "analytic": analytic_outer_bound(dc),
        "basic": basic_outer_bound(ex1, step=0.02),
    }


def test_criterion_08_outer_bound_dominance(ex1, ex1_bounds):
    def cap(blocks, a, b, c=()):
        return batch_cmi(batch_joint(ex1, blocks[0], blocks[1]), a, b, c)

    from dmic import optimize
    r1_cap = optimize.two_stage(lambda b: cap(b, [X1], [Y1], [X2]), (2, 2), grid_step=0.01, starts=16,
                                seed=0, fd_step=1e-6, max_iter=500).value
    r2_cap = optimize.two_stage(lambda b: cap(b, [X2], [Y2]), (2, 2), grid_step=0.01, starts=16,
                                seed=0, fd_step=1e-6, max_iter=500).value
    grid = achievable_grid(0.531, r1_cap, r2_cap)
    an, dbc, basic = ex1_bounds["analytic"], ex1_bounds["dbc"], ex1_bounds["basic"]
    in_an = float(np.mean(an.contains(grid[:, 0], grid[:, 1], slack=1e-3)))
    in_dbc = float(np.mean(dbc.contains(grid[:, 0], grid[:, 1], slack=1e-3)))
    r1_an = float(an.r1_at(r2_cap - 1e-9))
    r1_basic = float(basic.r1_at(r2_cap - 1e-9))
    ok = in_an == 1.0 and in_dbc == 1.0 and r1_an < r1_basic
    record(8, ok, f"grid inside analytic {in_an:.0%}, inside DBC {in_dbc:.0%}; "
                  f"R1 at R2max: analytic {r1_an:.4f} vs basic {r1_basic:.4f}")


def test_criterion_09_bijection_vs_collapsed(ex1_bounds):
    d = frontier_hausdorff(ex1_bounds["dbc"], ex1_bounds["dbc_bijection"])
    record(9, d <= 1e-2, f"Hausdorff distance collapsed vs bijection DBC frontier = {d:.4f}")


def test_criterion_10_gaussian():
    res, _ = cli("gaussian", "--zic", "1", "1", "0")
    zic = res.stdout.strip()
    vals = [gaussian_zic_sum_capacity(p1, 1.0, 0.5) for p1 in np.linspace(0, 10, 20)]
    mono = all(b > a for a, b in zip(vals, vals[1:]))
    mres, _ = cli("gaussian", "--mixed", "1", "1", "1", "1", "--json")
    mixed = json.loads(mres.stdout)["value_bits"]
    ok = zic == "1" and mono and abs(mixed - 0.79248) <= 1e-5
    record(10, ok, f"zic(1,1,0) = {zic}, monotone in P1 = {mono}, mixed(1,1,1,1) = {mixed:.6f}")


COMMANDS = [
    ("classify", EX1),
    ("classify", EX2),
    ("sumcap", EX1, "--theorem", "weak", "--oracle"),
    ("sumcap", EX2, "--theorem", "mixed"),
    ("outer-bound", EX1, "--method", "dbc"),
    ("outer-bound", EX1, "--method", "analytic"),
    ("outer-bound", EX1, "--method", "basic"),
    ("counterexample", "--trials", "200", "--seed", "7"),
    ("gaussian", "--mixed", "1", "1", "0.5", "2"),
]


def test_criterion_11_determinism():
    bad = []
    for cmd in COMMANDS:
        runs = [cli(*cmd)[0], cli(*cmd)[0],
                cli(*cmd, "--workers", "4")[0] if cmd[0] != "gaussian" else cli(*cmd)[0],
                cli(*cmd, env={"OMP_NUM_THREADS": "1", "OPENBLAS_NUM_THREADS": "1", "MKL_NUM_THREADS": "1"})[0],
                cli(*cmd, env={"OMP_NUM_THREADS": "4", "OPENBLAS_NUM_THREADS": "4", "MKL_NUM_THREADS": "4"})[0]]
        outs = {(r.returncode, r.stdout) for r in runs}
        if len(outs) != 1 or runs[0].returncode != 0:
            bad.append(" ".join(cmd[:1] + cmd[2:3]))
    record(11, not bad, f"{len(COMMANDS)} commands x 5 runs byte-identical" if not bad else f"differs: {bad}")
