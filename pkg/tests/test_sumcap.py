import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from conftest import bsc, random_dmc, random_zic
from dmic import optimize
from dmic.channel import ProductInput, compose_zic, independent_channels, validate_channel
from dmic.errors import NotApplicable, ParameterOutOfRange
from dmic.info import batch_cmi, h2
from dmic.sumcap import (SumCapConfig, batch_joint, batched_objective, gaussian_mixed_sum_capacity,
                         gaussian_zic_sum_capacity, grid_oracle, maximize_objective, objective_mixed,
                         objective_weak, sum_capacity_mixed, sum_capacity_weak)

FAST = SumCapConfig(grid_step=0.05, starts=16)


def _oracle_value(ch, p1, p2, kind):
    at = oracles.atoms(list(p1), list(p2), ch.p.tolist())
    if kind == "weak":
        return oracles.I(at, [0], [2]) + oracles.I(at, [1], [3])
    return oracles.I(at, [1], [3], [0]) + min(oracles.I(at, [0], [2]), oracles.I(at, [0], [3]))


class TestObjectives:
    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.sampled_from(["weak", "mixed"]))
    def test_batched_matches_brute_force(self, seed, kind):
        rng = np.random.default_rng(seed)
        ch = validate_channel(rng.dirichlet(np.ones(6), size=(2, 3)).reshape(2, 3, 2, 3))
        p1, p2 = rng.dirichlet(np.ones(2)), rng.dirichlet(np.ones(3))
        batched = batched_objective(ch, kind)([p1[None], p2[None]])[0]
        scalar = (objective_weak if kind == "weak" else objective_mixed)(ch, ProductInput(p1, p2))
        assert batched == pytest.approx(_oracle_value(ch, p1, p2, kind), abs=1e-10)
        assert scalar == pytest.approx(batched, abs=1e-10)

    def test_point_masses_give_zero(self, ex1):
        for a in range(2):
            for b in range(2):
                inp = ProductInput(np.eye(2)[a], np.eye(2)[b])
                assert objective_weak(ex1, inp) == pytest.approx(0.0, abs=1e-12)

    def test_example1_uniform(self, ex1):
        inp = ProductInput.uniform(2, 2)
        assert objective_weak(ex1, inp) == pytest.approx(_oracle_value(ex1, [.5, .5], [.5, .5], "weak"), abs=1e-12)

    def test_example2_mixed_uniform(self, ex2):
        assert objective_mixed(ex2, ProductInput.uniform(2, 2)) == pytest.approx(1.0, abs=1e-12)

    def test_single_x1_reduces_to_point_to_point(self, rng):
        py2 = random_dmc(rng, 3, 2)
        ch = compose_zic(py2, random_dmc(rng, 2, 2))
        p2 = rng.dirichlet(np.ones(3))
        at = oracles.atoms([1.0], list(p2), ch.p.tolist())
        assert objective_weak(ch, ProductInput([1.0], p2)) == pytest.approx(oracles.I(at, [1], [3]), abs=1e-12)
        assert objective_mixed(ch, ProductInput([1.0], p2)) == pytest.approx(oracles.I(at, [1], [3]), abs=1e-12)


class TestWeak:
    def test_decoupled_bscs(self):
        ch = independent_channels(bsc(0.2), bsc(0.1))
        r = sum_capacity_weak(ch, FAST)
        assert r.value == pytest.approx((1 - h2(0.2)) + (1 - h2(0.1)), abs=1e-9)
        np.testing.assert_allclose(r.argmax.p1, [.5, .5], atol=1e-6)

    def test_example1(self, ex1):
        r = sum_capacity_weak(ex1, FAST)
        assert r.value == pytest.approx(1 - h2(0.1) , abs=1e-9)
        assert r.regime == "proven"
        assert r.value >= grid_oracle(ex1, "weak", 0.01).value - 1e-12

    @settings(max_examples=8, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_dominates_oracle_and_respects_bound(self, seed):
        rng = np.random.default_rng(seed)
        ch = random_zic(rng, 2, 2, 2, 2)
        r = sum_capacity_weak(ch, FAST)
        assert r.value >= grid_oracle(ch, "weak", 0.02).value - 1e-9

        def cond(blocks):
            return batch_cmi(batch_joint(ch, blocks[0], blocks[1]), [0], [2], [1])

        def link2(blocks):
            return batch_cmi(batch_joint(ch, blocks[0], blocks[1]), [1], [3])

        bound = (optimize.two_stage(cond, (2, 2), grid_step=0.05, starts=8, seed=0, fd_step=1e-6, max_iter=300).value
                 + optimize.two_stage(link2, (2, 2), grid_step=0.05, starts=8, seed=0, fd_step=1e-6, max_iter=300).value)
        assert r.value <= bound + 1e-6

    def test_output_relabelling_invariant(self, rng):
        ch = random_zic(rng, 2, 2, 3, 2)
        perm = ch.p[:, :, [2, 0, 1], :][:, :, :, [1, 0]]
        a = sum_capacity_weak(ch, FAST).value
        b = sum_capacity_weak(validate_channel(perm), FAST).value
        assert a == pytest.approx(b, abs=1e-8)

    def test_gate(self, ex2):
        with pytest.raises(NotApplicable):
            sum_capacity_weak(ex2, FAST)
        assert sum_capacity_weak(ex2, FAST, force=True).regime == "unproven regime"

    def test_report_terms_consistent(self, ex1):
        r = sum_capacity_weak(ex1, FAST)
        assert sum(r.objective_terms.values()) == pytest.approx(r.value, abs=1e-12)
        assert set(r.to_dict()) >= {"value_bits", "argmax", "method", "objective_terms"}


class TestMixed:
    def test_example2(self, ex2):
        r = sum_capacity_mixed(ex2, FAST)
        assert r.value == pytest.approx(1.0, abs=1e-9)
        assert r.bounds["max I(X1X2;Y2)"] == pytest.approx(1.0, abs=1e-9)
        assert r.bounds["max I(X1;Y1)+I(X2;Y2|X1)"] >= r.value - 1e-12

    def test_gate(self, ex1):
        with pytest.raises(NotApplicable):
            sum_capacity_mixed(ex1, FAST)

    @settings(max_examples=6, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_ascent_matches_fine_oracle(self, seed):
        rng = np.random.default_rng(seed)
        ch = validate_channel(rng.dirichlet(np.ones(4), size=(2, 2)).reshape(2, 2, 2, 2))
        got = maximize_objective(ch, "mixed", FAST).value
        ref = grid_oracle(ch, "mixed", 0.02).value
        assert got >= ref - 5e-3


class TestGaussian:
    def test_values(self):
        assert gaussian_zic_sum_capacity(1, 1, 0.5) == pytest.approx(0.5 + 0.5 * math.log2(1 + 1 / 1.5))
        assert gaussian_mixed_sum_capacity(1, 1, 0.5, 2) == pytest.approx(0.5 + min(0.5 * math.log2(1 + 1 / 1.5), 0.5))
        assert gaussian_zic_sum_capacity(3, 0, 0.3) == pytest.approx(1.0)

    def test_monotone_in_interference(self):
        vals = [gaussian_zic_sum_capacity(5, 5, a) for a in np.linspace(0, 0.99, 20)]
        assert all(b <= a for a, b in zip(vals, vals[1:]))

    @pytest.mark.parametrize("args", [(-1, 1, .5), (1, 1, 1.0), (1, 1, -.1)])
    def test_zic_range(self, args):
        with pytest.raises(ParameterOutOfRange):
            gaussian_zic_sum_capacity(*args)

    @pytest.mark.parametrize("args", [(1, 1, 1.2, 2), (1, 1, .5, .9)])
    def test_mixed_range(self, args):
        with pytest.raises(ParameterOutOfRange):
            gaussian_mixed_sum_capacity(*args)
