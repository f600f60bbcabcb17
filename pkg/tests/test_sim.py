from __future__ import annotations

import numpy as np
import pytest

from batchbandit.bounds import regret_bound_general
from batchbandit.core import validate_instance
from batchbandit.errors import DomainError, LengthMismatchError
from batchbandit.exact import exact_regret, exact_regret_sd
from batchbandit.policies import IndexPolicy, SpikeBayesPolicy, ThresholdPolicy
from batchbandit.sim import SimConfig, csv_header, mc_compare, mc_regret

from conftest import random_instance


class TestConfig:
    @pytest.mark.parametrize("kwargs", [{"reps": 0}, {"reps": 2.5}, {"reps": 5, "master_seed": -1}, {"reps": 5, "n_jobs": 0}])
    def test_rejects(self, kwargs):
        with pytest.raises(DomainError):
            SimConfig(**kwargs)


class TestMonteCarlo:
    def test_single_rep(self, two_arm):
        res = mc_regret(two_arm, IndexPolicy(), SimConfig(1, 123))
        assert res.pick_counts.sum() == 1 and res.pick_counts.max() == 1
        assert np.isnan(res.std_error)

    def test_matches_closed_form(self, two_arm):
        res = mc_regret(two_arm, IndexPolicy(), SimConfig(10**6, 7))
        assert abs(res.mean_regret - 0.0654720846018577) <= 3 * res.std_error

    def test_deterministic(self, two_arm):
        cfg = SimConfig(5000, 42)
        assert mc_regret(two_arm, IndexPolicy("lcb", delta=0.1), cfg) == mc_regret(two_arm, IndexPolicy("lcb", delta=0.1), cfg)

    def test_partition_independent(self):
        inst = validate_instance([0.5, 0.45, 0.3, 0.2], [20, 5, 50, 9])
        base = mc_regret(inst, IndexPolicy("ucb", delta=0.1), SimConfig(20_000, 3))
        threaded = mc_regret(inst, IndexPolicy("ucb", delta=0.1), SimConfig(20_000, 3, n_jobs=4, chunk_size=777))
        assert base == threaded
        assert base.mean_regret == threaded.mean_regret

    def test_result_invariants(self):
        inst = validate_instance([0.5, 0.45, 0.3], [20, 5, 50])
        res = mc_regret(inst, SpikeBayesPolicy(0.1), SimConfig(3000, 9))
        assert res.pick_counts.sum() == res.reps == 3000
        assert res.rank_cdf[0] == 1.0
        assert np.all(np.diff(res.rank_cdf) <= 0)
        gaps = np.array([0.0, 0.05, 0.2])
        samples = np.repeat(gaps, res.pick_counts)
        assert res.mean_regret == pytest.approx(samples.mean(), rel=1e-12)
        assert res.std_error == pytest.approx(samples.std(ddof=1) / np.sqrt(3000), rel=1e-10)

    def test_threshold_policy(self, two_arm):
        res = mc_regret(two_arm, ThresholdPolicy(1.0), SimConfig(200_000, 1))
        assert abs(res.mean_regret - exact_regret(two_arm, ThresholdPolicy(1.0))) <= 4 * res.std_error

    def test_arity_mismatch(self):
        with pytest.raises(LengthMismatchError):
            mc_regret(validate_instance([0.1, 0.2], [1, 1]), IndexPolicy("custom", bias=[0, 0, 0]), SimConfig(10))

    def test_statistically_sound(self):
        """|MC - exact| <= 4 SE on at least 99% of random instances.

        The SE is the estimator's true standard error; the plug-in estimate is
        zero whenever all replications pick one arm.
        """
        rng = np.random.default_rng(21)
        passed = 0
        trials = 200
        reps = 4000
        for t in range(trials):
            inst = random_instance(rng, int(rng.integers(2, 4)), 0, 2)
            pol = IndexPolicy(["greedy", "lcb", "ucb"][t % 3], delta=0.1)
            res = mc_regret(inst, pol, SimConfig(reps, t))
            se = exact_regret_sd(inst, pol) / np.sqrt(reps)
            passed += abs(res.mean_regret - exact_regret(inst, pol)) <= 4 * se + 1e-12
        assert passed >= 0.99 * trials

    def test_plug_in_se_matches_true_se(self):
        inst = validate_instance([0.5, 0.45, 0.3], [20, 5, 50])
        pol = IndexPolicy("ucb", delta=0.1)
        res = mc_regret(inst, pol, SimConfig(100_000, 2))
        assert res.std_error == pytest.approx(exact_regret_sd(inst, pol) / np.sqrt(100_000), rel=0.02)

    def test_rank_cdf_below_bound(self):
        rng = np.random.default_rng(22)
        reps = 20_000
        for t in range(10):
            inst = random_instance(rng, 4)
            pol = IndexPolicy("lcb", delta=0.1)
            res = mc_regret(inst, pol, SimConfig(reps, t))
            bound = np.asarray(regret_bound_general(inst, pol).rank_cdf_bound)
            se = np.sqrt(np.clip(bound, 0, 1) * (1 - np.clip(bound, 0, 1)) / reps)
            assert np.all(res.rank_cdf <= bound + 4 * se + 1e-12)


class TestCompare:
    def test_single_matches_regret(self, two_arm):
        cfg = SimConfig(3000, 5)
        assert mc_compare(two_arm, [IndexPolicy()], cfg)[0] == mc_regret(two_arm, IndexPolicy(), cfg)

    def test_greedy_equals_lcb_at_delta_k(self):
        inst = validate_instance([0.6, 0.5, 0.2], [3, 8, 2])
        a, b = mc_compare(inst, [IndexPolicy(), IndexPolicy("lcb", delta=3)], SimConfig(5000, 1))
        assert a == b

    def test_csv_row(self, two_arm):
        res = mc_regret(two_arm, IndexPolicy(), SimConfig(100, 4))
        row = res.to_csv_row("greedy", 4).split(",")
        assert csv_header(2).split(",") == ["policy", "reps", "seed", "mean_regret", "std_error", "pick_1", "pick_2"]
        assert row[:3] == ["greedy", "100", "4"]
        assert int(row[5]) + int(row[6]) == 100
