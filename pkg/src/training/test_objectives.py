#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
测试训练目标函数及其解析梯度
Tests for the training objectives and their analytic gradients.
"""

import math

import numpy as np
import pytest
from scipy.special import softmax

from src.algorithms.episode import AlgorithmSpec, EpisodeRunner
from src.bandit.instance import BanditInstance
from src.policy.ucb_index import softmax_policy
from src.training.buffer import TrajectoryBuffer
from src.training.objectives import (
    EvaluationPoint,
    Objective,
    combined_objective,
    combined_policy,
    gradient,
    identification_objective,
    online_objective,
    round_terms,
    sampling_objective,
)
from src.training.params import TrainableParams


def _instance(means, threshold=0.5):
    return BanditInstance(np.eye(len(means)), means, threshold=threshold)


class TestSamplingObjective:

    def test_single_arm_is_point_mass(self):
        buffer = TrajectoryBuffer.from_arrays(np.full((7, 1), 0.4), np.full((7, 1), 0.3), coldness=np.full(7, 2.0))
        value = sampling_objective(buffer, _instance([0.6]), beta=1.5, eta1=0.0, eta2=0.0)
        assert value == pytest.approx(7 * 0.6)

    def test_zero_coldness_is_uniform(self):
        rng = np.random.default_rng(0)
        means = rng.random((5, 3))
        buffer = TrajectoryBuffer.from_arrays(means, rng.random((5, 3)) + 0.1, coldness=np.zeros(5))
        value = sampling_objective(buffer, _instance([0.2, 0.5, 0.8]), beta=0.7, eta1=0.0, eta2=0.0)
        assert value == pytest.approx(5 * 0.5)

    def test_penalty_cancels_when_constraints_hold(self):
        buffer = TrajectoryBuffer.from_arrays([[0.6, 0.5]], [[0.2, 0.2]], coldness=[1.0])
        instance = _instance([0.7, 0.5])
        value = sampling_objective(buffer, instance, beta=1.0, eta1=0.001, eta2=0.001)
        # S = (0.4, 0.3) around arm 0
        p = softmax([0.4, 0.3])
        assert value == pytest.approx(p @ np.array([0.7, 0.5]), rel=1e-12)

    def test_round_robin_rows_count_like_sampled_rows(self):
        buffer = TrajectoryBuffer.from_arrays([[0.6, 0.5]], [[0.2, 0.2]], coldness=[0.0], sampled=[False])
        instance = _instance([0.7, 0.5])
        # zero coldness: uniform policy over both arms
        assert sampling_objective(buffer, instance, beta=1.0, eta1=0.0, eta2=0.0) == pytest.approx(0.6)
        # C = (0.1 - 0.1, 0 - 0.1) at beta 0.5; eta1 only
        value = sampling_objective(buffer, instance, beta=0.5, eta1=0.01, eta2=0.0)
        assert value == pytest.approx(0.6 - 0.01 * (0.0 + -0.1))

    def test_recorded_single_arm_episode(self):
        single = _instance([0.7])
        for name in ('DGAI', 'DGAI-MAB'):
            buffer = TrajectoryBuffer(40, 1)
            spec = AlgorithmSpec(name, hyper={'alpha': 0.3, 'beta': 0.2})
            EpisodeRunner(spec, single, horizon=40, seed=3, buffer=buffer, remove_decided=False).run()
            assert len(buffer) == 40
            assert sampling_objective(buffer, single, beta=0.8, eta1=0.0, eta2=0.0) == pytest.approx(40 * 0.7)
            assert combined_objective(buffer, single, alpha=0.5, beta=0.8, M=20, eta1=0.0, eta2=0.0) == \
                pytest.approx(40 * 0.7)

    def test_inactive_arms_get_no_mass(self):
        buffer = TrajectoryBuffer.from_arrays([[0.6, 0.5]], [[0.2, 0.2]], active=[[False, True]], coldness=[3.0])
        value = sampling_objective(buffer, _instance([0.7, 0.5]), beta=1.0, eta1=0.0, eta2=0.0)
        assert value == pytest.approx(0.5)


class TestIdentificationObjective:

    def test_saturated_high(self):
        buffer = TrajectoryBuffer.from_arrays([[0.7]], [[0.1]])
        value = identification_objective(buffer, _instance([0.7]), alpha=1.0, M=1e4, eta1=0.0, eta2=0.0)
        assert value == pytest.approx(0.2, abs=1e-12)

    def test_saturated_low(self):
        buffer = TrajectoryBuffer.from_arrays([[0.7]], [[0.3]])
        value = identification_objective(buffer, _instance([0.7]), alpha=1.0, M=1e4, eta1=0.0, eta2=0.0)
        assert value == pytest.approx(0.0, abs=1e-12)

    def test_counts_every_arm(self):
        buffer = TrajectoryBuffer.from_arrays([[0.7, 0.8]], [[0.1, 0.1]], active=[[True, False]])
        value = identification_objective(buffer, _instance([0.7, 0.8]), alpha=1.0, M=1e4, eta1=0.0, eta2=0.0)
        assert value == pytest.approx(0.2 + 0.3, abs=1e-12)

    def test_zero_alpha_gradient_is_positive_below_threshold(self):
        rng = np.random.default_rng(4)
        means = rng.uniform(0.05, 0.45, size=(20, 6))
        buffer = TrajectoryBuffer.from_arrays(means, rng.random((20, 6)) + 0.05)
        params = TrainableParams(alpha=0.0, eta1=1e-3, eta2=1e-3, sharpness_M=10.0)
        terms = round_terms(Objective.IDENTIFICATION, buffer, params, 0.5, true_means=rng.uniform(0.5, 0.9, size=6))
        # D = -|mu - mu_hat| < 0 everywhere, so eta1 = eta2 leaves no penalty slope
        assert np.all(terms.grad_alpha > 0)

    def test_threshold_override(self):
        buffer = TrajectoryBuffer.from_arrays([[0.7]], [[0.1]])
        value = identification_objective(buffer, _instance([0.7]), alpha=1.0, M=1e4, eta1=0.0, eta2=0.0,
                                         threshold=0.4)
        assert value == pytest.approx(0.3, abs=1e-12)


class TestCombinedPolicy:

    def test_example(self):
        policy = combined_policy([2.0, -2.0], [1.0, 0.5], 1.0)
        expected = np.exp([2.0, -1.0]) / np.exp([2.0, -1.0]).sum()
        np.testing.assert_allclose(policy, expected)
        np.testing.assert_allclose(policy, [0.9526, 0.0474], atol=1e-4)

    def test_full_screening_matches_softmax_policy(self):
        rng = np.random.default_rng(9)
        for _ in range(50):
            index = rng.normal(size=8)
            gamma = float(rng.random() * 4)
            np.testing.assert_array_equal(combined_policy(index, np.ones(8), gamma), softmax_policy(index, gamma))

    def test_screened_arm_gets_zero_logit(self):
        policy = combined_policy([1.0, -3.0, 0.0], [1.0, 0.0, 1.0], 1.0)
        assert policy[1] == pytest.approx(policy[2])

    def test_combined_objective_single_arm(self):
        buffer = TrajectoryBuffer.from_arrays(np.full((4, 1), 0.5), np.full((4, 1), 0.2), coldness=np.ones(4))
        value = combined_objective(buffer, _instance([0.9]), alpha=0.3, beta=0.4, M=50, eta1=0.0, eta2=0.0)
        assert value == pytest.approx(4 * 0.9)


class TestGradients:

    def test_constant_region(self):
        buffer = TrajectoryBuffer.from_arrays(np.full((5, 1), 0.5), np.full((5, 1), 0.5), coldness=np.ones(5))
        params = TrainableParams(alpha=0.0, beta=0.3, eta1=1e-12, eta2=1e-12)
        g = gradient(Objective.SAMPLING, buffer, _instance([0.5]), params)
        assert g.beta == pytest.approx(0.0, abs=1e-10)
        assert g.alpha == 0.0

    def test_penalty_pushes_beta_up(self):
        # single arm: the reward term is constant, only the C penalty moves
        norms = np.array([[0.5], [0.25], [0.2]])
        buffer = TrajectoryBuffer.from_arrays(np.full((3, 1), 0.5), norms, coldness=np.ones(3))
        params = TrainableParams(beta=0.0, eta1=0.01, eta2=1e-9)
        g = gradient(Objective.SAMPLING, buffer, _instance([0.9]), params)
        # C = 0.4 - 0 > 0 everywhere: d(-penalty)/dbeta = (eta1 + eta2) * sum ||x||
        assert g.beta == pytest.approx((0.01 + 1e-9) * norms.sum())

    def test_saturated_identification_leaves_penalty_slope(self):
        buffer = TrajectoryBuffer.from_arrays([[0.9, 0.1]], [[0.05, 0.05]])
        params = TrainableParams(alpha=1.0, eta1=0.002, eta2=0.001, sharpness_M=1e4)
        g = gradient(Objective.IDENTIFICATION, buffer, _instance([0.8, 0.3]), params)
        # D = 0.05 - 0.1 < 0 and 0.05 - 0.2 < 0
        assert g.alpha == pytest.approx(-(0.002 - 0.001) * 0.1, rel=1e-6)
        assert g.beta == 0.0

    @pytest.mark.parametrize("objective", list(Objective))
    def test_matches_central_differences(self, objective):
        """Analytic gradients agree with central differences on random buffers."""
        rng = np.random.default_rng({'sampling': 1, 'identification': 2, 'combined': 3}[objective.value])
        h = 1e-5
        checked = 0
        for _ in range(1000):
            k = int(rng.integers(1, 7))
            rounds = int(rng.integers(1, 11))
            means = rng.random((rounds, k))
            norms = rng.uniform(0.05, 1.0, size=(rounds, k))
            active = rng.random((rounds, k)) < 0.8
            active[np.arange(rounds), rng.integers(k, size=rounds)] = True
            buffer = TrajectoryBuffer.from_arrays(means, norms, active=active,
                                                  coldness=rng.uniform(0, 3, size=rounds),
                                                  sampled=rng.random(rounds) < 0.8)
            instance = _instance(rng.random(k), threshold=float(rng.uniform(0.3, 0.7)))
            params = TrainableParams(alpha=float(rng.uniform(0, 2)), beta=float(rng.uniform(0, 2)),
                                     eta1=float(rng.uniform(1e-3, 0.5)), eta2=float(rng.uniform(1e-3, 0.5)),
                                     sharpness_M=float(rng.uniform(1, 10)))

            gap = np.abs(instance.true_means[None, :] - means)
            c = gap - params.beta * norms
            d = params.alpha * norms - gap
            if objective != Objective.IDENTIFICATION and np.min(np.abs(c)) < 1e-3:
                continue
            if objective != Objective.SAMPLING and np.min(np.abs(d)) < 1e-3:
                continue

            def value(alpha, beta):
                point = EvaluationPoint(alpha=alpha, beta=beta, eta1=params.eta1, eta2=params.eta2,
                                        sharpness_M=params.sharpness_M)
                return round_terms(objective, buffer, point, instance.threshold, instance.true_means).total()

            g = gradient(objective, buffer, instance, params)
            fd_alpha = (value(params.alpha + h, params.beta) - value(params.alpha - h, params.beta)) / (2 * h)
            fd_beta = (value(params.alpha, params.beta + h) - value(params.alpha, params.beta - h)) / (2 * h)
            np.testing.assert_allclose(g.alpha, fd_alpha, rtol=1e-4, atol=1e-7)
            np.testing.assert_allclose(g.beta, fd_beta, rtol=1e-4, atol=1e-7)
            checked += 1
        assert checked > 200


class TestOnlineObjective:

    def test_last_round_is_plain_average(self):
        values = np.array([0.3, 0.1, 0.7, 0.2])
        assert online_objective(values, 4, 4) == pytest.approx(values.sum() / 4)

    def test_first_round_constant_rewards(self):
        k, r, horizon = 5, 0.3, 50
        values = np.full((horizon, k), r)
        assert online_objective(values, 1, horizon) == pytest.approx(k * r)

    def test_bootstrap_of_latest_round(self):
        values = [1.0, 2.0, 4.0]
        assert online_objective(values, 2, 10) == pytest.approx((3.0 + 8 * 2.0) / 10)

    def test_rejects_out_of_range_round(self):
        with pytest.raises(ValueError):
            online_objective([1.0, 2.0], 0, 5)
        with pytest.raises(ValueError):
            online_objective([1.0, 2.0], 3, 5)


class TestTrainableParams:

    @pytest.mark.parametrize("kwargs", [{'eta1': 0.0}, {'eta2': -1.0}, {'sharpness_M': 0.0},
                                        {'batch_size': 0}, {'learning_rate': -0.1}])
    def test_rejects_invalid(self, kwargs):
        with pytest.raises(ValueError):
            TrainableParams(**kwargs)

    def test_with_values(self):
        params = TrainableParams(alpha=0.1, beta=0.2, learning_rate=0.5)
        moved = params.with_values(1.0, 2.0)
        assert (moved.alpha, moved.beta, moved.learning_rate) == (1.0, 2.0, 0.5)
        assert params.alpha == 0.1
        assert math.isclose(moved.eta1, params.eta1)
