#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
测试老虎机实例与奖励采样
Tests for bandit instances and reward sampling.
"""

import numpy as np
import pytest

from src.bandit.instance import (
    BanditInstance,
    RewardLaw,
    make_gaussian_instance,
    make_synthetic_instance,
    sample_reward,
)


class TestSyntheticInstance:

    def test_means_stay_in_band(self):
        instance = make_synthetic_instance(50, 0.49975, 0.5005, 0.5, seed=7)
        assert instance.num_arms == 50
        assert instance.dimension == 50
        assert instance.is_one_hot
        assert np.all(instance.true_means >= 0.49975)
        assert np.all(instance.true_means <= 0.5005)
        assert instance.reward_law == RewardLaw.BERNOULLI

    def test_degenerate_band_single_arm(self):
        instance = make_synthetic_instance(1, 0.3, 0.3, 0.5, seed=0)
        assert instance.num_arms == 1
        assert instance.true_means[0] == pytest.approx(0.3)
        assert instance.good_set == frozenset()

    def test_same_seed_same_means(self):
        a = make_synthetic_instance(3, 0.0, 1.0, 0.5, seed=11)
        b = make_synthetic_instance(3, 0.0, 1.0, 0.5, seed=11)
        np.testing.assert_array_equal(a.true_means, b.true_means)

    def test_rejects_bounds_outside_unit_interval(self):
        with pytest.raises(ValueError, match="Bernoulli means"):
            make_synthetic_instance(3, -0.1, 0.5, 0.5, seed=0)
        with pytest.raises(ValueError, match="Bernoulli means"):
            make_synthetic_instance(3, 0.5, 1.2, 0.5, seed=0)

    def test_rejects_reversed_band(self):
        with pytest.raises(ValueError, match="must not exceed"):
            make_synthetic_instance(3, 0.6, 0.4, 0.5, seed=0)


class TestBanditInstance:

    def test_good_set_follows_threshold(self):
        instance = BanditInstance(np.eye(4), [0.2, 0.5, 0.7, 0.49], threshold=0.5)
        assert instance.good_set == frozenset({1, 2})
        assert instance.num_good == 2
        assert instance.best_arm == 2

    def test_arrays_are_read_only(self):
        instance = BanditInstance(np.eye(2), [0.2, 0.8], threshold=0.5)
        with pytest.raises(ValueError):
            instance.true_means[0] = 0.9

    def test_rejects_mismatched_means(self):
        with pytest.raises(ValueError, match="one entry per arm"):
            BanditInstance(np.eye(3), [0.1, 0.2], threshold=0.5)

    def test_non_one_hot_features(self):
        features = np.array([[1.0, 0.0], [0.6, 0.8], [0.0, 1.0]])
        instance = BanditInstance(features, [0.1, 0.5, 0.9], threshold=0.5)
        assert not instance.is_one_hot
        assert instance.dimension == 2


class TestSampleReward:

    def test_degenerate_bernoulli_arms(self):
        instance = BanditInstance(np.eye(2), [1.0, 0.0], threshold=0.5)
        rng = np.random.default_rng(0)
        assert all(sample_reward(instance, 0, rng).value == 1.0 for _ in range(200))
        assert all(sample_reward(instance, 1, rng).value == 0.0 for _ in range(200))

    def test_bernoulli_sample_mean(self):
        instance = BanditInstance(np.eye(1), [0.5], threshold=0.5)
        rng = np.random.default_rng(123)
        values = [sample_reward(instance, 0, rng).value for _ in range(10000)]
        assert set(values) <= {0.0, 1.0}
        assert abs(np.mean(values) - 0.5) < 0.02

    def test_same_seed_same_stream(self):
        instance = make_synthetic_instance(5, 0.2, 0.8, 0.5, seed=3)
        rng_a, rng_b = np.random.default_rng(42), np.random.default_rng(42)
        a = [sample_reward(instance, i % 5, rng_a).value for i in range(100)]
        b = [sample_reward(instance, i % 5, rng_b).value for i in range(100)]
        assert a == b

    def test_gaussian_zero_noise_is_exact(self):
        instance = make_gaussian_instance([0.3, 0.7], threshold=0.5, sigma=0.0)
        rng = np.random.default_rng(0)
        assert sample_reward(instance, 1, rng).value == pytest.approx(0.7)

    def test_out_of_range_arm(self):
        instance = BanditInstance(np.eye(2), [0.2, 0.8], threshold=0.5)
        with pytest.raises(IndexError):
            sample_reward(instance, 2, np.random.default_rng(0))
