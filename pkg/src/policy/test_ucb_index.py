#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
测试可微UCB指数、冷度与softmax策略
Tests for the differentiable UCB index, coldness and the softmax policy.
"""

import math

import numpy as np
import pytest

from src.policy.ucb_index import (
    IndexSnapshot,
    coldness,
    compute_index,
    sample_arm,
    softmax_policy,
)


class TestComputeIndex:

    def test_two_arm_example(self):
        snapshot = compute_index([0.7, 0.5], [0.1, 0.2], beta=1.0)
        assert snapshot.best_lcb_arm == 0
        np.testing.assert_allclose(snapshot.phi, [0.2, 0.3])
        np.testing.assert_allclose(snapshot.gap_estimates, [0.0, 0.2])
        np.testing.assert_allclose(snapshot.index, [0.2, 0.1])

    def test_beta_zero_gives_negative_gaps(self):
        snapshot = compute_index([0.7, 0.5], [0.1, 0.2], beta=0.0)
        np.testing.assert_allclose(snapshot.index, [0.0, -0.2])

    def test_tie_goes_to_lowest_index(self):
        snapshot = compute_index([0.5, 0.5, 0.5], [0.1, 0.1, 0.1], beta=1.0)
        assert snapshot.best_lcb_arm == 0

    def test_single_arm(self):
        snapshot = compute_index([0.4], [0.3], beta=2.0)
        assert snapshot.best_lcb_arm == 0
        np.testing.assert_allclose(snapshot.index, [1.2])

    def test_best_arm_index_is_non_negative(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            k = int(rng.integers(1, 20))
            snapshot = compute_index(rng.random(k), rng.random(k), beta=float(rng.random() * 3))
            assert snapshot.index[snapshot.best_lcb_arm] >= 0

    def test_rejects_shape_mismatch(self):
        with pytest.raises(ValueError):
            compute_index([0.1, 0.2], [0.1], beta=1.0)
        with pytest.raises(ValueError):
            compute_index([], [], beta=1.0)


class TestColdness:

    def test_positive_formula(self):
        snapshot = IndexSnapshot.from_index([2.0, -1.0])
        assert coldness(snapshot, 0.9) == pytest.approx(math.log(9) / 2)

    def test_negative_formula_is_clamped(self):
        snapshot = IndexSnapshot.from_index([2.0, -1.0])
        assert coldness(snapshot, 0.5) == 0.0
        assert coldness(snapshot, 0.1) == 0.0

    def test_empty_suboptimal_set_counts_as_one(self):
        snapshot = IndexSnapshot.from_index([1.0, 0.5])
        assert snapshot.suboptimal_set_size == 0
        assert coldness(snapshot, 0.9) == pytest.approx(math.log(9))

    def test_zero_s_max_is_clamped(self):
        snapshot = IndexSnapshot.from_index([0.0, -1.0])
        gamma = coldness(snapshot, 0.9)
        assert math.isfinite(gamma)
        assert gamma == pytest.approx(math.log(9) / 1e-12)

    @pytest.mark.parametrize("delta", [0.0, 1.0, -0.2, 1.5])
    def test_rejects_delta_outside_open_interval(self, delta):
        with pytest.raises(ValueError):
            coldness(IndexSnapshot.from_index([1.0, -1.0]), delta)


class TestSoftmaxPolicy:

    def test_example(self):
        np.testing.assert_allclose(softmax_policy([math.log(2), 0.0], 1.0), [2 / 3, 1 / 3])

    def test_zero_coldness_is_uniform(self):
        np.testing.assert_allclose(softmax_policy([5.0, -3.0, 0.1, 2.0], 0.0), np.full(4, 0.25))

    def test_huge_logits_stay_finite(self):
        policy = softmax_policy([1000.0, 0.0], 1.0)
        assert np.all(np.isfinite(policy))
        np.testing.assert_allclose(policy, [1.0, 0.0], atol=1e-300)

    def test_shift_invariance(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            index = rng.normal(size=int(rng.integers(2, 30)))
            gamma = float(rng.random() * 10)
            shift = float(rng.normal() * 50)
            np.testing.assert_allclose(softmax_policy(index + shift, gamma), softmax_policy(index, gamma),
                                       rtol=1e-9, atol=1e-15)

    def test_rejects_negative_coldness(self):
        with pytest.raises(ValueError):
            softmax_policy([0.1, 0.2], -1.0)


class TestSuboptimalMassBound:
    """The coldness rule puts at least delta of the mass on non-negative-index arms."""

    def test_randomized_index_vectors(self):
        rng = np.random.default_rng(20240517)
        checked = 0
        for case in range(10000):
            k = int(rng.integers(2, 101))
            delta = (0.1, 0.5, 0.9)[case % 3]
            means = rng.random(k)
            radii = rng.random(k) * 0.3
            snapshot = compute_index(means, radii, beta=float(rng.random() * 2))
            if snapshot.suboptimal_set_size < 1 or snapshot.s_max_nonneg <= 0:
                continue
            policy = softmax_policy(snapshot.index, coldness(snapshot, delta))
            upper = snapshot.index >= 0
            assert policy[upper].sum() >= delta - 1e-12
            assert policy[~upper].sum() <= 1 - delta + 1e-12
            checked += 1
        assert checked > 5000


class TestNegativeIndexImpliesWorseArm:
    """With valid radii, a negative index rules the arm out as better than the reference arm."""

    def test_dyadic_constructions(self):
        # dyadic grid keeps every sum exact in floating point
        rng = np.random.default_rng(7)
        for _ in range(5000):
            k = int(rng.integers(2, 6))
            true_means = rng.integers(0, 17, size=k) / 16
            radii = rng.integers(0, 5, size=k) / 16
            offsets = np.array([rng.integers(-r, r + 1) for r in (radii * 16).astype(int)]) / 16
            estimates = true_means + offsets
            assert np.all(np.abs(estimates - true_means) <= radii)

            snapshot = compute_index(estimates, radii, beta=1.0)
            reference = snapshot.best_lcb_arm
            for arm in np.flatnonzero(snapshot.index < 0):
                assert true_means[arm] < true_means[reference]


class TestSampleArm:

    def test_frequencies_match_policy(self):
        rng = np.random.default_rng(11)
        policy = np.array([0.5, 0.3, 0.2])
        draws = np.array([sample_arm(policy, rng) for _ in range(10000)])
        freqs = np.bincount(draws, minlength=3) / len(draws)
        np.testing.assert_allclose(freqs, policy, atol=0.02)

    def test_point_mass(self):
        rng = np.random.default_rng(0)
        assert all(sample_arm(np.array([0.0, 1.0, 0.0]), rng) == 1 for _ in range(100))

    def test_same_seed_same_draws(self):
        policy = np.array([0.25, 0.25, 0.5])
        a = [sample_arm(policy, np.random.default_rng(4)) for _ in range(3)]
        rng_a, rng_b = np.random.default_rng(4), np.random.default_rng(4)
        assert [sample_arm(policy, rng_a) for _ in range(50)] == [sample_arm(policy, rng_b) for _ in range(50)]
        assert len(set(a)) == 1
