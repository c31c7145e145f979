#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
测试数据集预设
Tests for dataset presets and instance construction.
"""

import numpy as np
import pytest

from src.datasets.presets import (
    PRESETS,
    DatasetSource,
    UnknownPresetError,
    build_instance,
    preset,
    scaled_preset,
)


class TestPresets:

    @pytest.mark.parametrize("name, arms, horizon, threshold", [
        ('SynthSmall', 50, 1000000, 0.5),
        ('SynthLarge', 1000, 1000000, 0.5),
        ('MovieLensLike', 9527, 100000, 0.071),
        ('OpenBanditLike', 80, 107, 0.005),
    ])
    def test_table_values(self, name, arms, horizon, threshold):
        p = preset(name)
        assert (p.arms, p.horizon, p.threshold) == (arms, horizon, threshold)

    def test_unknown(self):
        with pytest.raises(UnknownPresetError):
            preset('Netflix')

    def test_same_object_across_calls(self):
        assert preset('SynthSmall') is PRESETS['SynthSmall']


class TestScaledPreset:

    def test_identity(self):
        base = preset('OpenBanditLike')
        assert scaled_preset(base, 1.0) == base

    def test_synth_small(self):
        p = scaled_preset(preset('SynthSmall'), 0.4)
        assert (p.arms, p.horizon, p.threshold) == (20, 400000, 0.5)

    def test_synth_large(self):
        p = scaled_preset(preset('SynthLarge'), 0.02)
        assert (p.arms, p.horizon) == (20, 20000)

    def test_floors(self):
        p = scaled_preset(preset('SynthSmall'), 0.001)
        assert p.arms == 2
        assert p.horizon == 1000

    def test_horizon_floor_of_ten_pulls_per_arm(self):
        p = scaled_preset(preset('MovieLensLike'), 0.5)
        assert p.arms == 4764
        assert p.horizon == 50000

    @pytest.mark.parametrize("scale", [0.0, -0.5, 1.5])
    def test_rejects_scale(self, scale):
        with pytest.raises(ValueError):
            scaled_preset(preset('SynthSmall'), scale)


class TestBuildInstance:

    def test_synthetic(self):
        p = scaled_preset(preset('SynthSmall'), 0.1)
        instance = build_instance(p, seed=3)
        assert instance.num_arms == 5
        assert instance.threshold == 0.5
        np.testing.assert_array_equal(instance.true_means, build_instance(p, seed=3).true_means)

    def test_csv_needs_path(self):
        with pytest.raises(ValueError, match="CSV_PATH"):
            build_instance(preset('MovieLensLike'), seed=0)

    def test_csv(self, tmp_path):
        path = tmp_path / 'clicks.csv'
        path.write_text("item_id,rating\na,1\nb,0\nc,1\nc,0\n", encoding='utf-8')
        instance = build_instance(preset('OpenBanditLike'), seed=0, csv_path=str(path), threshold_percentile=95)
        assert preset('OpenBanditLike').source == DatasetSource.CSV_PATH
        np.testing.assert_allclose(instance.true_means, [1.0, 0.0, 0.5])
        assert instance.threshold == 1.0
