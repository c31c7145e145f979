#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
测试实验配置加载
Tests for experiment configuration loading.
"""

import pytest

from src.harness.experiment_config import (
    ConfigError,
    ExperimentConfig,
    core_algorithm,
    is_identifying,
    load_config,
)


def write_config(tmp_path, text):
    path = tmp_path / 'experiment.env'
    path.write_text(text, encoding='utf-8')
    return str(path)


class TestLoadConfig:

    def test_defaults_validate(self):
        config = load_config()
        assert isinstance(config, ExperimentConfig)
        assert config.repetitions >= 1

    def test_file_values(self, tmp_path):
        path = write_config(tmp_path, "DATASET=SynthLarge\nALGORITHMS=HDoC, APTG\nREPETITIONS=3\n"
                                      "SCALE=0.02\nEMIT_POLICY_LOG=true\nDELTA_POLICY=\n")
        config = load_config(path)
        assert config.dataset == 'SynthLarge'
        assert config.algorithms == ['HDoC', 'APTG']
        assert config.repetitions == 3
        assert config.scale == 0.02
        assert config.emit_policy_log is True
        assert config.delta_policy is None

    def test_overrides_win_over_file(self, tmp_path):
        path = write_config(tmp_path, "REPETITIONS=3\nBASE_SEED=7\n")
        config = load_config(path, {'repetitions': 5, 'base_seed': None})
        assert config.repetitions == 5
        assert config.base_seed == 7

    def test_alias_and_dedup(self):
        config = load_config(overrides={'algorithms': ['DGAI', 'HDoC', 'DGAI-offline']})
        assert config.algorithms == ['DGAI-offline', 'HDoC']

    def test_dataset_preset_is_scaled(self):
        config = load_config(overrides={'dataset': 'SynthSmall', 'scale': 0.4})
        p = config.dataset_preset()
        assert (p.arms, p.horizon) == (20, 400000)

    def test_baseline_hyper(self):
        config = load_config(overrides={'apt_argmin': True, 'delta_policy': 0.3})
        hyper = config.baseline_hyper()
        assert hyper['apt_argmin'] is True
        assert hyper['delta_policy'] == 0.3


class TestConfigErrors:

    @pytest.mark.parametrize("overrides", [
        {'dataset': 'Netflix'},
        {'algorithms': ['EpsGreedy']},
        {'algorithms': []},
        {'repetitions': 0},
        {'scale': 0.0},
        {'scale': 1.5},
        {'delta': 1.0},
        {'jobs': 0},
        {'eta1': 0.0},
    ])
    def test_invalid_values(self, overrides):
        with pytest.raises(ConfigError):
            load_config(overrides=overrides)

    def test_unknown_key(self, tmp_path):
        path = write_config(tmp_path, "REPS=3\n")
        with pytest.raises(ConfigError, match="unknown key"):
            load_config(path)

    def test_unparsable_value(self, tmp_path):
        path = write_config(tmp_path, "REPETITIONS=many\n")
        with pytest.raises(ConfigError, match="REPETITIONS"):
            load_config(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="cannot read"):
            load_config(str(tmp_path / 'absent.env'))


class TestAlgorithmNames:

    def test_core_algorithm(self):
        assert core_algorithm('DGAI-online') == 'DGAI'
        assert core_algorithm('HDoC') == 'HDoC'

    def test_is_identifying(self):
        assert is_identifying('DGAI-offline')
        assert is_identifying('TTTS')
        assert not is_identifying('UCB')
        assert not is_identifying('DGAI-MAB')
