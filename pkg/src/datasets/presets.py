import logging
from dataclasses import dataclass, replace
from enum import Enum
from typing import Dict, Optional

from src.config import settings
from src.bandit.instance import BanditInstance, make_synthetic_instance
from src.datasets.ratings_loader import load_ratings_csv

logger = logging.getLogger(__name__)


class DatasetSource(str, Enum):
    GENERATED = 'generated'
    CSV_PATH = 'csv_path'


class UnknownPresetError(ValueError):
    pass


@dataclass(frozen=True)
class DatasetPreset:
    name: str
    arms: int
    horizon: int
    threshold: float
    source: DatasetSource = DatasetSource.GENERATED


# Arm counts, horizons and thresholds of the benchmark datasets.
# OpenBanditLike's horizon is kept as published (107); override it with --horizon.
PRESETS: Dict[str, DatasetPreset] = {
    'SynthSmall': DatasetPreset('SynthSmall', 50, 1000000, 0.5),
    'SynthLarge': DatasetPreset('SynthLarge', 1000, 1000000, 0.5),
    'MovieLensLike': DatasetPreset('MovieLensLike', 9527, 100000, 0.071, DatasetSource.CSV_PATH),
    'OpenBanditLike': DatasetPreset('OpenBanditLike', 80, 107, 0.005, DatasetSource.CSV_PATH),
}


def preset(name: str) -> DatasetPreset:
    try:
        return PRESETS[name]
    except KeyError:
        raise UnknownPresetError(f"unknown dataset preset {name!r}; expected one of {sorted(PRESETS)}")


def scaled_preset(base: DatasetPreset, scale: float) -> DatasetPreset:
    """Shrink K and T for desk-scale runs: K' = max(2, round(K s)), T' = max(10 K', round(T s)).

    scale = 1 returns ``base`` untouched.
    """
    if not 0.0 < scale <= 1.0:
        raise ValueError(f"scale must lie in (0, 1], got {scale}")
    if scale == 1.0:
        return base
    arms = max(2, int(round(base.arms * scale)))
    horizon = max(10 * arms, int(round(base.horizon * scale)))
    return replace(base, arms=arms, horizon=horizon)


def build_instance(dataset: DatasetPreset, seed: int, csv_path: Optional[str] = None,
                   rating_column: str = settings.RATING_COLUMN, item_column: str = settings.ITEM_COLUMN,
                   threshold_percentile: float = settings.THRESHOLD_PERCENTILE,
                   max_arms: Optional[int] = None) -> BanditInstance:
    """Materialize a preset: synthetic means from ``seed``, or the configured CSV.

    For CSV presets the threshold comes from the percentile of the loaded arm
    means and the arm count from the file (capped by ``max_arms``).
    """
    if dataset.source == DatasetSource.GENERATED:
        return make_synthetic_instance(dataset.arms, settings.SYNTH_MEAN_LOW, settings.SYNTH_MEAN_HIGH,
                                       dataset.threshold, seed, name=dataset.name)

    if not csv_path:
        raise ValueError(f"dataset {dataset.name} reads a CSV log; set CSV_PATH")
    return load_ratings_csv(csv_path, rating_column=rating_column, item_column=item_column,
                            threshold_percentile=threshold_percentile, max_arms=max_arms)
