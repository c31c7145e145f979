import logging
import os
from typing import Optional

import numpy as np
import pandas as pd

from src.config import settings
from src.bandit.instance import BanditInstance, RewardLaw

logger = logging.getLogger(__name__)


class DatasetLoadError(ValueError):
    """The ratings/clicks CSV could not be turned into an instance."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def percentile_threshold(means, percentile: float) -> float:
    """Nearest-rank percentile of the arm means (no interpolation)."""
    if not 0.0 < percentile <= 100.0:
        raise ValueError(f"percentile must lie in (0, 100], got {percentile}")
    return float(np.percentile(np.asarray(means, dtype=float), percentile, method='inverted_cdf'))


def load_ratings_csv(path: str, rating_column: str = settings.RATING_COLUMN,
                     item_column: str = settings.ITEM_COLUMN,
                     threshold_percentile: float = settings.THRESHOLD_PERCENTILE,
                     max_arms: Optional[int] = None) -> BanditInstance:
    """Turn a ratings or click log into a Bernoulli instance with one-hot arms.

    Each item becomes an arm whose mean is its average rating min-max rescaled
    to [0, 1] over all ratings in the file. The threshold is the nearest-rank
    ``threshold_percentile`` of the arm means.

    Args:
        path: UTF-8 CSV with a header row
        rating_column: Column holding the rating (or binary click)
        item_column: Column identifying the item
        threshold_percentile: Percentile of arm means used as threshold
        max_arms: Keep only the first ``max_arms`` items in sorted item order

    Returns:
        BanditInstance named after the file
    """
    try:
        frame = pd.read_csv(path, encoding='utf-8')
    except FileNotFoundError:
        raise DatasetLoadError(f"file not found: {path}")
    except pd.errors.EmptyDataError:
        raise DatasetLoadError(f"empty file: {path}", line=1)
    except pd.errors.ParserError as e:
        raise DatasetLoadError(f"malformed CSV {path}: {e}")

    missing = [c for c in (item_column, rating_column) if c not in frame.columns]
    if missing:
        raise DatasetLoadError(f"missing columns {missing} in {path} (found {list(frame.columns)})", line=1)
    if frame.empty:
        raise DatasetLoadError(f"no data rows in {path}", line=2)

    ratings = pd.to_numeric(frame[rating_column], errors='coerce')
    bad_rows = ratings.index[ratings.isna()]
    if len(bad_rows):
        row = bad_rows[0]
        # header is line 1
        raise DatasetLoadError(f"non-numeric {rating_column!r} value {frame[rating_column][row]!r}", line=int(row) + 2)
    items = frame[item_column]
    if items.isna().any():
        row = items.index[items.isna()][0]
        raise DatasetLoadError(f"missing {item_column!r} value", line=int(row) + 2)

    low, high = ratings.min(), ratings.max()
    per_item = ratings.groupby(items, sort=True).mean()
    if max_arms is not None:
        per_item = per_item.iloc[:max_arms]

    if high > low:
        means = ((per_item - low) / (high - low)).to_numpy(dtype=float)
    else:
        # every rating identical: no spread to rescale
        means = np.full(len(per_item), 0.5)
    means = np.clip(means, 0.0, 1.0)

    threshold = percentile_threshold(means, threshold_percentile)
    name = os.path.splitext(os.path.basename(path))[0]
    logger.info(f"Loaded {len(means)} arms from {path} (ratings in [{low}, {high}]), threshold {threshold:.6g}")
    return BanditInstance(
        arm_features=np.eye(len(means)),
        true_means=means,
        threshold=threshold,
        reward_law=RewardLaw.BERNOULLI,
        name=name,
    )
