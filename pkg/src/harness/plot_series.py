import logging
import os
from typing import Dict, List, Tuple

import pandas as pd

from src.reporter.csv_reporter import SERIES_COLUMNS, write_csv

logger = logging.getLogger(__name__)

# figure file -> metrics it holds
FIGURE_FILES: Dict[str, Tuple[str, ...]] = {
    'series_exploit.csv': ('exploit_epoch', 'exploit_round'),
    'series_params.csv': ('alpha', 'beta'),
    'series_radius.csv': ('radius_round',),
    'series_reward.csv': ('cum_reward_round',),
}


def average_series(raw: pd.DataFrame, smooth: int = 0) -> pd.DataFrame:
    """Mean over runs per (algorithm, metric, epoch_or_round), optionally smoothed.

    ``smooth`` > 1 applies a trailing moving average of that many points along
    each curve; the emitted raw data is never smoothed.
    """
    averaged = (raw.groupby(['algorithm', 'metric', 'epoch_or_round'], sort=False)['value']
                .mean()
                .reset_index()
                .sort_values(['algorithm', 'metric', 'epoch_or_round'], kind='mergesort')
                .reset_index(drop=True))
    if smooth > 1:
        averaged['value'] = (averaged.groupby(['algorithm', 'metric'], sort=False)['value']
                             .transform(lambda s: s.rolling(smooth, min_periods=1).mean()))
    return averaged


def emit_plot_series(bundle_dir: str, smooth: int = 0) -> List[str]:
    """Write one averaged CSV per figure from ``series_raw.csv`` in ``bundle_dir``.

    Figures whose metrics are absent are skipped with a warning.

    Returns:
        Paths of the files written
    """
    raw_path = os.path.join(bundle_dir, 'series_raw.csv')
    if not os.path.exists(raw_path):
        raise FileNotFoundError(f"no series_raw.csv in {bundle_dir}")
    raw = pd.read_csv(raw_path)
    if raw.empty:
        logger.warning(f"{raw_path} holds no series; no figure files written")
        return []

    averaged = average_series(raw, smooth)
    written = []
    for filename, metrics in FIGURE_FILES.items():
        subset = averaged[averaged['metric'].isin(metrics)]
        if subset.empty:
            logger.warning(f"Skipping {filename}: no {', '.join(metrics)} logs in {bundle_dir}")
            continue
        written.append(write_csv(subset, os.path.join(bundle_dir, filename), SERIES_COLUMNS))
    logger.info(f"Wrote {len(written)} figure series to {bundle_dir}")
    return written
