import logging
import os
from typing import List, Optional

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)

RUNS_COLUMNS = ['run_id', 'algorithm', 'dataset', 'seed', 'T', 'exploit_score', 'cum_reward', 'tau_stop',
                'n_good_output', 'n_false_good']
AGGREGATE_COLUMNS = ['algorithm', 'dataset', 'n_runs', 'n_failed', 'exploit_score_mean', 'exploit_score_sd',
                     'cum_reward_mean', 'cum_reward_sd', 'tau_stop_mean', 'tau_stop_sd', 'false_good_rate',
                     'pac_error']
SERIES_RAW_COLUMNS = ['algorithm', 'run_id', 'metric', 'epoch_or_round', 'value']
SERIES_COLUMNS = ['algorithm', 'metric', 'epoch_or_round', 'value']

# 9 significant digits keeps files byte-stable across reruns
FLOAT_FORMAT = '%.9g'


def write_csv(frame: pd.DataFrame, path: str, columns: Optional[List[str]] = None) -> str:
    """Write ``frame`` as UTF-8 CSV with LF line endings and fixed float format."""
    if columns is not None:
        missing = [c for c in columns if c not in frame.columns]
        if missing:
            raise ValueError(f"frame for {path} lacks columns {missing}")
        frame = frame[columns]
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator='\n', encoding='utf-8')
    return path


class CsvReporter:
    """Delivers experiment results as CSV files in one bundle directory."""

    def __init__(self, output_dir: str):
        """Initialize the reporter.

        Args:
            output_dir: Bundle directory, created if missing
        """
        self.output_dir = output_dir
        os.makedirs(output_dir, exist_ok=True)

    def path(self, filename: str) -> str:
        return os.path.join(self.output_dir, filename)

    def write_runs(self, runs: pd.DataFrame) -> str:
        return write_csv(runs, self.path('runs.csv'), RUNS_COLUMNS)

    def write_aggregate(self, aggregate: pd.DataFrame) -> str:
        return write_csv(aggregate, self.path('aggregate.csv'), AGGREGATE_COLUMNS)

    def write_series_raw(self, series: pd.DataFrame) -> str:
        return write_csv(series, self.path('series_raw.csv'), SERIES_RAW_COLUMNS)

    def write_policy(self, run_id: int, policy: np.ndarray) -> str:
        """Per-round policy snapshot: one row per round, one column per arm."""
        frame = pd.DataFrame(policy, columns=[f'p_{i}' for i in range(policy.shape[1])])
        frame.insert(0, 'round', np.arange(1, len(frame) + 1))
        return write_csv(frame, self.path(f'policy_{run_id}.csv'))

    def format_summary(self, aggregate: pd.DataFrame) -> str:
        """Plain-text table of the aggregate rows for the log."""
        lines = [f"{'algorithm':<14}{'runs':>6}{'failed':>8}{'exploit':>16}{'reward':>14}{'tau_stop':>12}"]
        for row in aggregate.itertuples(index=False):
            lines.append(
                f"{row.algorithm:<14}{row.n_runs:>6}{row.n_failed:>8}"
                f"{self._format_number(row.exploit_score_mean):>16}"
                f"{self._format_number(row.cum_reward_mean):>14}"
                f"{self._format_number(row.tau_stop_mean):>12}"
            )
        return '\n'.join(lines)

    def _format_number(self, number: float) -> str:
        if number is None or pd.isna(number):
            return '-'
        if abs(number) >= 1_000_000:
            return f"{number / 1_000_000:.2f}M"
        if abs(number) >= 10_000:
            return f"{number / 1_000:.1f}k"
        return f"{number:.2f}"

    def send_summary(self, aggregate: pd.DataFrame):
        logger.info(f"Results in {self.output_dir}:\n{self.format_summary(aggregate)}")
