from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from src.algorithms.ledger import IdentificationLedger


@dataclass
class RunTrace:
    """Full record of one episode.

    Pull ``j`` (0-based) happened in round ``j + 1``.
    """

    arms: np.ndarray
    rewards: np.ndarray
    ledger: IdentificationLedger
    horizon: int
    algorithm: str = ''
    seed: int = 0
    policy_log: Optional[np.ndarray] = None
    # (epoch or round, alpha, beta) after each parameter update
    params_log: List[Tuple[int, float, float]] = field(default_factory=list)
    # per-epoch (epoch, exploit score, cumulative reward) of training runs
    epoch_log: List[Tuple[int, float, float]] = field(default_factory=list)
    alpha: Optional[float] = None
    beta: Optional[float] = None

    @property
    def num_pulls(self) -> int:
        return len(self.arms)

    @property
    def rounds(self) -> np.ndarray:
        return np.arange(1, self.num_pulls + 1)

    def pull_counts(self, num_arms: int, upto: Optional[int] = None) -> np.ndarray:
        """Pulls per arm among the first ``upto`` rounds (all rounds by default)."""
        arms = self.arms if upto is None else self.arms[:upto]
        return np.bincount(arms, minlength=num_arms)
