import logging
from enum import IntEnum
from typing import List, Optional, Tuple

import numpy as np

logger = logging.getLogger(__name__)


class ArmStatus(IntEnum):
    ACTIVE = 0
    GOOD = 1
    BAD = 2
    UNDECIDED = 3  # horizon reached before a decision


class IdentificationLedger:
    """Per-arm decisions of one episode, with the round of each decision."""

    def __init__(self, num_arms: int):
        self.status = np.full(num_arms, ArmStatus.ACTIVE, dtype=np.int8)
        self.decision_round = np.zeros(num_arms, dtype=np.int64)
        self.outputs_in_order: List[Tuple[int, int]] = []
        self.stop_round: Optional[int] = None
        self.censored = False

    @property
    def num_arms(self) -> int:
        return len(self.status)

    def is_active(self, arm: int) -> bool:
        return self.status[arm] == ArmStatus.ACTIVE

    def active_arms(self) -> np.ndarray:
        return np.flatnonzero(self.status == ArmStatus.ACTIVE)

    @property
    def num_active(self) -> int:
        return int(np.count_nonzero(self.status == ArmStatus.ACTIVE))

    def _decide(self, arm: int, status: ArmStatus, round_index: int):
        if not self.is_active(arm):
            raise ValueError(f"arm {arm} already decided as {ArmStatus(self.status[arm]).name}")
        self.status[arm] = status
        self.decision_round[arm] = round_index
        if self.num_active == 0:
            self.stop_round = round_index

    def mark_good(self, arm: int, round_index: int):
        self._decide(arm, ArmStatus.GOOD, round_index)
        self.outputs_in_order.append((arm, round_index))
        logger.debug(f"Round {round_index}: arm {arm} identified as good")

    def mark_bad(self, arm: int, round_index: int):
        self._decide(arm, ArmStatus.BAD, round_index)
        logger.debug(f"Round {round_index}: arm {arm} identified as bad")

    def finalize(self, horizon: int):
        """Close the episode at the horizon; remaining active arms become undecided."""
        if self.stop_round is not None:
            return
        remaining = self.active_arms()
        self.status[remaining] = ArmStatus.UNDECIDED
        self.stop_round = horizon
        self.censored = True

    @property
    def good_outputs(self) -> List[int]:
        return [arm for arm, _ in self.outputs_in_order]

    @property
    def num_good_output(self) -> int:
        return len(self.outputs_in_order)
