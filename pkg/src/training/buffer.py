import logging
from typing import Optional

import numpy as np

from src.config import settings

logger = logging.getLogger(__name__)

# means, norms (float64) and the active flag, per arm and round
CELL_BYTES = 8 + 8 + 1
# coldness, sampled, arm, reward
ROUND_BYTES = 8 + 1 + 8 + 8


class BufferTooLargeError(MemoryError):
    """A preallocated trajectory would exceed settings.BUFFER_MAX_GB."""


def buffer_bytes(horizon: int, num_arms: int, keep_policy: bool = False) -> int:
    cell = CELL_BYTES + (8 if keep_policy else 0)
    return horizon * (num_arms * cell + ROUND_BYTES)


def check_buffer_size(horizon: int, num_arms: int, keep_policy: bool = False):
    """Raise BufferTooLargeError if a horizon x num_arms trajectory does not fit the cap."""
    needed = buffer_bytes(horizon, num_arms, keep_policy)
    limit = settings.BUFFER_MAX_GB * 2 ** 30
    if needed > limit:
        raise BufferTooLargeError(
            f"trajectory buffer for T={horizon}, K={num_arms} needs {needed / 2 ** 30:.1f} GB, "
            f"above the {settings.BUFFER_MAX_GB:g} GB cap (GAI_BUFFER_MAX_GB); lower --scale or --horizon")


class TrajectoryBuffer:
    """Per-round record of one trajectory, preallocated for ``horizon`` rounds.

    Row t holds the state the decision of round t+1 was made from: ridge
    means, feature norms, the active mask and the coldness in force, plus the
    pulled arm and its reward. Rows of the initial round-robin pulls have
    ``sampled`` False.
    """

    def __init__(self, horizon: int, num_arms: int, epoch: int = 0, keep_policy: bool = False):
        check_buffer_size(horizon, num_arms, keep_policy)
        self.horizon = horizon
        self.num_arms = num_arms
        self.epoch = epoch
        self.length = 0
        self._means = np.zeros((horizon, num_arms))
        self._norms = np.zeros((horizon, num_arms))
        self._active = np.zeros((horizon, num_arms), dtype=bool)
        self._coldness = np.zeros(horizon)
        self._sampled = np.zeros(horizon, dtype=bool)
        self._arms = np.zeros(horizon, dtype=np.int64)
        self._rewards = np.zeros(horizon)
        self._policy = np.zeros((horizon, num_arms)) if keep_policy else None

    def append(self, means: np.ndarray, norms: np.ndarray, active: np.ndarray, coldness: float,
               sampled: bool, arm: int, reward: float, policy: Optional[np.ndarray] = None):
        if self.length >= self.horizon:
            raise IndexError(f"trajectory buffer is full ({self.horizon} rounds)")
        t = self.length
        self._means[t] = means
        self._norms[t] = norms
        self._active[t] = active
        self._coldness[t] = coldness
        self._sampled[t] = sampled
        self._arms[t] = arm
        self._rewards[t] = reward
        if self._policy is not None and policy is not None:
            self._policy[t] = policy
        self.length += 1

    @classmethod
    def from_arrays(cls, means, norms, active=None, coldness=None, sampled=None, epoch: int = 0) -> 'TrajectoryBuffer':
        """Build a filled buffer from (rounds x arms) arrays; used by tests and replays."""
        means = np.atleast_2d(np.asarray(means, dtype=float))
        norms = np.atleast_2d(np.asarray(norms, dtype=float))
        rounds, arms = means.shape
        buffer = cls(rounds, arms, epoch=epoch)
        buffer._means[:] = means
        buffer._norms[:] = norms
        buffer._active[:] = True if active is None else np.asarray(active, dtype=bool)
        buffer._coldness[:] = 0.0 if coldness is None else np.asarray(coldness, dtype=float)
        buffer._sampled[:] = True if sampled is None else np.asarray(sampled, dtype=bool)
        buffer.length = rounds
        return buffer

    def __len__(self) -> int:
        return self.length

    @property
    def means(self) -> np.ndarray:
        return self._means[:self.length]

    @property
    def norms(self) -> np.ndarray:
        return self._norms[:self.length]

    @property
    def active(self) -> np.ndarray:
        return self._active[:self.length]

    @property
    def coldness(self) -> np.ndarray:
        return self._coldness[:self.length]

    @property
    def sampled(self) -> np.ndarray:
        return self._sampled[:self.length]

    @property
    def arms(self) -> np.ndarray:
        return self._arms[:self.length]

    @property
    def rewards(self) -> np.ndarray:
        return self._rewards[:self.length]

    @property
    def policy(self) -> Optional[np.ndarray]:
        return None if self._policy is None else self._policy[:self.length]
