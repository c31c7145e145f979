import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import cho_factor, cho_solve

logger = logging.getLogger(__name__)


class UndefinedStatisticError(ValueError):
    """A statistic was requested for an arm that has never been pulled."""


@dataclass
class LinearState:
    """Online ridge statistics of one run.

    ``gram`` is V_t = I + sum x x^T. With ``diagonal=True`` (one-hot arms) only
    its diagonal is stored, so ``gram`` is a length-d vector and every solve
    is an exact elementwise division.
    """

    gram: np.ndarray
    response: np.ndarray
    pull_counts: np.ndarray
    reward_sums: np.ndarray
    round: int = 0
    diagonal: bool = False

    @classmethod
    def create(cls, num_arms: int, dimension: int, diagonal: bool = False) -> 'LinearState':
        if diagonal and num_arms != dimension:
            raise ValueError("diagonal state needs one-hot features (num_arms == dimension)")
        gram = np.ones(dimension) if diagonal else np.eye(dimension)
        return cls(
            gram=gram,
            response=np.zeros(dimension),
            pull_counts=np.zeros(num_arms, dtype=np.int64),
            reward_sums=np.zeros(num_arms),
            diagonal=diagonal,
        )

    @classmethod
    def for_instance(cls, instance, force_matrix: bool = False) -> 'LinearState':
        diagonal = instance.is_one_hot and not force_matrix
        return cls.create(instance.num_arms, instance.dimension, diagonal=diagonal)

    @property
    def gram_matrix(self) -> np.ndarray:
        return np.diag(self.gram) if self.diagonal else self.gram

    def _solve(self, rhs: np.ndarray) -> np.ndarray:
        if self.diagonal:
            return rhs / (self.gram if rhs.ndim == 1 else self.gram[:, None])
        try:
            factor = cho_factor(self.gram, lower=True, check_finite=False)
            return cho_solve(factor, rhs, check_finite=False)
        except np.linalg.LinAlgError as e:
            raise RuntimeError(f"internal error: Gram matrix solve failed at round {self.round}: {e}") from e


def update_linear_state(state: LinearState, arm_feature: np.ndarray, arm: int, reward: float) -> LinearState:
    """Rank-one update after pulling ``arm`` and observing ``reward``."""
    x = np.asarray(arm_feature, dtype=float)
    if state.diagonal:
        state.gram += x * x
    else:
        state.gram += np.outer(x, x)
    state.response += x * reward
    state.pull_counts[arm] += 1
    state.reward_sums[arm] += reward
    state.round += 1
    return state


def ridge_mean(state: LinearState, arm_feature: np.ndarray) -> float:
    """x^T V^{-1} b; equals reward_sum / (N + 1) for one-hot arms."""
    x = np.asarray(arm_feature, dtype=float)
    return float(x @ state._solve(state.response))


def feature_norm(state: LinearState, arm_feature: np.ndarray) -> float:
    """||x||_{V^{-1}} = sqrt(x^T V^{-1} x)."""
    x = np.asarray(arm_feature, dtype=float)
    return float(np.sqrt(x @ state._solve(x)))


def ridge_means(state: LinearState, features: np.ndarray) -> np.ndarray:
    """Vectorized ridge_mean over the rows of ``features``."""
    if state.diagonal:
        # one-hot rows: row i picks b_i / V_ii
        return state.response / state.gram
    return features @ state._solve(state.response)


def feature_norms(state: LinearState, features: np.ndarray) -> np.ndarray:
    """Vectorized feature_norm over the rows of ``features``."""
    if state.diagonal:
        return 1.0 / np.sqrt(state.gram)
    solved = state._solve(features.T)
    return np.sqrt(np.einsum('ij,ji->i', features, solved))


def empirical_mean(state: LinearState, arm: int) -> float:
    """Plain sample mean of ``arm``; the classical baselines use this one."""
    pulls = state.pull_counts[arm]
    if pulls == 0:
        raise UndefinedStatisticError(f"empirical mean of arm {arm} is undefined before its first pull")
    return float(state.reward_sums[arm] / pulls)


def empirical_means(state: LinearState, arms: Optional[np.ndarray] = None) -> np.ndarray:
    idx = np.arange(len(state.pull_counts)) if arms is None else np.asarray(arms)
    pulls = state.pull_counts[idx]
    if np.any(pulls == 0):
        raise UndefinedStatisticError(f"empirical mean undefined for unpulled arms {idx[pulls == 0].tolist()}")
    return state.reward_sums[idx] / pulls
