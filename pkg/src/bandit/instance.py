import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import FrozenSet, Optional

import numpy as np

from src.config import settings

logger = logging.getLogger(__name__)


class RewardLaw(str, Enum):
    """Stochastic reward law of every arm in an instance."""

    BERNOULLI = 'bernoulli'
    GAUSSIAN = 'gaussian'


@dataclass(frozen=True)
class BanditInstance:
    """Ground-truth arm set: features, true means, threshold and reward law.

    Arrays are made read-only on construction so one instance can be shared
    by concurrent runs.
    """

    arm_features: np.ndarray
    true_means: np.ndarray
    threshold: float
    reward_law: RewardLaw = RewardLaw.BERNOULLI
    noise_sigma: float = 0.0
    name: str = 'instance'

    def __post_init__(self):
        features = np.array(self.arm_features, dtype=float)
        means = np.array(self.true_means, dtype=float)
        if features.ndim != 2 or features.shape[0] < 1 or features.shape[1] < 1:
            raise ValueError(f"arm_features must be a non-empty K x d matrix, got shape {features.shape}")
        if means.shape != (features.shape[0],):
            raise ValueError(f"true_means must have one entry per arm ({features.shape[0]}), got shape {means.shape}")
        if self.reward_law == RewardLaw.BERNOULLI and (means.min() < 0.0 or means.max() > 1.0):
            raise ValueError("Bernoulli arms need means in [0, 1]")
        if self.noise_sigma < 0:
            raise ValueError(f"noise_sigma must be non-negative, got {self.noise_sigma}")
        features.flags.writeable = False
        means.flags.writeable = False
        object.__setattr__(self, 'arm_features', features)
        object.__setattr__(self, 'true_means', means)
        object.__setattr__(self, 'threshold', float(self.threshold))
        object.__setattr__(self, 'reward_law', RewardLaw(self.reward_law))

    @property
    def num_arms(self) -> int:
        return self.arm_features.shape[0]

    @property
    def dimension(self) -> int:
        return self.arm_features.shape[1]

    @property
    def good_set(self) -> FrozenSet[int]:
        """Arms whose true mean reaches the threshold (recomputed on access)."""
        return frozenset(int(i) for i in np.flatnonzero(self.true_means >= self.threshold))

    @property
    def num_good(self) -> int:
        return len(self.good_set)

    @property
    def best_arm(self) -> int:
        return int(np.argmax(self.true_means))

    @property
    def is_one_hot(self) -> bool:
        features = self.arm_features
        return features.shape[0] == features.shape[1] and np.array_equal(features, np.eye(features.shape[0]))


@dataclass(frozen=True)
class RewardSample:
    arm: int
    value: float
    round: int = 0


def make_synthetic_instance(k: int, mean_low: float, mean_high: float, threshold: float,
                            seed: int, name: str = 'synthetic') -> BanditInstance:
    """Build a Bernoulli instance with one-hot features and uniform means.

    Args:
        k: Number of arms
        mean_low: Lower end of the uniform band of true means
        mean_high: Upper end of the band
        threshold: Good-arm threshold
        seed: Seed of the mean generator

    Returns:
        BanditInstance with means drawn i.i.d. from U[mean_low, mean_high]
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if mean_low > mean_high:
        raise ValueError(f"mean_low ({mean_low}) must not exceed mean_high ({mean_high})")
    if mean_low < 0.0 or mean_high > 1.0:
        raise ValueError(f"Bernoulli means must lie in [0, 1], got band [{mean_low}, {mean_high}]")

    rng = np.random.default_rng(seed)
    means = rng.uniform(mean_low, mean_high, size=k)
    logger.debug(f"Generated {k} synthetic arms in [{mean_low}, {mean_high}] with seed {seed}")
    return BanditInstance(
        arm_features=np.eye(k),
        true_means=means,
        threshold=threshold,
        reward_law=RewardLaw.BERNOULLI,
        name=name,
    )


def make_gaussian_instance(means, threshold: float, sigma: Optional[float] = None,
                           name: str = 'gaussian') -> BanditInstance:
    """One-hot instance with Gaussian(mu_i, sigma) rewards; sigma=0 gives deterministic rewards."""
    means = np.asarray(means, dtype=float)
    return BanditInstance(
        arm_features=np.eye(len(means)),
        true_means=means,
        threshold=threshold,
        reward_law=RewardLaw.GAUSSIAN,
        noise_sigma=settings.GAUSSIAN_SIGMA if sigma is None else sigma,
        name=name,
    )


def sample_reward(instance: BanditInstance, arm: int, rng: np.random.Generator,
                  round_index: int = 0) -> RewardSample:
    """Draw one reward of ``arm`` and advance ``rng``."""
    if not 0 <= arm < instance.num_arms:
        raise IndexError(f"arm {arm} out of range [0, {instance.num_arms})")

    mean = instance.true_means[arm]
    if instance.reward_law == RewardLaw.BERNOULLI:
        value = 1.0 if rng.random() < mean else 0.0
    elif instance.noise_sigma == 0.0:
        value = float(mean)
    else:
        value = float(rng.normal(mean, instance.noise_sigma))
    return RewardSample(arm=arm, value=value, round=round_index)
