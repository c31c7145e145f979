import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import softmax

logger = logging.getLogger(__name__)

# Lower clamp of the coldness denominator S~max
MIN_S_MAX = 1e-12


@dataclass
class IndexSnapshot:
    """Per-round quantities of the differentiable UCB index.

    ``coldness`` and ``policy`` are filled in once the index is known.
    """

    radii: np.ndarray
    best_lcb_arm: int
    gap_estimates: np.ndarray
    phi: np.ndarray
    index: np.ndarray
    coldness: Optional[float] = None
    policy: Optional[np.ndarray] = None

    @classmethod
    def from_index(cls, index) -> 'IndexSnapshot':
        """Wrap a bare index vector (radii, gaps and phi left at zero)."""
        index = np.asarray(index, dtype=float)
        zeros = np.zeros_like(index)
        return cls(radii=zeros, best_lcb_arm=int(np.argmax(index)), gap_estimates=zeros,
                   phi=zeros.copy(), index=index)

    @property
    def suboptimal_set_size(self) -> int:
        return int(np.count_nonzero(self.index < 0))

    @property
    def s_max_nonneg(self) -> float:
        nonneg = self.index[self.index >= 0]
        return float(nonneg.max()) if nonneg.size else 0.0


def compute_index(means, radii, beta: float) -> IndexSnapshot:
    """S_i = beta * phi_i - gap_i around the arm with the largest lower bound.

    Args:
        means: Per-arm mean estimates
        radii: Per-arm confidence radii (non-negative)
        beta: Scale of the confidence term

    Returns:
        IndexSnapshot without coldness and policy
    """
    means = np.asarray(means, dtype=float)
    radii = np.asarray(radii, dtype=float)
    if means.size == 0:
        raise ValueError("compute_index needs at least one arm")
    if means.shape != radii.shape:
        raise ValueError(f"means and radii differ in shape: {means.shape} vs {radii.shape}")

    # np.argmax returns the first maximum: ties go to the lowest index
    best = int(np.argmax(means - radii))
    phi = radii + radii[best]
    gaps = means[best] - means
    return IndexSnapshot(
        radii=radii,
        best_lcb_arm=best,
        gap_estimates=gaps,
        phi=phi,
        index=beta * phi - gaps,
    )


def coldness(snapshot: IndexSnapshot, delta: float) -> float:
    """gamma = log(delta |L| / (1 - delta)) / S~max, clamped to >= 0.

    |L| is clamped to at least 1 and S~max to at least MIN_S_MAX.
    """
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    n_suboptimal = max(snapshot.suboptimal_set_size, 1)
    s_max = max(snapshot.s_max_nonneg, MIN_S_MAX)
    gamma = math.log(delta * n_suboptimal / (1.0 - delta)) / s_max
    return max(gamma, 0.0)


def softmax_policy(index, coldness_value: float) -> np.ndarray:
    """exp(gamma S_i) / sum_j exp(gamma S_j), computed with max-subtraction."""
    if coldness_value < 0:
        raise ValueError(f"coldness must be non-negative, got {coldness_value}")
    logits = coldness_value * np.asarray(index, dtype=float)
    return softmax(logits)


def sample_arm(policy, rng: np.random.Generator) -> int:
    """Categorical draw from ``policy`` using a single uniform variate."""
    cumulative = np.cumsum(policy)
    u = rng.random() * cumulative[-1]
    arm = int(np.searchsorted(cumulative, u, side='right'))
    return min(arm, len(cumulative) - 1)
