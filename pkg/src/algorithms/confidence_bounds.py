"""
Sampling indices and identification radii of the GAI baselines.

All functions accept scalars or numpy arrays (broadcasting), so the episode
loop can score every active arm in one call.
"""

import logging
from enum import Enum

import numpy as np

logger = logging.getLogger(__name__)


class Decision(str, Enum):
    GOOD = 'good'
    BAD = 'bad'
    UNDECIDED = 'undecided'


def hdoc_ucb(mean, pulls, round_index):
    """HDoC sampling bound: mean + sqrt(log t / 2N)."""
    return mean + np.sqrt(np.log(round_index) / (2.0 * np.asarray(pulls, dtype=float)))


def lucbg_ucb(mean, pulls, arms: int, delta: float, round_index=None, include_round: bool = False):
    """LUCB-G sampling bound: mean + sqrt(log(4 K N^2 / delta) / 2N).

    With ``include_round`` the stray t of the printed formula multiplies the
    log argument: log(4 K N^2 t / delta).
    """
    pulls = np.asarray(pulls, dtype=float)
    argument = 4.0 * arms * pulls ** 2 / delta
    if include_round:
        if round_index is None:
            raise ValueError("include_round needs round_index")
        argument = argument * round_index
    return mean + np.sqrt(np.log(argument) / (2.0 * pulls))


def aptg_index(mean, pulls, threshold: float):
    """APT-G index: mean + sqrt(N) |xi - mean|."""
    return mean + np.sqrt(np.asarray(pulls, dtype=float)) * np.abs(threshold - mean)


def apt_canonical_index(mean, pulls, threshold: float):
    """Canonical APT score sqrt(N) |xi - mean|; the arm minimizing it is pulled."""
    return np.sqrt(np.asarray(pulls, dtype=float)) * np.abs(threshold - mean)


def union_identification_bound(pulls, arms: int, delta: float):
    """Shared identification radius of the baselines: sqrt(log(4 K N^2 / delta) / 2N)."""
    pulls = np.asarray(pulls, dtype=float)
    return np.sqrt(np.log(4.0 * arms * pulls ** 2 / delta) / (2.0 * pulls))


def classify(mean: float, radius: float, threshold: float) -> Decision:
    """Good if the lower bound clears the threshold, Bad if the upper bound misses it."""
    if mean - radius >= threshold:
        return Decision.GOOD
    if mean + radius < threshold:
        return Decision.BAD
    return Decision.UNDECIDED


def dgai_identify(ridge_mean: float, alpha: float, norm: float, threshold: float) -> Decision:
    """DGAI identification with the learned radius alpha * ||x||_{V^-1}."""
    return classify(ridge_mean, alpha * norm, threshold)


def tt_ts_select(successes, failures, resample_prob: float, rng: np.random.Generator,
                 max_resamples: int = 100) -> int:
    """Top-two Thompson sampling over Beta(successes, failures) posteriors.

    Args:
        successes: Per-arm Beta alpha parameters (prior included)
        failures: Per-arm Beta beta parameters (prior included)
        resample_prob: Probability of playing the leader
        rng: Random generator of the run
        max_resamples: Challenger resampling cap before falling back

    Returns:
        Position of the selected arm within the given arrays
    """
    successes = np.asarray(successes, dtype=float)
    failures = np.asarray(failures, dtype=float)
    leader_draw = rng.beta(successes, failures)
    leader = int(np.argmax(leader_draw))
    if successes.size == 1 or rng.random() < resample_prob:
        return leader

    draw = leader_draw
    for _ in range(max_resamples):
        draw = rng.beta(successes, failures)
        challenger = int(np.argmax(draw))
        if challenger != leader:
            return challenger

    # 后验过于集中: 取最后一次采样中除leader外的最大者
    draw = draw.copy()
    draw[leader] = -np.inf
    return int(np.argmax(draw))
