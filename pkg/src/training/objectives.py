"""
Differentiable training objectives and their analytic gradients.

Every objective is a sum of per-round terms. A round's term is recomputed
from what the trajectory buffer recorded for it (ridge means, feature norms,
active mask, coldness) at the parameter values being evaluated. The recorded
coldness is held fixed, so the gradients below are exact derivatives of the
objective values.

Every term sums over all recorded rounds and all arms. The active mask only
bounds the support of the recomputed softmax policy; round-robin rows count
like any other round, with the coldness they recorded.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np
from scipy.special import expit, softmax

from src.training.params import TrainableParams

logger = logging.getLogger(__name__)


class Objective(str, Enum):
    SAMPLING = 'sampling'
    IDENTIFICATION = 'identification'
    COMBINED = 'combined'


@dataclass
class ParamGradient:
    alpha: float = 0.0
    beta: float = 0.0


@dataclass
class RoundTerms:
    """Per-round objective values and their derivatives in alpha and beta."""

    values: np.ndarray
    grad_alpha: np.ndarray
    grad_beta: np.ndarray

    def total(self) -> float:
        return float(self.values.sum())

    def gradient(self) -> ParamGradient:
        return ParamGradient(alpha=float(self.grad_alpha.sum()), beta=float(self.grad_beta.sum()))


def combined_policy(index, screening, coldness: float) -> np.ndarray:
    """softmax(coldness * S_i * I_i); with every I_i = 1 this is softmax_policy."""
    if coldness < 0:
        raise ValueError(f"coldness must be non-negative, got {coldness}")
    logits = (coldness * np.asarray(index, dtype=float)) * np.asarray(screening, dtype=float)
    return softmax(logits)


def _masked_index(means, norms, active, beta):
    lcb = np.where(active, means - norms, -np.inf)
    best = np.argmax(lcb, axis=1)
    rows = np.arange(means.shape[0])
    phi = norms + norms[rows, best][:, None]
    gaps = means[rows, best][:, None] - means
    return phi, beta * phi - gaps


def _expected_reward(logits, dlogits, active, mu):
    """Sum_i p_i mu_i per round and its derivative, p = softmax over active logits."""
    p = softmax(np.where(active, logits, -np.inf), axis=1)
    reward = np.sum(p * mu, axis=1)
    d_logits = [np.where(active, d, 0.0) for d in dlogits]
    d_reward = [np.sum(mu * p * (d - np.sum(p * d, axis=1, keepdims=True)), axis=1) for d in d_logits]
    return reward, d_reward


def _penalty(constraint, slope, eta1, eta2):
    """Sum_i eta1 c + eta2 |c| over every arm, and its derivative given dc/dparam = slope."""
    value = np.sum(eta1 * constraint + eta2 * np.abs(constraint), axis=1)
    derivative = np.sum((eta1 + eta2 * np.sign(constraint)) * slope, axis=1)
    return value, derivative


def _sampling_terms(means, norms, active, coldness, mu, params):
    phi, index = _masked_index(means, norms, active, params.beta)
    gamma = coldness[:, None]
    reward, (d_beta,) = _expected_reward(gamma * index, [gamma * phi], active, mu)
    # C = |mu - mu_hat| - beta ||x||
    c = np.abs(mu - means) - params.beta * norms
    penalty, d_penalty = _penalty(c, -norms, params.eta1, params.eta2)
    return reward - penalty, np.zeros_like(reward), d_beta - d_penalty


def _identification_terms(means, norms, mu, threshold, params):
    m = params.sharpness_M
    screening = expit((means - params.alpha * norms - threshold) * m)
    margin = means - threshold
    value = np.sum(screening * margin, axis=1)
    d_value = np.sum(screening * (1.0 - screening) * (-norms * m) * margin, axis=1)
    # D = alpha ||x|| - |mu - mu_hat|
    d = params.alpha * norms - np.abs(mu - means)
    penalty, d_penalty = _penalty(d, norms, params.eta1, params.eta2)
    return value - penalty, d_value - d_penalty, np.zeros_like(value)


def _combined_terms(means, norms, active, coldness, mu, threshold, params):
    m = params.sharpness_M
    phi, index = _masked_index(means, norms, active, params.beta)
    gamma = coldness[:, None]
    screening = expit((means - params.alpha * norms - threshold) * m)
    logits = gamma * index * screening
    dl_beta = gamma * phi * screening
    dl_alpha = gamma * index * screening * (1.0 - screening) * (-norms * m)
    reward, (d_alpha, d_beta) = _expected_reward(logits, [dl_alpha, dl_beta], active, mu)

    c = np.abs(mu - means) - params.beta * norms
    c_penalty, c_slope = _penalty(c, -norms, params.eta1, params.eta2)
    d = params.alpha * norms - np.abs(mu - means)
    d_penalty, d_slope = _penalty(d, norms, params.eta1, params.eta2)
    return reward - c_penalty - d_penalty, d_alpha - d_slope, d_beta - c_slope


def round_terms(objective: Objective, buffer, params, threshold: float,
                true_means: Optional[np.ndarray] = None, start: int = 0, stop: Optional[int] = None) -> RoundTerms:
    """Per-round terms of ``objective`` over buffer rows [start, stop).

    Args:
        objective: Which objective
        buffer: TrajectoryBuffer the rows come from
        params: TrainableParams or EvaluationPoint to evaluate at
        threshold: Good-arm threshold xi
        true_means: Per-arm true means; None substitutes each row's ridge means
        start: First row
        stop: One past the last row (defaults to the buffer length)

    Returns:
        RoundTerms with one entry per row
    """
    stop = len(buffer) if stop is None else stop
    means = buffer.means[start:stop]
    norms = buffer.norms[start:stop]
    active = buffer.active[start:stop]
    coldness = buffer.coldness[start:stop]
    mu = means if true_means is None else np.asarray(true_means, dtype=float)[None, :]

    objective = Objective(objective)
    with np.errstate(invalid='ignore'):
        if objective == Objective.SAMPLING:
            values, g_alpha, g_beta = _sampling_terms(means, norms, active, coldness, mu, params)
        elif objective == Objective.IDENTIFICATION:
            values, g_alpha, g_beta = _identification_terms(means, norms, mu, threshold, params)
        else:
            values, g_alpha, g_beta = _combined_terms(means, norms, active, coldness, mu, threshold, params)
    return RoundTerms(values=values, grad_alpha=g_alpha, grad_beta=g_beta)


@dataclass(frozen=True)
class EvaluationPoint:
    """Parameter values an objective is evaluated at; unlike TrainableParams, eta may be 0."""

    alpha: float = 0.0
    beta: float = 0.0
    eta1: float = 0.0
    eta2: float = 0.0
    sharpness_M: float = 1.0


def sampling_objective(buffer, instance, beta: float, eta1: float, eta2: float) -> float:
    """Expected reward of the recomputed policy minus the confidence-width penalty."""
    point = EvaluationPoint(beta=beta, eta1=eta1, eta2=eta2)
    return round_terms(Objective.SAMPLING, buffer, point, instance.threshold, instance.true_means).total()


def identification_objective(buffer, instance, alpha: float, M: float, eta1: float, eta2: float,
                             threshold: Optional[float] = None) -> float:
    """Sigmoid-smoothed identification reward minus the radius penalty."""
    threshold = instance.threshold if threshold is None else threshold
    point = EvaluationPoint(alpha=alpha, sharpness_M=M, eta1=eta1, eta2=eta2)
    return round_terms(Objective.IDENTIFICATION, buffer, point, threshold, instance.true_means).total()


def combined_objective(buffer, instance, alpha: float, beta: float, M: float, eta1: float, eta2: float) -> float:
    """Expected reward under the screened policy minus both penalties."""
    point = EvaluationPoint(alpha=alpha, beta=beta, sharpness_M=M, eta1=eta1, eta2=eta2)
    return round_terms(Objective.COMBINED, buffer, point, instance.threshold, instance.true_means).total()


def gradient(objective: Objective, buffer, instance, params: TrainableParams) -> ParamGradient:
    """Analytic derivative of the offline ``objective`` in alpha and beta."""
    terms = round_terms(objective, buffer, params, instance.threshold, instance.true_means)
    return terms.gradient()


def online_objective(round_values, t: int, horizon: int) -> float:
    """Bootstrapped surrogate (sum_{s<=t} R_s + (T - t) R_t) / T.

    ``round_values`` holds per-round totals, or a (rounds x arms) array that is
    summed over arms first.
    """
    values = np.asarray(round_values, dtype=float)
    if values.ndim == 2:
        values = values.sum(axis=1)
    if not 1 <= t <= min(horizon, len(values)):
        raise ValueError(f"round {t} outside [1, {min(horizon, len(values))}]")
    return float((values[:t].sum() + (horizon - t) * values[t - 1]) / horizon)
