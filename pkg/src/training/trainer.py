import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from src.config import settings
from src.bandit.instance import BanditInstance
from src.algorithms.episode import AlgorithmSpec, EpisodeRunner
from src.metrics.evaluation import cumulative_reward, exploit_score
from src.metrics.trace import RunTrace
from src.training.buffer import TrajectoryBuffer
from src.training.objectives import Objective, ParamGradient, gradient, round_terms
from src.training.params import TrainableParams

logger = logging.getLogger(__name__)

# objectives whose gradients drive each trainable algorithm
TRAINED_OBJECTIVES: Dict[str, Tuple[Objective, ...]] = {
    'DGAI': (Objective.SAMPLING, Objective.IDENTIFICATION),
    'SoftUCBG': (Objective.SAMPLING,),
    'SoftUCB': (Objective.SAMPLING,),
    'DGAI-MAB': (Objective.COMBINED,),
}


class TrainingDivergedError(RuntimeError):
    """alpha or beta left the finite range allowed by the divergence guard."""


def _trained_objectives(algorithm: str) -> Tuple[Objective, ...]:
    if algorithm not in TRAINED_OBJECTIVES:
        raise ValueError(f"algorithm {algorithm!r} has no trainable parameters")
    return TRAINED_OBJECTIVES[algorithm]


def _episode_hyper(extra: Optional[Dict[str, Any]], alpha: float, beta: float, params: TrainableParams) -> Dict[str, Any]:
    hyper = dict(extra or {})
    hyper.update(alpha=alpha, beta=beta, sharpness_M=params.sharpness_M)
    return hyper


def _per_round(g: ParamGradient, horizon: int) -> ParamGradient:
    # ascend objective / T so the step size does not grow with the horizon
    return ParamGradient(alpha=g.alpha / horizon, beta=g.beta / horizon)


def _ascent_step(alpha: float, beta: float, steps: List[ParamGradient], learning_rate: float,
                 limit: float, where: str) -> Tuple[float, float]:
    """One projected gradient ascent step on (alpha, beta)."""
    for g in steps:
        alpha += learning_rate * g.alpha
        beta += learning_rate * g.beta

    for name, value in (('alpha', alpha), ('beta', beta)):
        if not math.isfinite(value) or abs(value) > limit:
            raise TrainingDivergedError(f"{name} diverged to {value} at {where} (limit {limit:g})")
    # negative scales would invert the good/bad tests
    return max(alpha, 0.0), max(beta, 0.0)


@dataclass
class EpochRecord:
    epoch: int
    alpha: float
    beta: float
    exploit_score: float
    cumulative_reward: float


@dataclass
class TrainingResult:
    """Final parameters, per-epoch history and the episode run with the final parameters."""

    alpha: float
    beta: float
    history: List[EpochRecord] = field(default_factory=list)
    trace: Optional[RunTrace] = None


def offline_train(instance: BanditInstance, epochs: int, horizon: int, params: TrainableParams, seed: int,
                  algorithm: str = 'DGAI', delta: float = settings.DELTA, keep_policy: bool = False,
                  divergence_limit: float = settings.DIVERGENCE_LIMIT,
                  hyper: Optional[Dict[str, Any]] = None) -> TrainingResult:
    """Train (alpha, beta) over ``epochs`` training trajectories on the same arm set.

    Each epoch plays all ``horizon`` rounds with every arm kept in the sampling
    pool, so the objectives see the whole trajectory even after the
    identification rule has decided an arm. Every epoch replays the same seed;
    with a zero learning rate all epochs produce the same trajectory. Each
    update ascends the objective divided by the horizon. A final episode with
    the learned parameters and the usual arm removal gives the returned trace.

    Args:
        instance: Arm set, true means known
        epochs: Number of training episodes (>= 1)
        horizon: Rounds per episode
        params: Initial values and optimizer constants
        seed: Seed shared by every epoch
        algorithm: DGAI, SoftUCBG, SoftUCB or DGAI-MAB
        delta: Acceptance error rate of the episodes
        keep_policy: Keep the per-round policy of the final episode
        divergence_limit: Abort once |alpha| or |beta| exceeds this
        hyper: Extra episode knobs (e.g. delta_policy)

    Returns:
        TrainingResult whose trace is the final episode, carrying the epoch
        and parameter logs
    """
    if epochs < 1:
        raise ValueError(f"epochs must be at least 1, got {epochs}")
    objectives = _trained_objectives(algorithm)
    alpha, beta = params.alpha, params.beta
    history: List[EpochRecord] = []
    # (epoch, alpha, beta) after each epoch's update
    params_log: List[Tuple[int, float, float]] = []

    for epoch in range(1, epochs + 1):
        spec = AlgorithmSpec(algorithm, delta=delta,
                             hyper=_episode_hyper(hyper, alpha, beta, params))
        buffer = TrajectoryBuffer(horizon, instance.num_arms, epoch=epoch)
        trace = EpisodeRunner(spec, instance, horizon, seed, buffer=buffer, remove_decided=False).run()
        record = EpochRecord(epoch, alpha, beta, exploit_score(trace, instance), cumulative_reward(trace))
        history.append(record)

        current = params.with_values(alpha, beta)
        steps = [_per_round(gradient(objective, buffer, instance, current), horizon) for objective in objectives]
        alpha, beta = _ascent_step(alpha, beta, steps, params.learning_rate, divergence_limit, f"epoch {epoch}")

        logger.info(f"{algorithm} epoch {epoch}/{epochs}: exploit={record.exploit_score:.4f} "
                    f"reward={record.cumulative_reward:.1f} alpha={alpha:.6g} beta={beta:.6g}")
        params_log.append((epoch, alpha, beta))

    spec = AlgorithmSpec(algorithm, delta=delta, hyper=_episode_hyper(hyper, alpha, beta, params))
    trace = EpisodeRunner(spec, instance, horizon, seed, keep_policy=keep_policy).run()
    trace.epoch_log = [(r.epoch, r.exploit_score, r.cumulative_reward) for r in history]
    trace.params_log = params_log
    return TrainingResult(alpha=alpha, beta=beta, history=history, trace=trace)


class OnlineTrainState:
    """Running sums behind the bootstrapped surrogate.

    Each buffer row's gradient is evaluated once, with the parameters in force
    when its batch is processed, and added to the prefix sums.
    """

    def __init__(self, objectives: Tuple[Objective, ...]):
        self.objectives = objectives
        self.consumed = 0
        self.prefix: Dict[Objective, ParamGradient] = {obj: ParamGradient() for obj in objectives}
        self.updates = 0


def online_train_step(buffer: TrajectoryBuffer, t: int, horizon: int, params: TrainableParams,
                      state: OnlineTrainState, threshold: float,
                      divergence_limit: float = settings.DIVERGENCE_LIMIT) -> Tuple[float, float]:
    """Ascend the bootstrapped surrogate after round ``t``.

    The gradient of (sum_{s<=t} R_s + (T - t) R_t) / T uses ridge means in
    place of the unknown true means.

    Returns:
        Updated (alpha, beta)
    """
    if not 1 <= t <= len(buffer):
        raise ValueError(f"round {t} outside the recorded rounds [1, {len(buffer)}]")

    steps = []
    for objective in state.objectives:
        terms = round_terms(objective, buffer, params, threshold, start=state.consumed, stop=t)
        prefix = state.prefix[objective]
        prefix.alpha += float(terms.grad_alpha.sum())
        prefix.beta += float(terms.grad_beta.sum())
        latest_alpha, latest_beta = terms.grad_alpha[-1], terms.grad_beta[-1]
        steps.append(ParamGradient(
            alpha=(prefix.alpha + (horizon - t) * latest_alpha) / horizon,
            beta=(prefix.beta + (horizon - t) * latest_beta) / horizon,
        ))
    state.consumed = t
    state.updates += 1
    return _ascent_step(params.alpha, params.beta, steps, params.learning_rate, divergence_limit, f"round {t}")


def online_train(instance: BanditInstance, horizon: int, params: TrainableParams, seed: int,
                 algorithm: str = 'DGAI', delta: float = settings.DELTA, keep_policy: bool = False,
                 divergence_limit: float = settings.DIVERGENCE_LIMIT,
                 hyper: Optional[Dict[str, Any]] = None) -> RunTrace:
    """One trajectory with a parameter update every ``params.batch_size`` rounds."""
    objectives = _trained_objectives(algorithm)
    state = OnlineTrainState(objectives)
    current = {'params': params}
    buffer = TrajectoryBuffer(horizon, instance.num_arms, keep_policy=keep_policy)

    def update(runner: EpisodeRunner, t: int):
        if t % params.batch_size:
            return
        alpha, beta = online_train_step(buffer, t, horizon, current['params'], state,
                                        instance.threshold, divergence_limit)
        current['params'] = current['params'].with_values(alpha, beta)
        runner.alpha, runner.beta = alpha, beta
        runner.params_log.append((t, alpha, beta))
        logger.debug(f"{algorithm} online update at round {t}: alpha={alpha:.6g} beta={beta:.6g}")

    spec = AlgorithmSpec(algorithm, delta=delta,
                         hyper=_episode_hyper(hyper, params.alpha, params.beta, params))
    trace = EpisodeRunner(spec, instance, horizon, seed, buffer=buffer, round_hook=update).run()
    logger.info(f"{algorithm} online run (seed {seed}): {state.updates} updates, "
                f"final alpha={trace.alpha:.6g} beta={trace.beta:.6g}")
    return trace


def mab_threshold_train(instance: BanditInstance, horizon: int, params: TrainableParams, seed: int,
                        delta: float = settings.DELTA, keep_policy: bool = False,
                        hyper: Optional[Dict[str, Any]] = None) -> RunTrace:
    """Cumulative-reward run of the screened policy, (alpha, beta) trained jointly online.

    No arm is ever removed; the threshold acts only through the soft screening.
    """
    return online_train(instance, horizon, params, seed, algorithm='DGAI-MAB', delta=delta,
                        keep_policy=keep_policy, hyper=hyper)
