import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Optional, Tuple

import numpy as np
from scipy.special import expit

from src.config import settings
from src.bandit.instance import BanditInstance, sample_reward
from src.bandit.linear_state import (
    LinearState,
    empirical_mean,
    empirical_means,
    feature_norm,
    feature_norms,
    ridge_mean,
    ridge_means,
    update_linear_state,
)
from src.policy.ucb_index import coldness, compute_index, sample_arm, softmax_policy
from src.algorithms.confidence_bounds import (
    Decision,
    aptg_index,
    apt_canonical_index,
    classify,
    dgai_identify,
    hdoc_ucb,
    lucbg_ucb,
    tt_ts_select,
    union_identification_bound,
)
from src.algorithms.ledger import ArmStatus, IdentificationLedger
from src.metrics.trace import RunTrace
from src.training.buffer import TrajectoryBuffer
from src.training.objectives import combined_policy

logger = logging.getLogger(__name__)

# name -> (sampling rule, identification rule)
ALGORITHM_RULES: Dict[str, Tuple[str, str]] = {
    'HDoC': ('hdoc', 'union'),
    'LUCBG': ('lucbg', 'union'),
    'APTG': ('aptg', 'union'),
    'TTTS': ('ttts', 'union'),
    'SoftUCBG': ('softmax', 'union'),
    'DGAI': ('softmax', 'dgai'),
    # cumulative-reward baselines: no identification, full horizon
    'UCB': ('hdoc', 'none'),
    'TS': ('thompson', 'none'),
    'SoftUCB': ('softmax', 'none'),
    'DGAI-MAB': ('combined', 'none'),
}

SOFTMAX_RULES = ('softmax', 'combined')


@dataclass
class AlgorithmSpec:
    """Algorithm name, acceptance error rate and algorithm-specific knobs.

    Recognised ``hyper`` keys: alpha, beta, delta_policy, sharpness_M,
    ts_prior, resample_prob, max_resamples, apt_argmin, lucb_include_t.
    """

    name: str
    delta: float = settings.DELTA
    hyper: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.name not in ALGORITHM_RULES:
            raise ValueError(f"unknown algorithm {self.name!r}; expected one of {sorted(ALGORITHM_RULES)}")
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")

    @property
    def sampling(self) -> str:
        return ALGORITHM_RULES[self.name][0]

    @property
    def identification(self) -> str:
        return ALGORITHM_RULES[self.name][1]

    def get(self, key: str, default=None):
        return self.hyper.get(key, default)

    @property
    def delta_policy(self) -> float:
        value = self.hyper.get('delta_policy')
        if value is None:
            value = settings.DELTA_POLICY if settings.DELTA_POLICY is not None else self.delta
        return value


class EpisodeRunner:
    """Runs one GAI episode: pull each arm once, then sample / update / identify."""

    def __init__(self, spec: AlgorithmSpec, instance: BanditInstance, horizon: int, seed: int,
                 buffer: Optional[TrajectoryBuffer] = None, keep_policy: bool = False,
                 round_hook: Optional[Callable[['EpisodeRunner', int], None]] = None,
                 remove_decided: bool = True):
        """Initialize the runner.

        Args:
            spec: Algorithm to run
            instance: Arm set
            horizon: Maximum number of rounds T
            seed: Seed of the reward and sampling generator
            buffer: Optional trajectory buffer to record every round into
            keep_policy: Keep the per-round policy (softmax rules only)
            round_hook: Called after each round with the runner and the round index
            remove_decided: Drop identified arms from sampling and stop once none
                is left. False keeps every arm in play for all ``horizon`` rounds
                while the ledger still records each first decision (training
                trajectories)
        """
        if horizon < instance.num_arms:
            raise ValueError(f"horizon ({horizon}) must be at least the number of arms ({instance.num_arms})")
        self.spec = spec
        self.instance = instance
        self.horizon = horizon
        self.seed = seed
        self.round_hook = round_hook
        self.remove_decided = remove_decided

        self.alpha = float(spec.get('alpha', settings.ALPHA_INIT))
        self.beta = float(spec.get('beta', settings.BETA_INIT))
        self.sharpness = float(spec.get('sharpness_M', settings.SHARPNESS_M))
        self.delta_policy = spec.delta_policy

        if keep_policy and buffer is None and spec.sampling in SOFTMAX_RULES:
            buffer = TrajectoryBuffer(horizon, instance.num_arms, keep_policy=True)
        self.buffer = buffer
        self.params_log = []

        self.rng = np.random.default_rng(seed)
        self.state = LinearState.for_instance(instance)
        self.ledger = IdentificationLedger(instance.num_arms)
        self._features = instance.arm_features

        prior = spec.get('ts_prior', (1.0, 1.0))
        self._ts_prior = (float(prior[0]), float(prior[1]))
        self._ts_success = np.zeros(instance.num_arms)

        self._arms_log = np.zeros(horizon, dtype=np.int64)
        self._rewards_log = np.zeros(horizon)
        self.round = 0

    # -- estimates -------------------------------------------------------------

    def ridge_snapshot(self) -> Tuple[np.ndarray, np.ndarray]:
        """Ridge means and feature norms of every arm under the current state."""
        return ridge_means(self.state, self._features), feature_norms(self.state, self._features)

    # -- sampling rules --------------------------------------------------------

    def _select_hdoc(self, active):
        means = empirical_means(self.state, active)
        scores = hdoc_ucb(means, self.state.pull_counts[active], self.state.round)
        return int(active[np.argmax(scores)])

    def _select_lucbg(self, active):
        means = empirical_means(self.state, active)
        scores = lucbg_ucb(means, self.state.pull_counts[active], self.instance.num_arms, self.spec.delta,
                           round_index=self.state.round,
                           include_round=self.spec.get('lucb_include_t', settings.LUCB_INCLUDE_T))
        return int(active[np.argmax(scores)])

    def _select_aptg(self, active):
        means = empirical_means(self.state, active)
        pulls = self.state.pull_counts[active]
        if self.spec.get('apt_argmin', settings.APT_ARGMIN):
            return int(active[np.argmin(apt_canonical_index(means, pulls, self.instance.threshold))])
        return int(active[np.argmax(aptg_index(means, pulls, self.instance.threshold))])

    def _beta_posteriors(self, active):
        a0, b0 = self._ts_prior
        successes = a0 + self._ts_success[active]
        failures = b0 + self.state.pull_counts[active] - self._ts_success[active]
        return successes, failures

    def _select_ttts(self, active):
        successes, failures = self._beta_posteriors(active)
        position = tt_ts_select(
            successes, failures,
            resample_prob=self.spec.get('resample_prob', settings.TTTS_RESAMPLE_PROB),
            rng=self.rng,
            max_resamples=self.spec.get('max_resamples', settings.TTTS_MAX_RESAMPLES),
        )
        return int(active[position])

    def _select_thompson(self, active):
        successes, failures = self._beta_posteriors(active)
        return int(active[np.argmax(self.rng.beta(successes, failures))])

    def _softmax_policy(self, active, means, norms):
        snapshot = compute_index(means[active], norms[active], self.beta)
        gamma = coldness(snapshot, self.delta_policy)
        if self.spec.sampling == 'combined':
            screening = expit((means[active] - self.alpha * norms[active] - self.instance.threshold) * self.sharpness)
            policy = combined_policy(snapshot.index, screening, gamma)
        else:
            policy = softmax_policy(snapshot.index, gamma)
        return policy, gamma

    # -- identification --------------------------------------------------------

    def _identify(self, arm: int):
        rule = self.spec.identification
        if rule == 'none' or not self.ledger.is_active(arm):
            return
        if rule == 'union':
            pulls = self.state.pull_counts[arm]
            radius = union_identification_bound(pulls, self.instance.num_arms, self.spec.delta)
            decision = classify(empirical_mean(self.state, arm), float(radius), self.instance.threshold)
        else:
            x = self._features[arm]
            decision = dgai_identify(ridge_mean(self.state, x), self.alpha, feature_norm(self.state, x),
                                     self.instance.threshold)

        if decision == Decision.GOOD:
            self.ledger.mark_good(arm, self.round)
        elif decision == Decision.BAD:
            self.ledger.mark_bad(arm, self.round)

    # -- main loop -------------------------------------------------------------

    def _play(self, arm: int, sampled: bool, gamma: float = 0.0, policy=None, snapshot=None):
        self.round += 1
        reward = sample_reward(self.instance, arm, self.rng, self.round).value

        if self.buffer is not None:
            means, norms = snapshot if snapshot is not None else self.ridge_snapshot()
            active_mask = self._sampling_pool_mask()
            self.buffer.append(means, norms, active_mask, gamma, sampled, arm, reward, policy)

        update_linear_state(self.state, self._features[arm], arm, reward)
        self._ts_success[arm] += min(max(reward, 0.0), 1.0)
        self._arms_log[self.round - 1] = arm
        self._rewards_log[self.round - 1] = reward

        self._identify(arm)
        if self.round_hook is not None:
            self.round_hook(self, self.round)

    def _sampling_pool_mask(self) -> np.ndarray:
        if self.remove_decided:
            return self.ledger.status == ArmStatus.ACTIVE
        return np.ones(self.instance.num_arms, dtype=bool)

    def _select(self):
        active = np.flatnonzero(self._sampling_pool_mask())
        rule = self.spec.sampling
        if rule in SOFTMAX_RULES:
            means, norms = self.ridge_snapshot()
            policy, gamma = self._softmax_policy(active, means, norms)
            arm = int(active[sample_arm(policy, self.rng)])
            full_policy = np.zeros(self.instance.num_arms)
            full_policy[active] = policy
            return arm, gamma, full_policy, (means, norms)

        selectors = {
            'hdoc': self._select_hdoc,
            'lucbg': self._select_lucbg,
            'aptg': self._select_aptg,
            'ttts': self._select_ttts,
            'thompson': self._select_thompson,
        }
        return selectors[rule](active), 0.0, None, None

    def run(self) -> RunTrace:
        # Pull each arm once
        for arm in range(self.instance.num_arms):
            self._play(arm, sampled=False)

        while self.round < self.horizon and (self.ledger.num_active > 0 or not self.remove_decided):
            arm, gamma, policy, snapshot = self._select()
            self._play(arm, sampled=True, gamma=gamma, policy=policy, snapshot=snapshot)

        self.ledger.finalize(self.horizon)
        logger.debug(f"{self.spec.name} episode (seed {self.seed}) stopped at round {self.ledger.stop_round}, "
                     f"{self.ledger.num_good_output} good outputs")

        return RunTrace(
            arms=self._arms_log[:self.round].copy(),
            rewards=self._rewards_log[:self.round].copy(),
            ledger=self.ledger,
            horizon=self.horizon,
            algorithm=self.spec.name,
            seed=self.seed,
            policy_log=None if self.buffer is None else self.buffer.policy,
            params_log=list(self.params_log),
            alpha=self.alpha,
            beta=self.beta,
        )


def run_gai_episode(spec: AlgorithmSpec, instance: BanditInstance, horizon: int, seed: int,
                    keep_policy: bool = False) -> RunTrace:
    """Run one episode of ``spec`` on ``instance``."""
    return EpisodeRunner(spec, instance, horizon, seed, keep_policy=keep_policy).run()
