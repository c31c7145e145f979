"""
Benchmark orchestration: build the instance once, run every
(algorithm, repetition) pair, then reduce and write the results bundle.
"""

import logging
import traceback
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
import pandas as pd

from src.bandit.instance import BanditInstance
from src.algorithms.confidence_bounds import union_identification_bound
from src.algorithms.episode import ALGORITHM_RULES, AlgorithmSpec, run_gai_episode
from src.datasets.presets import DatasetSource, build_instance
from src.harness.experiment_config import ConfigError, ExperimentConfig, core_algorithm, is_identifying
from src.harness.plot_series import emit_plot_series
from src.metrics.evaluation import (
    StoppingStats,
    cumulative_reward,
    exploit_score,
    false_good_outputs,
    pac_error,
    stopping_stats,
)
from src.metrics.trace import RunTrace
from src.reporter.csv_reporter import AGGREGATE_COLUMNS, RUNS_COLUMNS, SERIES_RAW_COLUMNS, CsvReporter
from src.scheduler.run_scheduler import RunScheduler
from src.training.buffer import BufferTooLargeError, check_buffer_size
from src.training.params import TrainableParams
from src.training.trainer import mab_threshold_train, offline_train, online_train

logger = logging.getLogger(__name__)

OFFLINE_TRAINED = ('SoftUCBG', 'SoftUCB', 'DGAI-offline')
# algorithms that record a full trajectory buffer
BUFFERED = OFFLINE_TRAINED + ('DGAI-online', 'DGAI-MAB')

EXIT_OK = 0
EXIT_CONFIG_ERROR = 2
EXIT_ALL_FAILED = 3


@dataclass
class RunTask:
    run_id: int
    algorithm: str
    repetition: int
    seed: int
    horizon: int
    dataset: str
    instance: BanditInstance
    config: ExperimentConfig


@dataclass
class RunOutcome:
    run_id: int
    algorithm: str
    seed: int
    horizon: int
    dataset: str
    trace: Optional[RunTrace] = None
    # (metric, epoch_or_round, value)
    series: List[Tuple[str, int, float]] = field(default_factory=list)
    error: Optional[str] = None

    @property
    def failed(self) -> bool:
        return self.trace is None


@dataclass
class ExperimentResult:
    output_dir: str
    n_runs: int
    n_failed: int
    exit_code: int
    aggregate: Optional[pd.DataFrame] = None


def _training_params(config: ExperimentConfig) -> TrainableParams:
    return TrainableParams(learning_rate=config.learning_rate, eta1=config.eta1, eta2=config.eta2,
                           sharpness_M=config.sharpness_M, batch_size=config.batch_size)


def _run_algorithm(task: RunTask) -> RunTrace:
    config = task.config
    keep_policy = config.emit_policy_log
    hyper = config.baseline_hyper()
    name = task.algorithm

    if name in OFFLINE_TRAINED:
        return offline_train(task.instance, config.epochs, task.horizon, _training_params(config), task.seed,
                             algorithm=core_algorithm(name), delta=config.delta, keep_policy=keep_policy,
                             hyper=hyper).trace
    if name == 'DGAI-online':
        return online_train(task.instance, task.horizon, _training_params(config), task.seed,
                            algorithm='DGAI', delta=config.delta, keep_policy=keep_policy, hyper=hyper)
    if name == 'DGAI-MAB':
        return mab_threshold_train(task.instance, task.horizon, _training_params(config), task.seed,
                                   delta=config.delta, keep_policy=keep_policy, hyper=hyper)

    spec = AlgorithmSpec(name, delta=config.delta, hyper=hyper)
    return run_gai_episode(spec, task.instance, task.horizon, task.seed, keep_policy=keep_policy)


def series_rounds(num_arms: int, horizon: int, points: int) -> np.ndarray:
    """Evenly spaced checkpoint rounds from the end of the initial pulls to T."""
    start = min(num_arms, horizon)
    return np.unique(np.round(np.linspace(start, horizon, points)).astype(np.int64))


def collect_series(trace: RunTrace, instance: BanditInstance, algorithm: str, delta: float,
                   points: int) -> List[Tuple[str, int, float]]:
    """Per-run learning curves: epoch logs, parameter logs and round checkpoints."""
    rows: List[Tuple[str, int, float]] = []
    for epoch, exploit, _ in trace.epoch_log:
        rows.append(('exploit_epoch', int(epoch), float(exploit)))
    for x, alpha, beta in trace.params_log:
        rows.append(('alpha', int(x), float(alpha)))
        rows.append(('beta', int(x), float(beta)))

    checkpoints = series_rounds(instance.num_arms, trace.horizon, points)

    # exploit score earned by each checkpoint
    outputs = trace.ledger.outputs_in_order
    out_rounds = np.array([r for _, r in outputs], dtype=np.int64)
    gains = np.array([(trace.horizon - r) * (instance.true_means[a] - instance.threshold) for a, r in outputs])
    earned = np.concatenate([[0.0], np.cumsum(gains)])
    exploit_at = earned[np.searchsorted(out_rounds, checkpoints, side='right')]

    rewards = np.cumsum(trace.rewards) if trace.num_pulls else np.zeros(1)
    reward_at = rewards[np.minimum(checkpoints, max(trace.num_pulls, 1)) - 1]

    for t, exploit, reward in zip(checkpoints, exploit_at, reward_at):
        rows.append(('exploit_round', int(t), float(exploit)))
        rows.append(('cum_reward_round', int(t), float(reward)))

    rows.extend(_radius_series(trace, instance, algorithm, delta, checkpoints))
    return rows


def _radius_series(trace: RunTrace, instance: BanditInstance, algorithm: str, delta: float,
                   checkpoints: np.ndarray) -> List[Tuple[str, int, float]]:
    """Identification radius of the best arm at each checkpoint, from its pull count."""
    if not is_identifying(algorithm):
        return []
    if not instance.is_one_hot:
        logger.debug(f"radius series skipped for {algorithm}: arms are not one-hot")
        return []

    best = instance.best_arm
    pull_rounds = np.flatnonzero(trace.arms == best) + 1
    pulls = np.searchsorted(pull_rounds, checkpoints, side='right')
    keep = pulls > 0
    pulls = pulls[keep].astype(float)
    if ALGORITHM_RULES[core_algorithm(algorithm)][1] == 'dgai':
        radius = (trace.alpha or 0.0) / np.sqrt(pulls + 1.0)
    else:
        radius = union_identification_bound(pulls, instance.num_arms, delta)
    return [('radius_round', int(t), float(r)) for t, r in zip(checkpoints[keep], radius)]


def execute_run(task: RunTask) -> RunOutcome:
    """Run one repetition; failures are logged and returned, never raised."""
    outcome = RunOutcome(task.run_id, task.algorithm, task.seed, task.horizon, task.dataset)
    try:
        trace = _run_algorithm(task)
    except Exception as e:
        logger.error(f"Run {task.run_id} ({task.algorithm}, seed {task.seed}) failed: {str(e)}")
        logger.error(traceback.format_exc())
        outcome.error = str(e)
        return outcome

    trace.algorithm = task.algorithm
    if not task.config.emit_policy_log:
        trace.policy_log = None
    outcome.trace = trace
    outcome.series = collect_series(trace, task.instance, task.algorithm, task.config.delta,
                                    task.config.series_points)
    logger.info(f"Run {task.run_id} ({task.algorithm}, seed {task.seed}) done: "
                f"{trace.ledger.num_good_output} good outputs, stop at {trace.ledger.stop_round}")
    return outcome


def runs_frame(outcomes: List[RunOutcome], instance: BanditInstance) -> pd.DataFrame:
    rows = []
    for outcome in outcomes:
        row = {'run_id': outcome.run_id, 'algorithm': outcome.algorithm, 'dataset': outcome.dataset,
               'seed': outcome.seed, 'T': outcome.horizon}
        if outcome.failed:
            row.update(exploit_score=np.nan, cum_reward=np.nan, tau_stop=np.nan,
                       n_good_output=np.nan, n_false_good=np.nan)
        else:
            trace = outcome.trace
            row.update(
                exploit_score=exploit_score(trace, instance),
                cum_reward=cumulative_reward(trace),
                tau_stop=trace.ledger.stop_round,
                n_good_output=trace.ledger.num_good_output,
                n_false_good=false_good_outputs(trace, instance),
            )
        rows.append(row)
    return pd.DataFrame(rows, columns=RUNS_COLUMNS)


def _log_stopping(algorithm: str, stats: StoppingStats):
    first = stats.tau_lambda.get(1)
    first_text = f"tau_1 mean={first.mean:.1f} median={first.median:.0f} ({first.count} runs)" if first else "no good output"
    logger.info(f"{algorithm} stopping: {first_text}, tau_stop mean={stats.tau_stop.mean:.1f}, "
                f"{stats.censored} censored")


def aggregate_frame(runs: pd.DataFrame, outcomes: List[RunOutcome], instance: BanditInstance,
                    algorithms: List[str]) -> pd.DataFrame:
    """Mean and sample SD over the successful repetitions of each algorithm."""
    rows = []
    for algorithm in algorithms:
        group = runs[runs['algorithm'] == algorithm]
        ok = group.dropna(subset=['exploit_score'])
        traces = [o.trace for o in outcomes if o.algorithm == algorithm and not o.failed]
        pac = np.nan
        if traces and is_identifying(algorithm):
            pac = pac_error(traces, instance, lam=1).applicable_rate
            _log_stopping(algorithm, stopping_stats(traces))
        rows.append({
            'algorithm': algorithm,
            'dataset': group['dataset'].iloc[0] if len(group) else '',
            'n_runs': len(group),
            'n_failed': len(group) - len(ok),
            'exploit_score_mean': ok['exploit_score'].mean(),
            'exploit_score_sd': ok['exploit_score'].std(),
            'cum_reward_mean': ok['cum_reward'].mean(),
            'cum_reward_sd': ok['cum_reward'].std(),
            'tau_stop_mean': ok['tau_stop'].mean(),
            'tau_stop_sd': ok['tau_stop'].std(),
            'false_good_rate': (ok['n_false_good'] > 0).mean() if len(ok) else np.nan,
            'pac_error': pac,
        })
    return pd.DataFrame(rows, columns=AGGREGATE_COLUMNS)


def series_frame(outcomes: List[RunOutcome]) -> pd.DataFrame:
    rows = [(o.algorithm, o.run_id, metric, x, value) for o in outcomes for metric, x, value in o.series]
    return pd.DataFrame(rows, columns=SERIES_RAW_COLUMNS)


def prepare_instance(config: ExperimentConfig) -> Tuple[BanditInstance, int]:
    """The shared arm set and horizon of an experiment."""
    dataset = config.dataset_preset()
    max_arms = config.max_arms
    if max_arms is None and dataset.source == DatasetSource.CSV_PATH and config.scale < 1.0:
        max_arms = dataset.arms
    try:
        instance = build_instance(dataset, config.instance_seed, csv_path=config.csv_path,
                                  rating_column=config.rating_column, item_column=config.item_column,
                                  threshold_percentile=config.threshold_percentile, max_arms=max_arms)
    except ValueError as e:
        raise ConfigError(f"cannot build dataset {config.dataset}: {e}")

    horizon = config.horizon or dataset.horizon
    if horizon < instance.num_arms:
        raise ConfigError(f"horizon {horizon} is shorter than the {instance.num_arms} initial pulls")
    if config.emit_policy_log or any(name in BUFFERED for name in config.algorithms):
        try:
            check_buffer_size(horizon, instance.num_arms, keep_policy=config.emit_policy_log)
        except BufferTooLargeError as e:
            raise ConfigError(str(e))
    return instance, horizon


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Run every (algorithm, repetition) pair and write the results bundle.

    Run seeds are base_seed + r; the instance comes from instance_seed and is
    shared by all runs.
    """
    instance, horizon = prepare_instance(config)
    try:
        reporter = CsvReporter(config.output_dir)
    except OSError as e:
        raise ConfigError(f"cannot create output directory {config.output_dir}: {e}")
    logger.info(f"Dataset {config.dataset}: K={instance.num_arms}, T={horizon}, xi={instance.threshold:.6g}, "
                f"{instance.num_good} good arms")

    tasks = []
    for algorithm in config.algorithms:
        for r in range(config.repetitions):
            tasks.append(RunTask(len(tasks), algorithm, r, config.base_seed + r, horizon, config.dataset,
                                 instance, config))

    outcomes = RunScheduler(config.jobs).run_all(tasks, execute_run)
    outcomes = sorted(outcomes, key=lambda o: o.run_id)

    runs = runs_frame(outcomes, instance)
    aggregate = aggregate_frame(runs, outcomes, instance, config.algorithms)
    reporter.write_runs(runs)
    reporter.write_aggregate(aggregate)
    reporter.write_series_raw(series_frame(outcomes))
    if config.emit_policy_log:
        for outcome in outcomes:
            if not outcome.failed and outcome.trace.policy_log is not None:
                reporter.write_policy(outcome.run_id, outcome.trace.policy_log)
    emit_plot_series(config.output_dir, smooth=config.smooth)
    reporter.send_summary(aggregate)

    n_failed = sum(1 for o in outcomes if o.failed)
    exit_code = EXIT_OK if n_failed < len(outcomes) else EXIT_ALL_FAILED
    if n_failed:
        logger.warning(f"{n_failed}/{len(outcomes)} runs failed")
    return ExperimentResult(config.output_dir, len(outcomes), n_failed, exit_code, aggregate)
