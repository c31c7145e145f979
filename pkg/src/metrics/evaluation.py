"""
Evaluation of finished runs against the simulator's true means.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence

import numpy as np

from src.bandit.instance import BanditInstance
from src.metrics.trace import RunTrace

logger = logging.getLogger(__name__)


def exploit_score(trace: RunTrace, instance: BanditInstance, horizon: Optional[int] = None) -> float:
    """Sum over Good outputs of (T - t_i)(mu_i - xi).

    Arms never output as Good contribute 0; wrong Good outputs contribute
    their negative term.
    """
    horizon = trace.horizon if horizon is None else horizon
    score = 0.0
    for arm, round_index in trace.ledger.outputs_in_order:
        score += (horizon - round_index) * (instance.true_means[arm] - instance.threshold)
    return float(score)


def cumulative_reward(trace: RunTrace) -> float:
    return float(np.sum(trace.rewards)) if len(trace.rewards) else 0.0


def false_good_outputs(trace: RunTrace, instance: BanditInstance) -> int:
    """Number of arms output as Good whose true mean is below the threshold."""
    good = instance.good_set
    return sum(1 for arm in trace.ledger.good_outputs if arm not in good)


@dataclass
class PacError:
    """Empirical rates of the two PAC failure events; None where the event cannot apply."""

    rate_bad_as_good: Optional[float]
    rate_overcount: Optional[float]
    num_traces: int

    @property
    def applicable_rate(self) -> float:
        return self.rate_bad_as_good if self.rate_bad_as_good is not None else self.rate_overcount


def pac_error(traces: Sequence[RunTrace], instance: BanditInstance, lam: int = 1) -> PacError:
    """Fraction of traces violating the (lam, delta)-PAC requirement.

    With m >= lam good arms a trace fails when it outputs fewer than lam arms
    or a bad arm among its first lam outputs. With m < lam it fails when it
    claims lam or more good arms.
    """
    if not traces:
        raise ValueError("pac_error needs at least one trace")
    if lam < 1:
        raise ValueError(f"lambda must be at least 1, got {lam}")

    good = instance.good_set
    if instance.num_good >= lam:
        failures = 0
        for trace in traces:
            outputs = trace.ledger.good_outputs
            if len(outputs) < lam or any(arm not in good for arm in outputs[:lam]):
                failures += 1
        return PacError(rate_bad_as_good=failures / len(traces), rate_overcount=None, num_traces=len(traces))

    overcounts = sum(1 for trace in traces if trace.ledger.num_good_output >= lam)
    return PacError(rate_bad_as_good=None, rate_overcount=overcounts / len(traces), num_traces=len(traces))


@dataclass
class Summary:
    mean: float
    median: float
    max: float
    count: int

    @classmethod
    def of(cls, values) -> 'Summary':
        values = np.asarray(values, dtype=float)
        return cls(mean=float(values.mean()), median=float(np.median(values)), max=float(values.max()),
                   count=int(values.size))


@dataclass
class StoppingStats:
    """tau_lambda summaries keyed by lambda (absent when no trace reached it) and tau_stop."""

    tau_lambda: Dict[int, Summary] = field(default_factory=dict)
    tau_stop: Optional[Summary] = None
    censored: int = 0


def tau_lambda(trace: RunTrace, lam: int) -> Optional[int]:
    """Round of the lam-th Good output, None if there was none."""
    outputs = trace.ledger.outputs_in_order
    return outputs[lam - 1][1] if len(outputs) >= lam else None


def stopping_stats(traces: Sequence[RunTrace]) -> StoppingStats:
    """Empirical distributions of tau_lambda and tau_stop.

    Censored traces (horizon reached with arms left) report tau_stop = T.
    """
    stats = StoppingStats()
    if not traces:
        return stats

    max_outputs = max(trace.ledger.num_good_output for trace in traces)
    for lam in range(1, max_outputs + 1):
        rounds = [tau_lambda(trace, lam) for trace in traces]
        reached = [r for r in rounds if r is not None]
        if reached:
            stats.tau_lambda[lam] = Summary.of(reached)

    stops = [trace.ledger.stop_round if trace.ledger.stop_round is not None else trace.horizon for trace in traces]
    stats.tau_stop = Summary.of(stops)
    stats.censored = sum(1 for trace in traces if trace.ledger.censored)
    return stats
