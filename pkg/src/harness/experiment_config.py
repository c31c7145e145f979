import logging
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Mapping, Optional

from dotenv import dotenv_values

from src.config import settings
from src.algorithms.episode import ALGORITHM_RULES
from src.datasets.presets import PRESETS, DatasetPreset, preset, scaled_preset

logger = logging.getLogger(__name__)

# algorithm names accepted by the harness
HARNESS_ALGORITHMS = (
    'HDoC', 'LUCBG', 'APTG', 'TTTS', 'SoftUCBG', 'DGAI-offline', 'DGAI-online',
    'UCB', 'TS', 'SoftUCB', 'DGAI-MAB',
)
ALGORITHM_ALIASES = {'DGAI': 'DGAI-offline'}
# harness names that differ from the episode-level name only by training mode
TRAINING_MODES = {'DGAI-offline': 'DGAI', 'DGAI-online': 'DGAI'}


class ConfigError(ValueError):
    """Invalid experiment configuration."""


def _parse_bool(value: str) -> bool:
    text = str(value).strip().lower()
    if text in ('1', 'true', 'yes', 'on'):
        return True
    if text in ('0', 'false', 'no', 'off'):
        return False
    raise ValueError(f"not a boolean: {value!r}")


def _parse_optional_int(value: str) -> Optional[int]:
    return None if str(value).strip() in ('', 'none', 'None') else int(value)


def _parse_optional_float(value: str) -> Optional[float]:
    return None if str(value).strip() in ('', 'none', 'None') else float(value)


def _parse_list(value) -> List[str]:
    if isinstance(value, (list, tuple)):
        items = value
    else:
        items = str(value).split(',')
    return [item.strip() for item in items if item.strip()]


@dataclass
class ExperimentConfig:
    """Everything one benchmark invocation needs."""

    dataset: str = settings.DATASET
    algorithms: List[str] = field(default_factory=lambda: list(settings.ALGORITHMS))
    horizon: Optional[int] = None
    epochs: int = settings.EPOCHS
    repetitions: int = settings.REPETITIONS
    base_seed: int = settings.BASE_SEED
    instance_seed: int = settings.INSTANCE_SEED
    scale: float = settings.SCALE
    output_dir: str = settings.OUTPUT_DIR
    emit_policy_log: bool = settings.EMIT_POLICY_LOG
    delta: float = settings.DELTA
    delta_policy: Optional[float] = settings.DELTA_POLICY
    jobs: int = settings.JOBS
    series_points: int = settings.SERIES_POINTS
    smooth: int = settings.SMOOTH_WINDOW
    csv_path: str = settings.CSV_PATH
    rating_column: str = settings.RATING_COLUMN
    item_column: str = settings.ITEM_COLUMN
    threshold_percentile: float = settings.THRESHOLD_PERCENTILE
    max_arms: Optional[int] = None
    learning_rate: float = settings.LEARNING_RATE
    eta1: float = settings.ETA1
    eta2: float = settings.ETA2
    sharpness_M: float = settings.SHARPNESS_M
    batch_size: int = settings.BATCH_SIZE
    apt_argmin: bool = settings.APT_ARGMIN
    lucb_include_t: bool = settings.LUCB_INCLUDE_T
    ttts_resample_prob: float = settings.TTTS_RESAMPLE_PROB

    def validate(self) -> 'ExperimentConfig':
        """Normalize algorithm names and check ranges; raises ConfigError."""
        if self.dataset not in PRESETS:
            raise ConfigError(f"unknown dataset {self.dataset!r}; expected one of {sorted(PRESETS)}")
        if not self.algorithms:
            raise ConfigError("no algorithms configured")
        names = []
        for name in self.algorithms:
            name = ALGORITHM_ALIASES.get(name, name)
            if name not in HARNESS_ALGORITHMS:
                raise ConfigError(f"unknown algorithm {name!r}; expected one of {list(HARNESS_ALGORITHMS)}")
            if name not in names:
                names.append(name)
        self.algorithms = names

        checks = [
            (self.repetitions >= 1, f"repetitions must be >= 1, got {self.repetitions}"),
            (0.0 < self.scale <= 1.0, f"scale must lie in (0, 1], got {self.scale}"),
            (self.epochs >= 1, f"epochs must be >= 1, got {self.epochs}"),
            (0.0 < self.delta < 1.0, f"delta must lie in (0, 1), got {self.delta}"),
            (self.delta_policy is None or 0.0 < self.delta_policy < 1.0,
             f"delta_policy must lie in (0, 1), got {self.delta_policy}"),
            (self.jobs >= 1, f"jobs must be >= 1, got {self.jobs}"),
            (self.series_points >= 2, f"series_points must be >= 2, got {self.series_points}"),
            (self.smooth >= 0, f"smooth must be >= 0, got {self.smooth}"),
            (self.horizon is None or self.horizon >= 1, f"horizon must be >= 1, got {self.horizon}"),
            (self.eta1 > 0 and self.eta2 > 0, f"eta1 and eta2 must be positive, got {self.eta1}, {self.eta2}"),
            (self.sharpness_M > 0, f"sharpness_M must be positive, got {self.sharpness_M}"),
            (self.batch_size >= 1, f"batch_size must be >= 1, got {self.batch_size}"),
            (self.learning_rate >= 0, f"learning_rate must be non-negative, got {self.learning_rate}"),
            (0.0 <= self.ttts_resample_prob <= 1.0,
             f"ttts_resample_prob must lie in [0, 1], got {self.ttts_resample_prob}"),
            (0.0 < self.threshold_percentile <= 100.0,
             f"threshold_percentile must lie in (0, 100], got {self.threshold_percentile}"),
        ]
        for ok, message in checks:
            if not ok:
                raise ConfigError(message)
        return self

    def dataset_preset(self) -> DatasetPreset:
        return scaled_preset(preset(self.dataset), self.scale)

    def baseline_hyper(self) -> Dict[str, Any]:
        hyper = {
            'apt_argmin': self.apt_argmin,
            'lucb_include_t': self.lucb_include_t,
            'resample_prob': self.ttts_resample_prob,
        }
        if self.delta_policy is not None:
            hyper['delta_policy'] = self.delta_policy
        return hyper


# config-file key -> (field name, parser)
CONFIG_KEYS: Dict[str, tuple] = {
    'DATASET': ('dataset', str),
    'ALGORITHMS': ('algorithms', _parse_list),
    'HORIZON': ('horizon', _parse_optional_int),
    'EPOCHS': ('epochs', int),
    'REPETITIONS': ('repetitions', int),
    'BASE_SEED': ('base_seed', int),
    'INSTANCE_SEED': ('instance_seed', int),
    'SCALE': ('scale', float),
    'OUTPUT_DIR': ('output_dir', str),
    'EMIT_POLICY_LOG': ('emit_policy_log', _parse_bool),
    'DELTA': ('delta', float),
    'DELTA_POLICY': ('delta_policy', _parse_optional_float),
    'JOBS': ('jobs', int),
    'SERIES_POINTS': ('series_points', int),
    'SMOOTH': ('smooth', int),
    'CSV_PATH': ('csv_path', str),
    'RATING_COLUMN': ('rating_column', str),
    'ITEM_COLUMN': ('item_column', str),
    'THRESHOLD_PERCENTILE': ('threshold_percentile', float),
    'MAX_ARMS': ('max_arms', _parse_optional_int),
    'LEARNING_RATE': ('learning_rate', float),
    'ETA1': ('eta1', float),
    'ETA2': ('eta2', float),
    'SHARPNESS_M': ('sharpness_M', float),
    'BATCH_SIZE': ('batch_size', int),
    'APT_ARGMIN': ('apt_argmin', _parse_bool),
    'LUCB_INCLUDE_T': ('lucb_include_t', _parse_bool),
    'TTTS_RESAMPLE_PROB': ('ttts_resample_prob', float),
}


def _apply(config: ExperimentConfig, values: Mapping[str, Any], source: str) -> ExperimentConfig:
    by_field = {name: (name, parser) for name, parser in CONFIG_KEYS.values()}
    updates = {}
    for key, raw in values.items():
        if key in CONFIG_KEYS:
            name, parser = CONFIG_KEYS[key]
        elif key in by_field:
            name, parser = by_field[key]
        else:
            raise ConfigError(f"{source}: unknown key {key!r}")
        if raw is None:
            continue
        try:
            updates[name] = parser(raw) if parser is not None and isinstance(raw, str) else raw
        except (TypeError, ValueError) as e:
            raise ConfigError(f"{source}: bad value for {key}: {e}")
    return replace(config, **updates)


def load_config(path: Optional[str] = None, overrides: Optional[Mapping[str, Any]] = None) -> ExperimentConfig:
    """Build a validated config: settings defaults < config file < overrides.

    Args:
        path: Optional flat KEY=VALUE file (same syntax as .env)
        overrides: Field-name or KEY mapping, typically from the command line;
            None values are ignored

    Returns:
        Validated ExperimentConfig
    """
    config = ExperimentConfig()
    if path:
        try:
            with open(path, encoding='utf-8') as f:
                values = dotenv_values(stream=f)
        except OSError as e:
            raise ConfigError(f"cannot read config file {path}: {e}")
        config = _apply(config, values, path)
        logger.info(f"Loaded {len(values)} settings from {path}")
    if overrides:
        config = _apply(config, {k: v for k, v in overrides.items() if v is not None}, 'command line')
    return config.validate()


def core_algorithm(algorithm: str) -> str:
    """Episode-level algorithm behind a harness name."""
    return TRAINING_MODES.get(algorithm, algorithm)


def is_identifying(algorithm: str) -> bool:
    """True for algorithms that output good arms."""
    return ALGORITHM_RULES[core_algorithm(algorithm)][1] != 'none'
