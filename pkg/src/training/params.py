from dataclasses import dataclass, replace

from src.config import settings


@dataclass
class TrainableParams:
    """Learned scales plus the optimizer and penalty constants."""

    alpha: float = settings.ALPHA_INIT
    beta: float = settings.BETA_INIT
    learning_rate: float = settings.LEARNING_RATE
    eta1: float = settings.ETA1
    eta2: float = settings.ETA2
    sharpness_M: float = settings.SHARPNESS_M
    batch_size: int = settings.BATCH_SIZE

    def __post_init__(self):
        if self.eta1 <= 0 or self.eta2 <= 0:
            raise ValueError(f"eta1 and eta2 must be positive, got {self.eta1}, {self.eta2}")
        if self.sharpness_M <= 0:
            raise ValueError(f"sharpness_M must be positive, got {self.sharpness_M}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be at least 1, got {self.batch_size}")
        if self.learning_rate < 0:
            raise ValueError(f"learning_rate must be non-negative, got {self.learning_rate}")

    def with_values(self, alpha: float, beta: float) -> 'TrainableParams':
        return replace(self, alpha=alpha, beta=beta)
