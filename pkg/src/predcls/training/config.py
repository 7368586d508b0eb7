"""Training recipe configuration."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Tuple

from ..errors import ConfigError
from ..model.losses import LossWeights
from ..model.network import BRANCH_MODES
from ..model.sla import ATTENTION_MODES


@dataclass(frozen=True)
class TrainConfig:
    """Optimizer recipe plus the architecture switches the run trains with.

    Defaults follow the reference recipe: 10 epochs, batch size 32, Adam
    at 0.002 with the rate divided by 10 after the 5th and 9th epoch, and
    loss weights (1.5, 1, 1).
    """

    epochs: int = 10
    batch_size: int = 32
    base_lr: float = 0.002
    lr_drop_epochs: Tuple[int, ...] = (5, 9)
    lr_drop_factor: float = 10.0
    seed: int = 0
    attention_mode: str = "SLA"
    branch_mode: str = "both"
    deep_supervision: bool = True
    loss_weights: LossWeights = field(default_factory=LossWeights)
    val_fraction: float = 0.1
    adam_betas: Tuple[float, float] = (0.9, 0.999)
    adam_eps: float = 1e-8

    def __post_init__(self) -> None:
        if self.epochs < 0:
            raise ConfigError(f"epochs must be >= 0, got {self.epochs}")
        if self.batch_size < 1:
            raise ConfigError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.base_lr <= 0 or self.lr_drop_factor <= 0:
            raise ConfigError("base_lr and lr_drop_factor must be positive")
        for drop in self.lr_drop_epochs:
            if drop < 1 or (self.epochs > 0 and drop > self.epochs):
                raise ConfigError(
                    f"lr drop epoch {drop} outside [1, {self.epochs}]"
                )
        if self.attention_mode not in ATTENTION_MODES:
            raise ConfigError(f"attention_mode must be one of {ATTENTION_MODES}")
        if self.branch_mode not in BRANCH_MODES:
            raise ConfigError(f"branch_mode must be one of {BRANCH_MODES}")
        if not 0.0 <= self.val_fraction < 1.0:
            raise ConfigError("val_fraction must lie in [0, 1)")


def lr_at_epoch(config: TrainConfig, epoch: int) -> float:
    """Piecewise-constant schedule: the base rate divided by the drop factor
    once for every configured drop epoch already passed."""
    if not 1 <= epoch <= config.epochs:
        raise ConfigError(f"epoch {epoch} outside [1, {config.epochs}]")
    drops = sum(1 for d in config.lr_drop_epochs if epoch > d)
    return config.base_lr / (config.lr_drop_factor**drops)
