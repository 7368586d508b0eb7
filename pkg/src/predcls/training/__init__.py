"""Training recipe, loop and checkpoint container."""

from .checkpoint import (
    CHECKPOINT_VERSION,
    CheckpointPayload,
    load_checkpoint,
    save_checkpoint,
)
from .config import TrainConfig, lr_at_epoch
from .loop import TrainResult, derive_model_config, train

__all__ = [
    "CHECKPOINT_VERSION",
    "CheckpointPayload",
    "TrainConfig",
    "TrainResult",
    "derive_model_config",
    "load_checkpoint",
    "lr_at_epoch",
    "save_checkpoint",
    "train",
]
