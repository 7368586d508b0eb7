"""Model checkpoints: a versioned ``.npz`` of named parameter arrays plus config.

Layout: one array ``param/<state_dict_name>`` per parameter, and a
``__meta__`` JSON string holding the format version, parameter dtype, the
model config, the training recipe and the data provisioning config.
Arrays are stored raw, so save -> load -> forward is bit-exact.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np
import torch

from ..errors import ConfigError
from ..model.losses import LossWeights
from ..model.network import ModelConfig, PairPredicateNet
from ..provision import DataConfig
from .config import TrainConfig

CHECKPOINT_VERSION = 1

_DTYPES = {"float32": torch.float32, "float64": torch.float64}


@dataclass
class CheckpointPayload:
    model: PairPredicateNet
    model_config: ModelConfig
    train_config: Optional[TrainConfig]
    data_config: Optional[DataConfig]


def save_checkpoint(
    path: str,
    model: PairPredicateNet,
    train_config: Optional[TrainConfig] = None,
    data_config: Optional[DataConfig] = None,
) -> None:
    state = model.state_dict()
    dtype = str(next(iter(state.values())).dtype).removeprefix("torch.")
    meta = {
        "version": CHECKPOINT_VERSION,
        "dtype": dtype,
        "model_config": asdict(model.config),
        "train_config": asdict(train_config) if train_config is not None else None,
        "data_config": asdict(data_config) if data_config is not None else None,
    }
    arrays = {f"param/{name}": tensor.detach().cpu().numpy() for name, tensor in state.items()}
    np.savez(path, __meta__=np.asarray(json.dumps(meta, sort_keys=True)), **arrays)


def load_checkpoint(path: str) -> CheckpointPayload:
    store = np.load(path)
    if "__meta__" not in store:
        raise ConfigError(f"{path} is not a model checkpoint (missing __meta__)")
    meta = json.loads(str(store["__meta__"]))
    if meta.get("version") != CHECKPOINT_VERSION:
        raise ConfigError(
            f"unsupported checkpoint version {meta.get('version')!r} in {path}"
        )
    if meta["dtype"] not in _DTYPES:
        raise ConfigError(f"unsupported checkpoint dtype {meta['dtype']!r}")

    model_config = ModelConfig(**meta["model_config"])
    model = PairPredicateNet(model_config, dtype=_DTYPES[meta["dtype"]])
    state = {
        name.removeprefix("param/"): torch.as_tensor(store[name])
        for name in store.files
        if name.startswith("param/")
    }
    model.load_state_dict(state)
    model.eval()

    train_config = None
    if meta["train_config"] is not None:
        raw = dict(meta["train_config"])
        raw["lr_drop_epochs"] = tuple(raw["lr_drop_epochs"])
        raw["adam_betas"] = tuple(raw["adam_betas"])
        raw["loss_weights"] = LossWeights(**raw["loss_weights"])
        train_config = TrainConfig(**raw)
    data_config = (
        DataConfig(**meta["data_config"]) if meta.get("data_config") is not None else None
    )
    return CheckpointPayload(
        model=model,
        model_config=model_config,
        train_config=train_config,
        data_config=data_config,
    )
