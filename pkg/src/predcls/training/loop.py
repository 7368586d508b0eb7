"""The training loop: seeded, single-threaded, reproducible.

Given one seed, every run re-derives the same initialization, the same
validation split, the same per-epoch shuffles and the same per-epoch
ground-truth sampling, so two runs with identical configs produce
identical parameters.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Dict, List, Optional

import torch

from ..errors import ConfigError, TrainingDivergedError
from ..evaluation.predict import prediction_records
from ..evaluation.recall import RecallConfig, recall_k_at_x
from ..model.losses import supervised_heads, total_loss
from ..model.network import ModelConfig, PairPredicateNet
from ..pipeline import PairTensors
from ..seeding import rng_from
from .config import TrainConfig, lr_at_epoch

VALIDATION_METRIC = RecallConfig(k=1, x=50)


@dataclass
class TrainResult:
    model: PairPredicateNet
    model_config: ModelConfig
    train_config: TrainConfig
    history: List[Dict]  # one record per epoch


def derive_model_config(tensors: PairTensors, cfg: TrainConfig, **overrides) -> ModelConfig:
    """Model dimensions read off the assembled tensors, modes from the recipe."""
    base = ModelConfig(
        n_pred=tensors.n_pred,
        embed_dim=tensors.subject_emb.shape[1],
        mask_resolution=tensors.masks.shape[2],
        visual_dim=tensors.x_s.shape[1],
        map_channels=tensors.x_p.shape[1],
        map_size=tensors.x_p.shape[2],
        attention_mode=cfg.attention_mode,
        branch_mode=cfg.branch_mode,
    )
    return replace(base, **overrides) if overrides else base


def _check_config_consistency(model_config: ModelConfig, cfg: TrainConfig) -> None:
    if (
        model_config.attention_mode != cfg.attention_mode
        or model_config.branch_mode != cfg.branch_mode
    ):
        raise ConfigError(
            "model config modes "
            f"({model_config.attention_mode}, {model_config.branch_mode}) disagree with "
            f"the training config ({cfg.attention_mode}, {cfg.branch_mode})"
        )


def train(
    tensors: PairTensors,
    cfg: TrainConfig,
    model_config: Optional[ModelConfig] = None,
) -> TrainResult:
    """Train a fresh network on ``tensors`` under the given recipe."""
    if len(tensors) == 0:
        raise ConfigError("cannot train on an empty dataset")
    if model_config is None:
        model_config = derive_model_config(tensors, cfg)
    _check_config_consistency(model_config, cfg)

    torch.manual_seed(cfg.seed)
    model = PairPredicateNet(model_config, dtype=tensors.x_s.dtype)

    n = len(tensors)
    split_rng = rng_from(cfg.seed, "val-split", n)
    perm = split_rng.permutation(n)
    n_val = min(int(round(cfg.val_fraction * n)), n - 1)
    val_indices = sorted(perm[:n_val].tolist())
    train_indices = sorted(perm[n_val:].tolist())
    val_tensors = tensors.subset(val_indices) if val_indices else None

    gt_lists = [sorted(tensors.gt_sets[i]) for i in range(n)]
    params = [param for _, param in model.trainable_parameters()]
    optimizer = torch.optim.Adam(
        params, lr=cfg.base_lr, betas=cfg.adam_betas, eps=cfg.adam_eps
    )

    history: List[Dict] = []
    for epoch in range(1, cfg.epochs + 1):
        lr = lr_at_epoch(cfg, epoch)
        for group in optimizer.param_groups:
            group["lr"] = lr

        epoch_rng = rng_from(cfg.seed, "epoch", epoch)
        order = [train_indices[i] for i in epoch_rng.permutation(len(train_indices))]
        # One ground-truth predicate per pair per epoch, sampled uniformly:
        # multilabel pairs expose all their labels across epochs while each
        # step stays a single-label classification problem.
        targets = [
            gt_lists[i][int(epoch_rng.integers(len(gt_lists[i])))] for i in order
        ]

        model.train()
        loss_sum, seen = 0.0, 0
        for step, start in enumerate(range(0, len(order), cfg.batch_size)):
            batch_idx = order[start : start + cfg.batch_size]
            sel = torch.as_tensor(batch_idx, dtype=torch.long)
            scores = model(
                tensors.masks[sel],
                tensors.subject_emb[sel],
                tensors.object_emb[sel],
                tensors.x_s[sel],
                tensors.x_o[sel],
                tensors.x_p[sel],
            )
            batch_targets = torch.as_tensor(targets[start : start + cfg.batch_size])
            p_head, os_head = supervised_heads(scores, cfg.deep_supervision)
            loss = total_loss(scores.fused, p_head, os_head, batch_targets, cfg.loss_weights)
            if not torch.isfinite(loss):
                raise TrainingDivergedError(
                    f"non-finite loss at epoch {epoch}, step {step}, "
                    f"batch pair indices {batch_idx[:8]}"
                )
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
            loss_sum += loss.detach().item() * len(batch_idx)
            seen += len(batch_idx)

        record = {"epoch": epoch, "lr": lr, "train_loss": loss_sum / seen}
        if val_tensors is not None:
            records = prediction_records(model, val_tensors)
            record["val_r1_at_50"] = recall_k_at_x(
                records, val_tensors.groundtruth(), VALIDATION_METRIC,
                n_pred=tensors.n_pred,
            )
        history.append(record)

    model.eval()
    return TrainResult(
        model=model, model_config=model_config, train_config=cfg, history=history
    )
