"""Full pair-predicate network: conditioning module, branches and score fusion."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import torch
from torch import nn

from ..errors import ConfigError
from .branches import ObjectSubjectBranch, PredicateBranch
from .sla import ATTENTION_MODES, SpatioLinguisticAttention

BRANCH_MODES = ("P", "OS", "both")


@dataclass(frozen=True)
class ModelConfig:
    """All dimensions and switches needed to rebuild a network."""

    n_pred: int
    embed_dim: int = 300
    mask_resolution: int = 32
    visual_dim: int = 256
    map_channels: int = 64
    map_size: int = 7
    attn_dim: int = 64
    feat_dim: int = 128
    rank: int = 8
    attention_mode: str = "SLA"
    branch_mode: str = "both"

    def __post_init__(self) -> None:
        if self.attention_mode not in ATTENTION_MODES:
            raise ConfigError(f"attention_mode must be one of {ATTENTION_MODES}")
        if self.branch_mode not in BRANCH_MODES:
            raise ConfigError(f"branch_mode must be one of {BRANCH_MODES}")
        if min(self.n_pred, self.embed_dim, self.visual_dim, self.map_channels,
               self.attn_dim, self.feat_dim, self.rank) < 1:
            raise ConfigError("all model dimensions must be positive")
        if self.mask_resolution < 2 or self.map_size < 2:
            raise ConfigError("mask_resolution and map_size must be >= 2")


class Scores(NamedTuple):
    """Per-head score vectors; absent heads are None."""

    fused: torch.Tensor
    p: Optional[torch.Tensor]
    os: Optional[torch.Tensor]


class PairPredicateNet(nn.Module):
    """Two conditioned branches plus a meta-classifier over their concatenated scores."""

    def __init__(self, config: ModelConfig, dtype: torch.dtype = torch.float32) -> None:
        super().__init__()
        self.config = config
        self.sla = SpatioLinguisticAttention(
            embed_dim=config.embed_dim,
            out_dim=config.attn_dim,
            mode=config.attention_mode,
            dtype=dtype,
        )
        self.p_branch = (
            PredicateBranch(
                config.map_channels, config.feat_dim, config.n_pred,
                config.attn_dim, config.rank, dtype=dtype,
            )
            if config.branch_mode in ("P", "both")
            else None
        )
        self.os_branch = (
            ObjectSubjectBranch(
                config.visual_dim, config.feat_dim, config.n_pred,
                config.attn_dim, config.rank, dtype=dtype,
            )
            if config.branch_mode in ("OS", "both")
            else None
        )
        self.fusion = (
            nn.Linear(2 * config.n_pred, config.n_pred, dtype=dtype)
            if config.branch_mode == "both"
            else None
        )

    def fuse_scores(self, p_scores: torch.Tensor, os_scores: torch.Tensor) -> torch.Tensor:
        """Meta-classifier over the concatenated branch scores."""
        if p_scores.shape[-1] != self.config.n_pred or os_scores.shape[-1] != self.config.n_pred:
            raise ValueError(
                f"branch score vectors must have length {self.config.n_pred}, got "
                f"{p_scores.shape[-1]} and {os_scores.shape[-1]}"
            )
        return self.fusion(torch.cat([p_scores, os_scores], dim=-1))

    def forward(
        self,
        masks: torch.Tensor,
        subject_emb: torch.Tensor,
        object_emb: torch.Tensor,
        x_s: torch.Tensor,
        x_o: torch.Tensor,
        x_p: torch.Tensor,
    ) -> Scores:
        if masks.shape[-1] != self.config.mask_resolution:
            raise ValueError(
                f"expected masks at resolution {self.config.mask_resolution}, "
                f"got {masks.shape[-1]}"
            )
        a = self.sla(masks, subject_emb, object_emb)
        p = self.p_branch(x_p, a) if self.p_branch is not None else None
        os_ = self.os_branch(x_s, x_o, a) if self.os_branch is not None else None
        if self.config.branch_mode == "both":
            fused = self.fuse_scores(p, os_)
        else:
            fused = p if p is not None else os_
        return Scores(fused=fused, p=p, os=os_)

    def conditioning_vectors(
        self, masks: torch.Tensor, subject_emb: torch.Tensor, object_emb: torch.Tensor
    ) -> torch.Tensor:
        """The conditioning vector for each pair, used for projection exports."""
        return self.sla(masks, subject_emb, object_emb)

    def trainable_parameters(self):
        """Named parameters, with conditioning encoders the mode never uses excluded."""
        sla_trainable = {f"sla.{name}" for name, _ in self.sla.trainable_parameters()}
        for name, param in self.named_parameters():
            if name.startswith("sla.") and name not in sla_trainable:
                continue
            yield name, param
