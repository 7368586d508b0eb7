"""Deeply supervised training objective.

The fused scores always contribute a cross-entropy term; with deep
supervision the per-branch scores contribute their own terms so each
branch must stay a meaningful classifier on its own.  That shared target
is what pulls the two branches' scores toward each other.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import torch
import torch.nn.functional as F

from ..errors import ConfigError
from .network import Scores


@dataclass(frozen=True)
class LossWeights:
    """Non-negative weights of the fused and per-branch loss terms."""

    fused: float = 1.5
    p: float = 1.0
    os: float = 1.0

    def __post_init__(self) -> None:
        if min(self.fused, self.p, self.os) < 0:
            raise ConfigError("loss weights must be non-negative")
        if self.fused == self.p == self.os == 0:
            raise ConfigError("at least one loss weight must be positive")


def total_loss(
    fused: torch.Tensor,
    p_scores: Optional[torch.Tensor],
    os_scores: Optional[torch.Tensor],
    targets: torch.Tensor,
    weights: LossWeights = LossWeights(),
) -> torch.Tensor:
    """Weighted sum of the mean cross-entropies of the available heads.

    ``p_scores`` / ``os_scores`` are None when the corresponding head is
    not supervised (single-branch models, or deep supervision disabled).
    """
    n_classes = fused.shape[-1]
    if targets.min() < 0 or targets.max() >= n_classes:
        raise ConfigError(
            f"target ids must lie in [0, {n_classes}), got "
            f"[{int(targets.min())}, {int(targets.max())}]"
        )
    loss = weights.fused * F.cross_entropy(fused, targets)
    if p_scores is not None and weights.p > 0:
        loss = loss + weights.p * F.cross_entropy(p_scores, targets)
    if os_scores is not None and weights.os > 0:
        loss = loss + weights.os * F.cross_entropy(os_scores, targets)
    return loss


def supervised_heads(scores: Scores, deep_supervision: bool) -> tuple:
    """The (p, os) heads that receive their own loss terms, or Nones.

    Per-branch terms exist only for two-branch models with deep
    supervision on; a single branch's scores already are the fused output.
    """
    if not deep_supervision or scores.p is None or scores.os is None:
        return None, None
    return scores.p, scores.os
