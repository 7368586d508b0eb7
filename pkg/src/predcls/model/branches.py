"""The two scoring branches, conditioned on the spatio-linguistic vector.

Predicate branch: attention-pooled spatial predicate features, one
encoding layer, then a conditioned classifier.  Object-subject branch:
separately encoded subject and object features whose difference is
classified the same way, so both branches emit scores in a common space
and their outputs can be aligned (predicate scores tracking the
object-minus-subject scores).
"""

from __future__ import annotations

import torch
from torch import nn


def _zero_bias_linear(in_dim: int, out_dim: int, std: float, dtype: torch.dtype) -> nn.Linear:
    # Conditioning generators start near zero so an all-zero conditioning
    # vector yields exactly unconditioned behavior at initialization.
    layer = nn.Linear(in_dim, out_dim, dtype=dtype)
    nn.init.normal_(layer.weight, std=std)
    nn.init.zeros_(layer.bias)
    return layer


class AttentionalPooling(nn.Module):
    """Softmax pooling over map locations with a query generated from the conditioning vector."""

    def __init__(
        self,
        attn_dim: int,
        map_channels: int,
        generator_std: float = 0.05,
        dtype: torch.dtype = torch.float32,
    ) -> None:
        super().__init__()
        self.map_channels = map_channels
        self.query = _zero_bias_linear(attn_dim, map_channels, generator_std, dtype)

    def attention_weights(self, x_p: torch.Tensor, a: torch.Tensor) -> torch.Tensor:
        """Location weights, shape (B, H, W); each map sums to 1."""
        if x_p.dim() != 4 or x_p.shape[1] != self.map_channels:
            raise ValueError(
                f"expected map of shape (B, {self.map_channels}, H, W), got {tuple(x_p.shape)}"
            )
        q = self.query(a)
        logits = torch.einsum("bc,bchw->bhw", q, x_p)
        flat = logits.flatten(1).softmax(dim=1)
        return flat.view_as(logits)

    def forward(self, x_p: torch.Tensor, a: torch.Tensor) -> torch.Tensor:
        alpha = self.attention_weights(x_p, a)
        return torch.einsum("bhw,bchw->bc", alpha, x_p)


class HypernetClassifier(nn.Module):
    """Linear classifier whose weight matrix is modulated by the conditioning vector.

    The effective weights are ``W(a) = W0 + U(a) @ V(a)^T`` with ``U(a)``
    of shape (in_dim, rank) and ``V(a)`` of shape (n_classes, rank), both
    emitted by one linear generator from ``a``.  A full generator from
    ``a`` to in_dim * n_classes weights would dwarf the rest of the model;
    the low-rank update keeps the conditioned-classifier semantics at a
    checkable size.
    """

    def __init__(
        self,
        in_dim: int,
        n_classes: int,
        attn_dim: int,
        rank: int = 8,
        generator_std: float = 0.05,
        dtype: torch.dtype = torch.float32,
    ) -> None:
        super().__init__()
        if rank < 1:
            raise ValueError(f"rank must be >= 1, got {rank}")
        self.in_dim = in_dim
        self.n_classes = n_classes
        self.rank = rank
        self.base_weight = nn.Parameter(torch.empty(in_dim, n_classes, dtype=dtype))
        nn.init.normal_(self.base_weight, std=in_dim**-0.5)
        self.bias = nn.Parameter(torch.zeros(n_classes, dtype=dtype))
        self.generator = _zero_bias_linear(
            attn_dim, rank * (in_dim + n_classes), generator_std, dtype
        )

    def factors(self, a: torch.Tensor) -> tuple[torch.Tensor, torch.Tensor]:
        out = self.generator(a)
        u = out[..., : self.in_dim * self.rank].reshape(-1, self.in_dim, self.rank)
        v = out[..., self.in_dim * self.rank :].reshape(-1, self.n_classes, self.rank)
        return u, v

    def weight_for(self, a: torch.Tensor) -> torch.Tensor:
        """Effective (B, in_dim, n_classes) weight tensor for each conditioning vector."""
        u, v = self.factors(a)
        return self.base_weight.unsqueeze(0) + torch.einsum("bir,bcr->bic", u, v)

    def forward(self, features: torch.Tensor, a: torch.Tensor) -> torch.Tensor:
        if features.shape[-1] != self.in_dim:
            raise ValueError(
                f"expected features of dimension {self.in_dim}, got {features.shape[-1]}"
            )
        u, v = self.factors(a)
        base = features @ self.base_weight
        modulation = torch.einsum("bir,bi->br", u, features)
        update = torch.einsum("br,bcr->bc", modulation, v)
        return base + update + self.bias


class PredicateBranch(nn.Module):
    """Attention pooling -> encoding layer -> conditioned classifier."""

    def __init__(
        self,
        map_channels: int,
        feat_dim: int,
        n_pred: int,
        attn_dim: int,
        rank: int = 8,
        dtype: torch.dtype = torch.float32,
    ) -> None:
        super().__init__()
        self.pooling = AttentionalPooling(attn_dim, map_channels, dtype=dtype)
        self.encoder = nn.Linear(map_channels, feat_dim, dtype=dtype)
        self.classifier = HypernetClassifier(feat_dim, n_pred, attn_dim, rank, dtype=dtype)

    def encode(self, pooled: torch.Tensor) -> torch.Tensor:
        return torch.relu(self.encoder(pooled))

    def forward(self, x_p: torch.Tensor, a: torch.Tensor) -> torch.Tensor:
        pooled = self.pooling(x_p, a)
        return self.classifier(self.encode(pooled), a)


class ObjectSubjectBranch(nn.Module):
    """Classifies the difference of separately encoded object and subject features.

    The per-entity encoders realize the two entity-specific projections;
    the single conditioned classifier then maps their difference into the
    shared predicate score space.  Classifying the encoded difference with
    one weight matrix is equivalent to classifying each encoding with that
    same matrix and subtracting, which is what keeps these scores
    comparable with the predicate branch.
    """

    def __init__(
        self,
        visual_dim: int,
        feat_dim: int,
        n_pred: int,
        attn_dim: int,
        rank: int = 8,
        dtype: torch.dtype = torch.float32,
    ) -> None:
        super().__init__()
        self.subject_encoder = nn.Linear(visual_dim, feat_dim, dtype=dtype)
        self.object_encoder = nn.Linear(visual_dim, feat_dim, dtype=dtype)
        self.classifier = HypernetClassifier(feat_dim, n_pred, attn_dim, rank, dtype=dtype)

    def encode_subject(self, x_s: torch.Tensor) -> torch.Tensor:
        return torch.relu(self.subject_encoder(x_s))

    def encode_object(self, x_o: torch.Tensor) -> torch.Tensor:
        return torch.relu(self.object_encoder(x_o))

    def scores_from_encoded(
        self, f_o: torch.Tensor, f_s: torch.Tensor, a: torch.Tensor
    ) -> torch.Tensor:
        """Scores from already-encoded features; depends on them only through f_o - f_s."""
        return self.classifier(f_o - f_s, a)

    def forward(self, x_s: torch.Tensor, x_o: torch.Tensor, a: torch.Tensor) -> torch.Tensor:
        return self.scores_from_encoded(self.encode_object(x_o), self.encode_subject(x_s), a)
