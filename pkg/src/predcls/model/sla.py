"""Spatio-linguistic attention module.

Encodes the pair's binary mask grid with a small conv stack and the two
class embeddings with an MLP, then projects the concatenated codes into a
low-dimensional vector (64-d by default).  That vector conditions every
attentional weight downstream, so spatially and semantically similar pair
configurations land close together.

Ablation modes zero one (or both) input codes before the fusion layer,
leaving the output dimension unchanged:

* ``"SLA"``  - both codes active;
* ``"LA"``   - language only, mask code zeroed;
* ``"SA"``   - masks only, language code zeroed;
* ``"none"`` - both zeroed (the fusion bias is also dropped from training
  so the conditioning vector is exactly zero).
"""

from __future__ import annotations

from typing import Iterator, Tuple

import torch
from torch import nn

ATTENTION_MODES = ("none", "LA", "SA", "SLA")

MASK_CODE_DIM = 128
LANG_CODE_DIM = 128


class MaskEncoder(nn.Module):
    """Three stride-2 convolutions over the mask grid, then a spatial mean.

    The raw (2, R, R) grid is expanded with mask-gated coordinate channels
    (each mask times the normalized x and y cell-center grids) before the
    first convolution.  The final spatial mean would otherwise discard the
    pair's arrangement entirely: a translation-equivariant stack followed
    by average pooling sees "subject above object" and "subject below
    object" as the same bag of local patterns.  Gated coordinates make the
    pooled code carry mask-position moments while keeping the encoder an
    exactly zero-preserving function of the grid.
    """

    def __init__(self, dtype: torch.dtype = torch.float32) -> None:
        super().__init__()
        self.conv1 = nn.Conv2d(6, 32, kernel_size=3, stride=2, padding=1, dtype=dtype)
        self.conv2 = nn.Conv2d(32, 64, kernel_size=3, stride=2, padding=1, dtype=dtype)
        self.conv3 = nn.Conv2d(64, MASK_CODE_DIM, kernel_size=3, stride=2, padding=1, dtype=dtype)

    @staticmethod
    def with_coordinate_channels(masks: torch.Tensor) -> torch.Tensor:
        resolution = masks.shape[-1]
        centers = (torch.arange(resolution, dtype=masks.dtype) + 0.5) / resolution - 0.5
        ygrid = centers.view(1, 1, resolution, 1).expand(1, 1, resolution, resolution)
        xgrid = centers.view(1, 1, 1, resolution).expand(1, 1, resolution, resolution)
        subject, object_ = masks[:, :1], masks[:, 1:]
        return torch.cat(
            [masks, subject * ygrid, subject * xgrid, object_ * ygrid, object_ * xgrid],
            dim=1,
        )

    def forward(self, masks: torch.Tensor) -> torch.Tensor:
        if masks.dim() != 4 or masks.shape[1] != 2:
            raise ValueError(f"expected masks of shape (B, 2, R, R), got {tuple(masks.shape)}")
        h = torch.relu(self.conv1(self.with_coordinate_channels(masks)))
        h = torch.relu(self.conv2(h))
        h = torch.relu(self.conv3(h))
        return h.mean(dim=(2, 3))


class LanguageEncoder(nn.Module):
    """MLP over the concatenated subject and object embeddings (order-sensitive)."""

    def __init__(self, embed_dim: int, dtype: torch.dtype = torch.float32) -> None:
        super().__init__()
        self.embed_dim = embed_dim
        self.fc1 = nn.Linear(2 * embed_dim, 256, dtype=dtype)
        self.fc2 = nn.Linear(256, LANG_CODE_DIM, dtype=dtype)

    def forward(self, subject_emb: torch.Tensor, object_emb: torch.Tensor) -> torch.Tensor:
        if subject_emb.shape[-1] != self.embed_dim or object_emb.shape[-1] != self.embed_dim:
            raise ValueError(
                f"expected embeddings of dimension {self.embed_dim}, got "
                f"{subject_emb.shape[-1]} and {object_emb.shape[-1]}"
            )
        h = torch.cat([subject_emb, object_emb], dim=-1)
        return self.fc2(torch.relu(self.fc1(h)))


class SpatioLinguisticAttention(nn.Module):
    """Fuses mask and language codes into the conditioning vector."""

    def __init__(
        self,
        embed_dim: int = 300,
        out_dim: int = 64,
        mode: str = "SLA",
        dtype: torch.dtype = torch.float32,
    ) -> None:
        super().__init__()
        if mode not in ATTENTION_MODES:
            raise ValueError(f"attention mode must be one of {ATTENTION_MODES}, got {mode!r}")
        self.mode = mode
        self.out_dim = out_dim
        self.mask_encoder = MaskEncoder(dtype=dtype)
        self.language_encoder = LanguageEncoder(embed_dim, dtype=dtype)
        self.fuse = nn.Linear(MASK_CODE_DIM + LANG_CODE_DIM, out_dim, dtype=dtype)

    @property
    def uses_masks(self) -> bool:
        return self.mode in ("SA", "SLA")

    @property
    def uses_language(self) -> bool:
        return self.mode in ("LA", "SLA")

    def encode_masks(self, masks: torch.Tensor) -> torch.Tensor:
        return self.mask_encoder(masks)

    def encode_language(self, subject_emb: torch.Tensor, object_emb: torch.Tensor) -> torch.Tensor:
        return self.language_encoder(subject_emb, object_emb)

    def fuse_codes(self, mask_code: torch.Tensor, lang_code: torch.Tensor) -> torch.Tensor:
        if mask_code.shape[-1] != MASK_CODE_DIM or lang_code.shape[-1] != LANG_CODE_DIM:
            raise ValueError(
                f"expected codes of dimensions {MASK_CODE_DIM} and {LANG_CODE_DIM}, got "
                f"{mask_code.shape[-1]} and {lang_code.shape[-1]}"
            )
        return self.fuse(torch.cat([mask_code, lang_code], dim=-1))

    def forward(
        self,
        masks: torch.Tensor,
        subject_emb: torch.Tensor,
        object_emb: torch.Tensor,
    ) -> torch.Tensor:
        batch = masks.shape[0]
        ref = self.fuse.weight
        if self.uses_masks:
            mask_code = self.encode_masks(masks)
        else:
            mask_code = ref.new_zeros((batch, MASK_CODE_DIM))
        if self.uses_language:
            lang_code = self.encode_language(subject_emb, object_emb)
        else:
            lang_code = ref.new_zeros((batch, LANG_CODE_DIM))
        if self.mode == "none":
            # Fully unconditioned: downstream weights must not depend on the
            # pair at all, so the conditioning vector is identically zero.
            return ref.new_zeros((batch, self.out_dim))
        return self.fuse_codes(mask_code, lang_code)

    def trainable_parameters(self) -> Iterator[Tuple[str, nn.Parameter]]:
        """Named parameters that the current mode actually uses."""
        for name, param in self.named_parameters():
            if name.startswith("mask_encoder.") and not self.uses_masks:
                continue
            if name.startswith("language_encoder.") and not self.uses_language:
                continue
            if name.startswith("fuse.") and self.mode == "none":
                continue
            yield name, param
