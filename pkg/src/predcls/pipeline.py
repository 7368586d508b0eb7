"""Bridging data bundles and the network: tensor assembly and batched inference.

Assembly is the only place masks, embeddings and visual features are
materialized; everything downstream (training, evaluation, projection)
works on one :class:`PairTensors` so repeated runs over the same dataset
pay the assembly cost once.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Sequence

import numpy as np
import torch

from .data.embeddings import EmbeddingTable
from .data.masks import rasterize_masks
from .data.types import DatasetBundle
from .errors import EvaluationError
from .model.network import PairPredicateNet, Scores


@dataclass
class PairTensors:
    """Stacked model inputs plus the bookkeeping needed to score predictions."""

    masks: torch.Tensor  # (N, 2, R, R)
    subject_emb: torch.Tensor  # (N, d_w)
    object_emb: torch.Tensor  # (N, d_w)
    x_s: torch.Tensor  # (N, d_v)
    x_o: torch.Tensor  # (N, d_v)
    x_p: torch.Tensor  # (N, d_c, H, W)
    gt_sets: List[frozenset]
    image_ids: List[str]
    pair_indices: List[int]  # position of each pair within its image
    n_pred: int

    def __len__(self) -> int:
        return len(self.gt_sets)

    def groundtruth(self) -> Dict[str, List[frozenset]]:
        """Per-image ground-truth sets, ordered by pair index."""
        grouped: Dict[str, List[frozenset]] = {}
        for image_id, gt in zip(self.image_ids, self.gt_sets):
            grouped.setdefault(image_id, []).append(gt)
        return grouped

    def subset(self, indices: Sequence[int]) -> "PairTensors":
        """A new container over ``indices``, with pair indices renumbered per image."""
        idx = list(indices)
        image_ids = [self.image_ids[i] for i in idx]
        counters: Dict[str, int] = {}
        pair_indices = []
        for image_id in image_ids:
            pair_indices.append(counters.get(image_id, 0))
            counters[image_id] = pair_indices[-1] + 1
        t = torch.as_tensor(idx, dtype=torch.long)
        return PairTensors(
            masks=self.masks[t],
            subject_emb=self.subject_emb[t],
            object_emb=self.object_emb[t],
            x_s=self.x_s[t],
            x_o=self.x_o[t],
            x_p=self.x_p[t],
            gt_sets=[self.gt_sets[i] for i in idx],
            image_ids=image_ids,
            pair_indices=pair_indices,
            n_pred=self.n_pred,
        )


def assemble_tensors(
    bundle: DatasetBundle,
    provider,
    embeddings: EmbeddingTable,
    mask_resolution: int = 32,
    dtype: torch.dtype = torch.float32,
) -> PairTensors:
    """Rasterize, embed and featurize every pair of ``bundle``."""
    masks, s_emb, o_emb, xs, xo, xp = [], [], [], [], [], []
    image_ids: List[str] = []
    pair_indices: List[int] = []
    counters: Dict[str, int] = {}
    for pair in bundle.pairs:
        masks.append(rasterize_masks(pair.subject.box, pair.object.box, mask_resolution).grid)
        s_emb.append(embeddings.lookup(pair.subject.class_id))
        o_emb.append(embeddings.lookup(pair.object.class_id))
        features = provider.features_for(pair)
        xs.append(features.x_s)
        xo.append(features.x_o)
        xp.append(features.x_p)
        image_ids.append(pair.image_id)
        pair_indices.append(counters.get(pair.image_id, 0))
        counters[pair.image_id] = pair_indices[-1] + 1

    def stack(arrays) -> torch.Tensor:
        return torch.as_tensor(np.stack(arrays), dtype=dtype)

    return PairTensors(
        masks=stack(masks),
        subject_emb=stack(s_emb),
        object_emb=stack(o_emb),
        x_s=stack(xs),
        x_o=stack(xo),
        x_p=stack(xp),
        gt_sets=[pair.gt_predicates for pair in bundle.pairs],
        image_ids=image_ids,
        pair_indices=pair_indices,
        n_pred=bundle.n_pred,
    )


def forward_batched(
    model: PairPredicateNet, tensors: PairTensors, batch_size: int = 512
) -> Scores:
    """Run the model over all pairs without gradients, concatenating head outputs."""
    if len(tensors) == 0:
        raise EvaluationError("cannot run the model on an empty pair set")
    model.eval()
    fused, p, os_ = [], [], []
    with torch.no_grad():
        for start in range(0, len(tensors), batch_size):
            sl = slice(start, start + batch_size)
            scores = model(
                tensors.masks[sl],
                tensors.subject_emb[sl],
                tensors.object_emb[sl],
                tensors.x_s[sl],
                tensors.x_o[sl],
                tensors.x_p[sl],
            )
            fused.append(scores.fused)
            if scores.p is not None:
                p.append(scores.p)
            if scores.os is not None:
                os_.append(scores.os)
    return Scores(
        fused=torch.cat(fused),
        p=torch.cat(p) if p else None,
        os=torch.cat(os_) if os_ else None,
    )


def top1_accuracy(model: PairPredicateNet, tensors: PairTensors) -> float:
    """Fraction of pairs whose highest fused score hits any ground-truth predicate."""
    scores = forward_batched(model, tensors)
    top1 = scores.fused.argmax(dim=-1).tolist()
    hits = sum(1 for pred, gt in zip(top1, tensors.gt_sets) if pred in gt)
    return hits / len(tensors)
