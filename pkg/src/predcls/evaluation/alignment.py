"""Score-space alignment diagnostic for two-branch models.

Deep supervision pushes both branches toward the same targets, so the
predicate scores should track the object-minus-subject scores; the mean
Euclidean distance between the two raw score vectors quantifies how well
that holds on a dataset.
"""

from __future__ import annotations

import torch

from ..errors import EvaluationError
from ..model.network import PairPredicateNet
from ..pipeline import PairTensors, forward_batched


def alignment_norm(model: PairPredicateNet, tensors: PairTensors) -> float:
    """Mean over pairs of ||p_scores - os_scores||_2, on raw branch scores."""
    if len(tensors) == 0:
        raise EvaluationError("alignment norm is undefined on an empty dataset")
    scores = forward_batched(model, tensors)
    if scores.p is None or scores.os is None:
        raise EvaluationError("alignment norm requires a model with both branches")
    return float(torch.linalg.vector_norm(scores.p - scores.os, dim=-1).mean())
