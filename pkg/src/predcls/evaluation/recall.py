"""Recall_k@x: the pair-pooled recall metric, bit-reproducible.

Per image with N scored pairs: keep each pair's top-k predictions by
confidence, pool the <= N*k records, keep the x most confident of the
pool, and count a ground-truth (pair, predicate) item as hit iff it
appears in that pool.  The k=1 setting rewards the single best prediction
per pair (the multiclass view); k = #predicates keeps every prediction
and treats the task as multilabel.

All orderings break confidence ties deterministically: within a pair by
lower predicate id, across the pooled records by (lower pair index, lower
predicate id).  Identical (pair, predicate) records are not deduplicated.

Aggregation across images is a micro-average (total hits over total
ground-truth items); ``average="per_image"`` switches to the mean of
per-image recalls for comparison with harnesses that aggregate that way.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Union

from ..data.types import DatasetBundle
from ..errors import ConfigError, EvaluationError

GroundTruth = Union[DatasetBundle, Mapping[str, Sequence[Iterable[int]]]]


@dataclass(frozen=True)
class PredictionRecord:
    """One scored predicate hypothesis for one pair of one image."""

    image_id: str
    pair_index: int
    predicate_id: int
    confidence: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.confidence):
            raise ConfigError(
                f"non-finite confidence for pair {self.pair_index} of image {self.image_id!r}"
            )
        if self.pair_index < 0 or self.predicate_id < 0:
            raise ConfigError("pair_index and predicate_id must be >= 0")


@dataclass(frozen=True)
class RecallConfig:
    """k = predictions kept per pair, x = pool size examined per image."""

    k: int
    x: int

    def __post_init__(self) -> None:
        if self.k < 1 or self.x < 1:
            raise ConfigError(f"k and x must be >= 1, got k={self.k}, x={self.x}")


def _gt_sets(groundtruth: GroundTruth) -> Dict[str, List[frozenset]]:
    if isinstance(groundtruth, DatasetBundle):
        return {
            image_id: [pair.gt_predicates for pair in pairs]
            for image_id, pairs in groundtruth.pairs_by_image().items()
        }
    return {
        image_id: [frozenset(s) for s in sets]
        for image_id, sets in groundtruth.items()
    }


def recall_k_at_x(
    predictions: Iterable[PredictionRecord],
    groundtruth: GroundTruth,
    config: RecallConfig,
    average: str = "micro",
    n_pred: Optional[int] = None,
) -> float:
    """Fraction of ground-truth (pair, predicate) items found in the top-x pools."""
    if average not in ("micro", "per_image"):
        raise ConfigError(f"average must be 'micro' or 'per_image', got {average!r}")
    if isinstance(groundtruth, DatasetBundle):
        n_pred = groundtruth.n_pred if n_pred is None else n_pred
    if n_pred is not None and config.k > n_pred:
        raise ConfigError(f"k={config.k} exceeds the predicate vocabulary size {n_pred}")

    gt = _gt_sets(groundtruth)
    by_image: Dict[str, List[PredictionRecord]] = defaultdict(list)
    for record in predictions:
        if record.image_id not in gt:
            raise EvaluationError(f"prediction for unknown image {record.image_id!r}")
        if record.pair_index >= len(gt[record.image_id]):
            raise EvaluationError(
                f"prediction for unknown pair {record.pair_index} of image "
                f"{record.image_id!r} (image has {len(gt[record.image_id])} pairs)"
            )
        if n_pred is not None and record.predicate_id >= n_pred:
            raise EvaluationError(
                f"prediction with predicate id {record.predicate_id} outside the "
                f"vocabulary of size {n_pred}"
            )
        by_image[record.image_id].append(record)

    total_items = 0
    total_hits = 0
    per_image: List[float] = []
    for image_id, gt_sets in gt.items():
        by_pair: Dict[int, List[PredictionRecord]] = defaultdict(list)
        for record in by_image.get(image_id, []):
            by_pair[record.pair_index].append(record)
        pooled: List[PredictionRecord] = []
        for pair_records in by_pair.values():
            pair_records.sort(key=lambda r: (-r.confidence, r.predicate_id))
            pooled.extend(pair_records[: config.k])
        pooled.sort(key=lambda r: (-r.confidence, r.pair_index, r.predicate_id))
        kept = {(r.pair_index, r.predicate_id) for r in pooled[: config.x]}

        items = sum(len(s) for s in gt_sets)
        hits = sum(
            1
            for pair_index, labels in enumerate(gt_sets)
            for predicate in labels
            if (pair_index, predicate) in kept
        )
        total_items += items
        total_hits += hits
        if items:
            per_image.append(hits / items)

    if total_items == 0:
        raise EvaluationError("ground truth contains no (pair, predicate) items")
    if average == "micro":
        return total_hits / total_items
    return sum(per_image) / len(per_image)


def default_metric_grid(n_pred: int) -> List[RecallConfig]:
    """The standard three-column metric set.

    (1, 50) rewards the top-1 prediction per pair; the other two keep all
    ``n_pred`` predictions per pair (the multilabel view) at pool sizes 50
    and 100.  On a 70-predicate vocabulary this is exactly R_1@50,
    R_70@50, R_70@100.
    """
    return [
        RecallConfig(k=1, x=50),
        RecallConfig(k=n_pred, x=50),
        RecallConfig(k=n_pred, x=100),
    ]
