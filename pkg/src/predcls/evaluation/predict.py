"""Turning model outputs into the line-level records the recall metric consumes."""

from __future__ import annotations

import csv
from typing import Iterable, List

from ..model.network import PairPredicateNet
from ..pipeline import PairTensors, forward_batched
from .recall import PredictionRecord


def prediction_records(
    model: PairPredicateNet, tensors: PairTensors, batch_size: int = 512
) -> List[PredictionRecord]:
    """One record per (pair, predicate); confidence = per-pair softmax probability."""
    scores = forward_batched(model, tensors, batch_size)
    probs = scores.fused.softmax(dim=-1).numpy()
    records = []
    for row, (image_id, pair_index) in enumerate(zip(tensors.image_ids, tensors.pair_indices)):
        for predicate_id in range(tensors.n_pred):
            records.append(
                PredictionRecord(
                    image_id=image_id,
                    pair_index=pair_index,
                    predicate_id=predicate_id,
                    confidence=float(probs[row, predicate_id]),
                )
            )
    return records


def write_prediction_file(path: str, records: Iterable[PredictionRecord]) -> None:
    """Line-delimited prediction records: image_id, pair_index, predicate_id, confidence."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["image_id", "pair_index", "predicate_id", "confidence"])
        for r in records:
            writer.writerow([r.image_id, r.pair_index, r.predicate_id, repr(r.confidence)])


def read_prediction_file(path: str) -> List[PredictionRecord]:
    with open(path, "r", newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        return [
            PredictionRecord(
                image_id=row["image_id"],
                pair_index=int(row["pair_index"]),
                predicate_id=int(row["predicate_id"]),
                confidence=float(row["confidence"]),
            )
            for row in reader
        ]
