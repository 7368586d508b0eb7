"""Core datatypes for pair-level predicate classification.

Boxes and object classes are always given: the unit of work is a
subject-object pair whose predicate(s) must be predicted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

import numpy as np

from ..errors import ConfigError, VocabularyError


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned box in pixel coordinates, (x1, y1) top-left exclusive of (x2, y2)."""

    x1: float
    y1: float
    x2: float
    y2: float

    def __post_init__(self) -> None:
        coords = (self.x1, self.y1, self.x2, self.y2)
        if not all(math.isfinite(c) for c in coords):
            raise ConfigError(f"box coordinates must be finite, got {coords}")
        if min(coords) < 0:
            raise ConfigError(f"box coordinates must be >= 0, got {coords}")
        if not (self.x1 < self.x2 and self.y1 < self.y2):
            raise ConfigError(f"box must have positive extent, got {coords}")

    @property
    def width(self) -> float:
        return self.x2 - self.x1

    @property
    def height(self) -> float:
        return self.y2 - self.y1

    @property
    def area(self) -> float:
        return self.width * self.height

    @property
    def center(self) -> Tuple[float, float]:
        return (self.x1 + self.x2) / 2.0, (self.y1 + self.y2) / 2.0

    def union(self, other: "BoundingBox") -> "BoundingBox":
        """Minimum box enclosing both; the frame predicate features live in."""
        return BoundingBox(
            min(self.x1, other.x1),
            min(self.y1, other.y1),
            max(self.x2, other.x2),
            max(self.y2, other.y2),
        )

    def contains(self, other: "BoundingBox") -> bool:
        return (
            self.x1 <= other.x1
            and self.y1 <= other.y1
            and other.x2 <= self.x2
            and other.y2 <= self.y2
        )

    def contains_point(self, x: float, y: float) -> bool:
        """Half-open membership: [x1, x2) x [y1, y2)."""
        return self.x1 <= x < self.x2 and self.y1 <= y < self.y2


@dataclass(frozen=True)
class ObjectInstance:
    """One detected or annotated entity: a vocabulary class plus its box."""

    class_id: int
    box: BoundingBox

    def __post_init__(self) -> None:
        if self.class_id < 0:
            raise ConfigError(f"class_id must be >= 0, got {self.class_id}")


@dataclass(frozen=True)
class PairExample:
    """A subject-object pair with its ground-truth predicate label set."""

    image_id: str
    subject: ObjectInstance
    object: ObjectInstance
    gt_predicates: frozenset = field()

    def __post_init__(self) -> None:
        object.__setattr__(self, "gt_predicates", frozenset(self.gt_predicates))
        if not self.gt_predicates:
            raise ConfigError(f"pair in image {self.image_id!r} has no ground-truth predicates")
        if any(p < 0 for p in self.gt_predicates):
            raise ConfigError(f"negative predicate id in image {self.image_id!r}")


@dataclass
class DatasetBundle:
    """An ordered pair collection plus the vocabulary sizes it is indexed against."""

    pairs: List[PairExample]
    n_obj: int
    n_pred: int
    image_sizes: Dict[str, Tuple[int, int]]  # image_id -> (width, height)

    def __post_init__(self) -> None:
        self.validate()

    def validate(self) -> None:
        if self.n_obj <= 0 or self.n_pred <= 0:
            raise ConfigError("vocabulary sizes must be positive")
        for pair in self.pairs:
            for inst in (pair.subject, pair.object):
                if inst.class_id >= self.n_obj:
                    raise VocabularyError(
                        f"object class id {inst.class_id} out of range [0, {self.n_obj}) "
                        f"in image {pair.image_id!r}"
                    )
            for pred in pair.gt_predicates:
                if pred >= self.n_pred:
                    raise VocabularyError(
                        f"predicate id {pred} out of range [0, {self.n_pred}) "
                        f"in image {pair.image_id!r}"
                    )
            if pair.image_id not in self.image_sizes:
                raise ConfigError(f"no image size recorded for image {pair.image_id!r}")
            w, h = self.image_sizes[pair.image_id]
            frame = BoundingBox(0.0, 0.0, float(w), float(h))
            if not (frame.contains(pair.subject.box) and frame.contains(pair.object.box)):
                raise ConfigError(
                    f"a box in image {pair.image_id!r} exceeds its recorded size {(w, h)}"
                )

    def pairs_by_image(self) -> Dict[str, List[PairExample]]:
        """Pairs grouped per image, preserving bundle order within each image."""
        grouped: Dict[str, List[PairExample]] = {}
        for pair in self.pairs:
            grouped.setdefault(pair.image_id, []).append(pair)
        return grouped

    def __len__(self) -> int:
        return len(self.pairs)


@dataclass(frozen=True)
class MaskPair:
    """Two-channel binary grid: channel 0 covers the subject, channel 1 the object."""

    grid: np.ndarray  # (2, R, R) of {0, 1}

    def __post_init__(self) -> None:
        g = self.grid
        if g.ndim != 3 or g.shape[0] != 2 or g.shape[1] != g.shape[2]:
            raise ConfigError(f"mask grid must have shape (2, R, R), got {g.shape}")
        if not np.isin(g, (0, 1)).all():
            raise ConfigError("mask grid entries must be 0 or 1")
        g.setflags(write=False)

    @property
    def resolution(self) -> int:
        return int(self.grid.shape[1])


@dataclass(frozen=True)
class FeatureBundle:
    """Visual features for one pair: pooled subject/object vectors and a spatial predicate map."""

    x_s: np.ndarray  # (d_v,)
    x_o: np.ndarray  # (d_v,)
    x_p: np.ndarray  # (d_c, H, W)

    def __post_init__(self) -> None:
        if self.x_s.ndim != 1 or self.x_o.ndim != 1:
            raise ConfigError("x_s and x_o must be vectors")
        if self.x_s.shape != self.x_o.shape:
            raise ConfigError(
                f"x_s and x_o must share a dimension, got {self.x_s.shape} and {self.x_o.shape}"
            )
        if self.x_p.ndim != 3:
            raise ConfigError(f"x_p must have shape (channels, H, W), got {self.x_p.shape}")
        for name, arr in (("x_s", self.x_s), ("x_o", self.x_o), ("x_p", self.x_p)):
            if not np.isfinite(arr).all():
                raise ConfigError(f"{name} contains non-finite values")
