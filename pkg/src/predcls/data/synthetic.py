"""Synthetic pair dataset with a known generative labeling rule.

Every pair's predicate is a deterministic function of the subject class,
object class and the relative box geometry, so tests and benchmarks can
re-derive the ground truth independently:

* geometry picks one of six spatial buckets (:func:`spatial_bucket`);
* the class pair picks a semantic index ``(subject + object) % n_semantic``;
* ``predicate = bucket * n_semantic + semantic_index``.

The rule mixes a purely spatial cue with a purely semantic one, so models
that exploit only one modality hit a ceiling below models that use both.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from ..errors import ConfigError
from .types import BoundingBox, DatasetBundle, ObjectInstance, PairExample

SPATIAL_BUCKETS = ("contains", "inside", "above", "below", "left_of", "right_of")


def spatial_bucket(subject: BoundingBox, object_: BoundingBox) -> int:
    """Bucket index of the pair geometry.

    Containment is checked first (subject encloses object -> ``contains``,
    object encloses subject -> ``inside``).  Otherwise the center offset
    decides: the dominant axis wins, vertical on ties; y grows downward,
    so an object center below the subject center means ``above``.
    """
    if subject.contains(object_):
        return SPATIAL_BUCKETS.index("contains")
    if object_.contains(subject):
        return SPATIAL_BUCKETS.index("inside")
    (sx, sy), (ox, oy) = subject.center, object_.center
    dx, dy = ox - sx, oy - sy
    if abs(dy) >= abs(dx):
        return SPATIAL_BUCKETS.index("above" if dy > 0 else "below")
    return SPATIAL_BUCKETS.index("left_of" if dx > 0 else "right_of")


def assign_predicate(
    subject_class: int,
    object_class: int,
    subject_box: BoundingBox,
    object_box: BoundingBox,
    n_semantic: int,
) -> int:
    """The exported generative rule mapping a pair to its predicate id."""
    bucket = spatial_bucket(subject_box, object_box)
    semantic = (subject_class + object_class) % n_semantic
    return bucket * n_semantic + semantic


def predicate_names(n_pred: int, n_semantic: int) -> List[str]:
    """Readable names for the rule's label space, padded for unused ids."""
    names = [
        f"{bucket}_s{semantic}"
        for bucket in SPATIAL_BUCKETS
        for semantic in range(n_semantic)
    ]
    names += [f"extra_{i}" for i in range(len(names), n_pred)]
    return names[:n_pred]


def object_names(n_obj: int) -> List[str]:
    return [f"object_{i:02d}" for i in range(n_obj)]


@dataclass(frozen=True)
class SyntheticSpec:
    """Sizes and seed of one synthetic dataset."""

    n_images: int
    pairs_per_image: int
    n_obj: int
    n_pred: int
    seed: int
    n_semantic: int = 4
    label_noise: float = 0.0
    image_size: Tuple[int, int] = (256, 256)

    def __post_init__(self) -> None:
        if min(self.n_images, self.pairs_per_image, self.n_obj) < 1:
            raise ConfigError("n_images, pairs_per_image and n_obj must be positive")
        if self.n_semantic < 1:
            raise ConfigError("n_semantic must be positive")
        rule_outcomes = len(SPATIAL_BUCKETS) * self.n_semantic
        if self.n_pred < rule_outcomes:
            raise ConfigError(
                f"n_pred={self.n_pred} is smaller than the {rule_outcomes} outcomes "
                f"of the generative rule ({len(SPATIAL_BUCKETS)} buckets x "
                f"{self.n_semantic} semantic classes)"
            )
        if not 0.0 <= self.label_noise <= 1.0:
            raise ConfigError("label_noise must lie in [0, 1]")


def _box_from_center(cx: float, cy: float, w: float, h: float) -> BoundingBox:
    return BoundingBox(cx - w / 2.0, cy - h / 2.0, cx + w / 2.0, cy + h / 2.0)


def _try_sample_geometry(
    bucket: int, rng: np.random.Generator, width: float, height: float
) -> Optional[Tuple[BoundingBox, BoundingBox]]:
    name = SPATIAL_BUCKETS[bucket]
    if name in ("contains", "inside"):
        w_out = rng.uniform(0.45, 0.8) * width
        h_out = rng.uniform(0.45, 0.8) * height
        x1 = rng.uniform(0.0, width - w_out)
        y1 = rng.uniform(0.0, height - h_out)
        outer = BoundingBox(x1, y1, x1 + w_out, y1 + h_out)
        w_in = rng.uniform(0.2, 0.6) * w_out
        h_in = rng.uniform(0.2, 0.6) * h_out
        ix1 = rng.uniform(outer.x1, outer.x2 - w_in)
        iy1 = rng.uniform(outer.y1, outer.y2 - h_in)
        inner = BoundingBox(ix1, iy1, ix1 + w_in, iy1 + h_in)
        return (outer, inner) if name == "contains" else (inner, outer)

    # Directional buckets: sample along the dominant axis first, then pick
    # a cross offset strictly smaller than the dominant one.
    w_s, w_o = rng.uniform(0.1, 0.3, size=2) * width
    h_s, h_o = rng.uniform(0.1, 0.3, size=2) * height
    if name in ("above", "below"):
        near = rng.uniform(h_s / 2.0, 0.42 * height)
        main = rng.uniform(0.2 * height, height - h_o / 2.0 - near)
        cross = rng.uniform(-0.8, 0.8) * main
        if name == "above":
            cy_s, cy_o = near, near + main
        else:
            cy_s, cy_o = height - near, height - near - main
        lo = max(w_s / 2.0, w_o / 2.0 - cross)
        hi = min(width - w_s / 2.0, width - w_o / 2.0 - cross)
        if lo >= hi:
            return None
        cx_s = rng.uniform(lo, hi)
        cx_o = cx_s + cross
    else:
        near = rng.uniform(w_s / 2.0, 0.42 * width)
        main = rng.uniform(0.2 * width, width - w_o / 2.0 - near)
        cross = rng.uniform(-0.8, 0.8) * main
        if name == "left_of":
            cx_s, cx_o = near, near + main
        else:
            cx_s, cx_o = width - near, width - near - main
        lo = max(h_s / 2.0, h_o / 2.0 - cross)
        hi = min(height - h_s / 2.0, height - h_o / 2.0 - cross)
        if lo >= hi:
            return None
        cy_s = rng.uniform(lo, hi)
        cy_o = cy_s + cross
    return _box_from_center(cx_s, cy_s, w_s, h_s), _box_from_center(cx_o, cy_o, w_o, h_o)


def _sample_geometry(
    bucket: int, rng: np.random.Generator, width: float, height: float
) -> Tuple[BoundingBox, BoundingBox]:
    for _ in range(200):
        boxes = _try_sample_geometry(bucket, rng, width, height)
        if boxes is None:
            continue
        if spatial_bucket(*boxes) == bucket:
            return boxes
    raise RuntimeError(f"could not realize spatial bucket {SPATIAL_BUCKETS[bucket]!r}")


def generate_synthetic(spec: SyntheticSpec) -> DatasetBundle:
    """Generate a dataset whose labels follow :func:`assign_predicate`."""
    rng = np.random.default_rng(spec.seed)
    width, height = spec.image_size
    pairs: List[PairExample] = []
    sizes = {}
    for image_index in range(spec.n_images):
        image_id = f"synimg_{image_index:05d}"
        sizes[image_id] = (width, height)
        for _ in range(spec.pairs_per_image):
            bucket = int(rng.integers(len(SPATIAL_BUCKETS)))
            s_box, o_box = _sample_geometry(bucket, rng, float(width), float(height))
            s_cls = int(rng.integers(spec.n_obj))
            o_cls = int(rng.integers(spec.n_obj))
            label = assign_predicate(s_cls, o_cls, s_box, o_box, spec.n_semantic)
            if spec.label_noise > 0.0 and rng.random() < spec.label_noise:
                label = int(rng.integers(spec.n_pred))
            pairs.append(
                PairExample(
                    image_id=image_id,
                    subject=ObjectInstance(class_id=s_cls, box=s_box),
                    object=ObjectInstance(class_id=o_cls, box=o_box),
                    gt_predicates=frozenset({label}),
                )
            )
    return DatasetBundle(
        pairs=pairs, n_obj=spec.n_obj, n_pred=spec.n_pred, image_sizes=sizes
    )
