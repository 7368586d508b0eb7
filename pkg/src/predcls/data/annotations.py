"""Annotation ingestion for the standard pair-relationship JSON layout.

The annotation file maps ``image_id`` to a list of relationship records::

    {"<image_id>": [
        {"predicate": 3,
         "subject": {"category": 12, "bbox": [y1, y2, x1, x2]},
         "object":  {"category": 5,  "bbox": [y1, y2, x1, x2]}},
        ...
    ]}

``bbox`` uses the [ymin, ymax, xmin, xmax] component order common to this
annotation family.  Vocabulary files carry one name per line, the line
index being the class id.  Image sizes come from an optional JSON file
``{"<image_id>": [width, height]}``; absent that, each image's size
defaults to the smallest integer frame enclosing all of its boxes.

Multiple records for the same (subject box+class, object box+class) pair
are merged into one :class:`PairExample` with a multilabel predicate set.
"""

from __future__ import annotations

import json
import math
import os
from typing import Dict, List, Optional, Sequence, Tuple

from ..errors import AnnotationParseError, ConfigError, VocabularyError
from .types import BoundingBox, DatasetBundle, ObjectInstance, PairExample

ANNOTATIONS_FILENAME = "annotations.json"
OBJECTS_VOCAB_FILENAME = "objects.txt"
PREDICATES_VOCAB_FILENAME = "predicates.txt"
IMAGE_SIZES_FILENAME = "image_sizes.json"


def load_vocab(path: str) -> List[str]:
    """One name per line; the line index is the id."""
    with open(path, "r", encoding="utf-8") as fh:
        names = [line.rstrip("\n") for line in fh]
    names = [n for n in names if n]
    if not names:
        raise ConfigError(f"vocabulary file {path} is empty")
    return names


def _parse_entity(record: dict, role: str, image_id: str, n_obj: int) -> ObjectInstance:
    try:
        entity = record[role]
        category = entity["category"]
        y1, y2, x1, x2 = entity["bbox"]
    except (KeyError, TypeError, ValueError):
        raise AnnotationParseError(
            f"malformed {role} record in image {image_id!r}"
        ) from None
    if not isinstance(category, int):
        raise AnnotationParseError(f"non-integer {role} category in image {image_id!r}")
    if not 0 <= category < n_obj:
        raise VocabularyError(
            f"{role} category {category} out of range [0, {n_obj}) in image {image_id!r}"
        )
    try:
        box = BoundingBox(float(x1), float(y1), float(x2), float(y2))
    except (ConfigError, TypeError, ValueError):
        raise AnnotationParseError(
            f"invalid {role} bbox {entity.get('bbox')!r} in image {image_id!r}"
        ) from None
    return ObjectInstance(class_id=category, box=box)


def load_annotations(
    annotations_path: str,
    objects_vocab_path: str,
    predicates_vocab_path: str,
    image_sizes_path: Optional[str] = None,
) -> DatasetBundle:
    """Parse annotations against the vocabularies into a :class:`DatasetBundle`."""
    object_names = load_vocab(objects_vocab_path)
    predicate_names = load_vocab(predicates_vocab_path)
    n_obj, n_pred = len(object_names), len(predicate_names)

    with open(annotations_path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict):
        raise AnnotationParseError("annotation file must map image ids to record lists")

    sizes: Dict[str, Tuple[int, int]] = {}
    if image_sizes_path is not None:
        with open(image_sizes_path, "r", encoding="utf-8") as fh:
            for image_id, wh in json.load(fh).items():
                sizes[str(image_id)] = (int(wh[0]), int(wh[1]))

    pairs: List[PairExample] = []
    order: List[Tuple] = []
    multilabels: Dict[Tuple, set] = {}
    entities: Dict[Tuple, Tuple[ObjectInstance, ObjectInstance, str]] = {}

    for image_id, records in raw.items():
        image_id = str(image_id)
        if not isinstance(records, list):
            raise AnnotationParseError(f"records for image {image_id!r} are not a list")
        for record in records:
            if not isinstance(record, dict) or "predicate" not in record:
                raise AnnotationParseError(f"malformed record in image {image_id!r}")
            predicate = record["predicate"]
            if not isinstance(predicate, int):
                raise AnnotationParseError(f"non-integer predicate in image {image_id!r}")
            if not 0 <= predicate < n_pred:
                raise VocabularyError(
                    f"predicate {predicate} out of range [0, {n_pred}) in image {image_id!r}"
                )
            subject = _parse_entity(record, "subject", image_id, n_obj)
            obj = _parse_entity(record, "object", image_id, n_obj)
            key = (
                image_id,
                subject.class_id,
                (subject.box.x1, subject.box.y1, subject.box.x2, subject.box.y2),
                obj.class_id,
                (obj.box.x1, obj.box.y1, obj.box.x2, obj.box.y2),
            )
            if key not in multilabels:
                order.append(key)
                multilabels[key] = set()
                entities[key] = (subject, obj, image_id)
            multilabels[key].add(predicate)

    for key in order:
        subject, obj, image_id = entities[key]
        pairs.append(
            PairExample(
                image_id=image_id,
                subject=subject,
                object=obj,
                gt_predicates=frozenset(multilabels[key]),
            )
        )

    # Fall back to the box envelope for images without a recorded size.
    envelopes: Dict[str, Tuple[int, int]] = {}
    for pair in pairs:
        if pair.image_id in sizes:
            continue
        w, h = envelopes.get(pair.image_id, (0, 0))
        w = max(w, math.ceil(pair.subject.box.x2), math.ceil(pair.object.box.x2))
        h = max(h, math.ceil(pair.subject.box.y2), math.ceil(pair.object.box.y2))
        envelopes[pair.image_id] = (w, h)
    sizes.update(envelopes)

    return DatasetBundle(pairs=pairs, n_obj=n_obj, n_pred=n_pred, image_sizes=sizes)


def save_annotations(
    bundle: DatasetBundle,
    directory: str,
    object_names: Sequence[str],
    predicate_names: Sequence[str],
) -> Dict[str, str]:
    """Write a bundle back out in the layout :func:`load_annotations` reads.

    Returns the paths written, keyed by role.
    """
    if len(object_names) != bundle.n_obj or len(predicate_names) != bundle.n_pred:
        raise ConfigError("vocabulary names must match the bundle's vocabulary sizes")
    os.makedirs(directory, exist_ok=True)

    raw: Dict[str, list] = {}
    for pair in bundle.pairs:
        records = raw.setdefault(pair.image_id, [])
        for predicate in sorted(pair.gt_predicates):
            records.append(
                {
                    "predicate": predicate,
                    "subject": {
                        "category": pair.subject.class_id,
                        "bbox": [
                            pair.subject.box.y1,
                            pair.subject.box.y2,
                            pair.subject.box.x1,
                            pair.subject.box.x2,
                        ],
                    },
                    "object": {
                        "category": pair.object.class_id,
                        "bbox": [
                            pair.object.box.y1,
                            pair.object.box.y2,
                            pair.object.box.x1,
                            pair.object.box.x2,
                        ],
                    },
                }
            )

    paths = {
        "annotations": os.path.join(directory, ANNOTATIONS_FILENAME),
        "objects_vocab": os.path.join(directory, OBJECTS_VOCAB_FILENAME),
        "predicates_vocab": os.path.join(directory, PREDICATES_VOCAB_FILENAME),
        "image_sizes": os.path.join(directory, IMAGE_SIZES_FILENAME),
    }
    with open(paths["annotations"], "w", encoding="utf-8") as fh:
        json.dump(raw, fh, indent=1, sort_keys=True)
    with open(paths["objects_vocab"], "w", encoding="utf-8") as fh:
        fh.write("\n".join(object_names) + "\n")
    with open(paths["predicates_vocab"], "w", encoding="utf-8") as fh:
        fh.write("\n".join(predicate_names) + "\n")
    with open(paths["image_sizes"], "w", encoding="utf-8") as fh:
        json.dump(
            {k: list(v) for k, v in sorted(bundle.image_sizes.items())}, fh, indent=1
        )
    return paths


def load_dataset_dir(directory: str) -> DatasetBundle:
    """Load a dataset directory produced by :func:`save_annotations`."""
    sizes_path = os.path.join(directory, IMAGE_SIZES_FILENAME)
    return load_annotations(
        os.path.join(directory, ANNOTATIONS_FILENAME),
        os.path.join(directory, OBJECTS_VOCAB_FILENAME),
        os.path.join(directory, PREDICATES_VOCAB_FILENAME),
        sizes_path if os.path.exists(sizes_path) else None,
    )
