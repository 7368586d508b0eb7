import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from predcls.data.annotations import (
    load_annotations,
    load_dataset_dir,
    load_vocab,
    save_annotations,
)
from predcls.data.synthetic import SyntheticSpec, generate_synthetic, object_names, predicate_names
from predcls.data.types import BoundingBox, ObjectInstance, PairExample
from predcls.errors import AnnotationParseError, ConfigError, VocabularyError


def _write_vocab(path, names):
    path.write_text("\n".join(names) + "\n")
    return str(path)


@pytest.fixture
def vocab_paths(tmp_path):
    objects = _write_vocab(tmp_path / "objects.txt", ["person", "horse", "dog"])
    predicates = _write_vocab(tmp_path / "predicates.txt", ["on", "next to", "behind", "under"])
    return objects, predicates


def _record(predicate, s_cat, s_box_xyxy, o_cat, o_box_xyxy):
    sx1, sy1, sx2, sy2 = s_box_xyxy
    ox1, oy1, ox2, oy2 = o_box_xyxy
    return {
        "predicate": predicate,
        "subject": {"category": s_cat, "bbox": [sy1, sy2, sx1, sx2]},
        "object": {"category": o_cat, "bbox": [oy1, oy2, ox1, ox2]},
    }


def _write_annotations(tmp_path, payload, name="annotations.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


class TestLoad:
    def test_two_image_fixture_matches_hand_built_pairs(self, tmp_path, vocab_paths):
        # 3 relationships: img1 has the same pair twice with different
        # predicates (multilabel) and img2 has one more pair.
        payload = {
            "img1": [
                _record(0, 0, (10, 20, 50, 80), 1, (40, 60, 120, 140)),
                _record(2, 0, (10, 20, 50, 80), 1, (40, 60, 120, 140)),
            ],
            "img2": [_record(3, 2, (0, 0, 30, 30), 0, (5, 5, 20, 25))],
        }
        path = _write_annotations(tmp_path, payload)
        bundle = load_annotations(path, *vocab_paths)

        expected = [
            PairExample(
                image_id="img1",
                subject=ObjectInstance(0, BoundingBox(10, 20, 50, 80)),
                object=ObjectInstance(1, BoundingBox(40, 60, 120, 140)),
                gt_predicates=frozenset({0, 2}),
            ),
            PairExample(
                image_id="img2",
                subject=ObjectInstance(2, BoundingBox(0, 0, 30, 30)),
                object=ObjectInstance(0, BoundingBox(5, 5, 20, 25)),
                gt_predicates=frozenset({3}),
            ),
        ]
        assert bundle.pairs == expected
        assert bundle.n_obj == 3 and bundle.n_pred == 4
        # envelope fallback: smallest integer frame enclosing all boxes
        assert bundle.image_sizes["img1"] == (120, 140)

    def test_empty_annotations_keep_vocab_sizes(self, tmp_path, vocab_paths):
        path = _write_annotations(tmp_path, {})
        bundle = load_annotations(path, *vocab_paths)
        assert bundle.pairs == []
        assert (bundle.n_obj, bundle.n_pred) == (3, 4)

    def test_sizes_file_used_when_given(self, tmp_path, vocab_paths):
        payload = {"img1": [_record(0, 0, (0, 0, 10, 10), 1, (5, 5, 20, 20))]}
        ann = _write_annotations(tmp_path, payload)
        sizes = tmp_path / "sizes.json"
        sizes.write_text(json.dumps({"img1": [640, 480]}))
        bundle = load_annotations(ann, *vocab_paths, image_sizes_path=str(sizes))
        assert bundle.image_sizes["img1"] == (640, 480)

    def test_malformed_record_names_image(self, tmp_path, vocab_paths):
        path = _write_annotations(tmp_path, {"badimg": [{"predicate": 0, "subject": {}}]})
        with pytest.raises(AnnotationParseError, match="badimg"):
            load_annotations(path, *vocab_paths)

    def test_out_of_range_predicate(self, tmp_path, vocab_paths):
        payload = {"img": [_record(9, 0, (0, 0, 10, 10), 1, (5, 5, 20, 20))]}
        path = _write_annotations(tmp_path, payload)
        with pytest.raises(VocabularyError):
            load_annotations(path, *vocab_paths)

    def test_out_of_range_category(self, tmp_path, vocab_paths):
        payload = {"img": [_record(0, 7, (0, 0, 10, 10), 1, (5, 5, 20, 20))]}
        path = _write_annotations(tmp_path, payload)
        with pytest.raises(VocabularyError):
            load_annotations(path, *vocab_paths)

    def test_empty_vocab_rejected(self, tmp_path, vocab_paths):
        empty = tmp_path / "empty.txt"
        empty.write_text("")
        path = _write_annotations(tmp_path, {})
        with pytest.raises(ConfigError):
            load_annotations(path, str(empty), vocab_paths[1])


def test_round_trip_via_directory(tmp_path):
    spec = SyntheticSpec(n_images=12, pairs_per_image=3, n_obj=7, n_pred=24, seed=4)
    bundle = generate_synthetic(spec)
    save_annotations(
        bundle, str(tmp_path), object_names(7), predicate_names(24, 4)
    )
    reloaded = load_dataset_dir(str(tmp_path))
    assert reloaded.n_obj == bundle.n_obj
    assert reloaded.n_pred == bundle.n_pred
    assert reloaded.image_sizes == bundle.image_sizes
    assert len(reloaded.pairs) == len(bundle.pairs)
    original = {
        (p.image_id, p.subject.class_id, p.subject.box, p.object.class_id,
         p.object.box, p.gt_predicates)
        for p in bundle.pairs
    }
    restored = {
        (p.image_id, p.subject.class_id, p.subject.box, p.object.class_id,
         p.object.box, p.gt_predicates)
        for p in reloaded.pairs
    }
    assert original == restored


def test_vocab_line_index_is_id(tmp_path):
    path = _write_vocab(tmp_path / "v.txt", ["zero", "one", "two"])
    assert load_vocab(path) == ["zero", "one", "two"]


@st.composite
def multilabel_annotations(draw):
    n_images = draw(st.integers(1, 3))
    payload = {}
    flattened = []
    for i in range(n_images):
        image_id = f"im{i}"
        records = []
        n_pairs = draw(st.integers(1, 3))
        for p in range(n_pairs):
            x1, y1 = 10 * p, 5 * p
            s_box = (x1, y1, x1 + 10, y1 + 10)
            o_box = (x1 + 2, y1 + 2, x1 + 20, y1 + 22)
            predicates = draw(st.sets(st.integers(0, 3), min_size=1, max_size=3))
            for predicate in sorted(predicates):
                records.append(_record(predicate, 0, s_box, 1, o_box))
                flattened.append((image_id, p, predicate))
        payload[image_id] = records
    return payload, flattened


@given(multilabel_annotations())
@settings(max_examples=40, deadline=None)
def test_multilabel_losslessness(tmp_path_factory, data):
    # the multiset of (pair, predicate) in the file equals the flattened bundle
    payload, flattened = data
    tmp_path = tmp_path_factory.mktemp("ann")
    objects = _write_vocab(tmp_path / "objects.txt", ["a", "b"])
    predicates = _write_vocab(tmp_path / "predicates.txt", ["p0", "p1", "p2", "p3"])
    path = _write_annotations(tmp_path, payload)
    bundle = load_annotations(path, objects, predicates)

    restored = []
    index_in_image = {}
    for pair in bundle.pairs:
        idx = index_in_image.get(pair.image_id, 0)
        index_in_image[pair.image_id] = idx + 1
        for predicate in sorted(pair.gt_predicates):
            restored.append((pair.image_id, idx, predicate))
    assert sorted(restored) == sorted(flattened)
