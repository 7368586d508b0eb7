import numpy as np
import pytest

from predcls.data.features import (
    FeatureShapes,
    PrecomputedFeatureProvider,
    SyntheticFeatureProvider,
    pair_key,
    write_feature_file,
)
from predcls.errors import FeatureKeyError

from conftest import make_pair


def test_same_pair_same_seed_identical():
    provider = SyntheticFeatureProvider(seed=5)
    pair = make_pair()
    a = provider.features_for(pair)
    b = provider.features_for(pair)
    assert np.array_equal(a.x_s, b.x_s)
    assert np.array_equal(a.x_o, b.x_o)
    assert np.array_equal(a.x_p, b.x_p)


def test_fresh_provider_reproduces():
    pair = make_pair()
    a = SyntheticFeatureProvider(seed=5).features_for(pair)
    b = SyntheticFeatureProvider(seed=5).features_for(pair)
    assert np.array_equal(a.x_p, b.x_p)


def test_default_shapes():
    bundle = SyntheticFeatureProvider().features_for(make_pair())
    assert bundle.x_s.shape == (256,)
    assert bundle.x_o.shape == (256,)
    assert bundle.x_p.shape == (64, 7, 7)


def test_configured_shapes():
    provider = SyntheticFeatureProvider(shapes=FeatureShapes(32, 8, 5))
    bundle = provider.features_for(make_pair())
    assert bundle.x_s.shape == (32,)
    assert bundle.x_p.shape == (8, 5, 5)


def test_different_pairs_differ():
    provider = SyntheticFeatureProvider(seed=0)
    a = provider.features_for(make_pair(s_cls=0))
    b = provider.features_for(make_pair(s_cls=1))
    assert not np.array_equal(a.x_s, b.x_s)


def test_same_class_shares_prototype_direction():
    # Two pairs with the same subject class: x_s differs only by noise, so
    # correlation with the shared prototype should dominate.
    provider = SyntheticFeatureProvider(seed=0, visual_noise=0.1)
    a = provider.features_for(make_pair(image_id="a", s_cls=3))
    b = provider.features_for(make_pair(image_id="b", s_cls=3))
    cos = np.dot(a.x_s, b.x_s) / (np.linalg.norm(a.x_s) * np.linalg.norm(b.x_s))
    assert cos > 0.9


def test_pair_key_distinguishes_geometry():
    assert pair_key(make_pair()) != pair_key(make_pair(s_box=(10.0, 10.0, 50.0, 61.0)))


class TestPrecomputed:
    def test_round_trip(self, tmp_path):
        pairs = [make_pair(image_id=f"img{i}", predicates=(i,)) for i in range(3)]
        provider = SyntheticFeatureProvider(seed=2, shapes=FeatureShapes(16, 4, 5))
        path = str(tmp_path / "features.npz")
        write_feature_file(path, pairs, provider)
        loaded = PrecomputedFeatureProvider(path)
        for pair in pairs:
            expected = provider.features_for(pair)
            actual = loaded.features_for(pair)
            assert np.array_equal(expected.x_s, actual.x_s)
            assert np.array_equal(expected.x_o, actual.x_o)
            assert np.array_equal(expected.x_p, actual.x_p)

    def test_missing_pair_names_it(self, tmp_path):
        path = str(tmp_path / "features.npz")
        write_feature_file(path, [make_pair(image_id="known")], SyntheticFeatureProvider())
        loaded = PrecomputedFeatureProvider(path)
        with pytest.raises(FeatureKeyError, match="unknown"):
            loaded.features_for(make_pair(image_id="unknown"))
