import torch

from predcls.data.embeddings import synthetic_table
from predcls.data.features import FeatureShapes, SyntheticFeatureProvider
from predcls.data.synthetic import SyntheticSpec, generate_synthetic
from predcls.pipeline import assemble_tensors


def _assembled(n_images=5, seed=0):
    bundle = generate_synthetic(
        SyntheticSpec(n_images=n_images, pairs_per_image=3, n_obj=5, n_pred=24, seed=seed)
    )
    provider = SyntheticFeatureProvider(shapes=FeatureShapes(12, 6, 5), seed=1)
    table = synthetic_table(5, dim=16, seed=2)
    return bundle, assemble_tensors(bundle, provider, table, mask_resolution=16)


def test_shapes_and_bookkeeping():
    bundle, tensors = _assembled()
    n = len(bundle.pairs)
    assert tensors.masks.shape == (n, 2, 16, 16)
    assert tensors.subject_emb.shape == (n, 16)
    assert tensors.x_s.shape == (n, 12)
    assert tensors.x_p.shape == (n, 6, 5, 5)
    assert tensors.n_pred == 24
    assert tensors.pair_indices[:6] == [0, 1, 2, 0, 1, 2]


def test_groundtruth_grouping_matches_bundle():
    bundle, tensors = _assembled()
    grouped = tensors.groundtruth()
    by_image = bundle.pairs_by_image()
    assert set(grouped) == set(by_image)
    for image_id, sets in grouped.items():
        assert sets == [p.gt_predicates for p in by_image[image_id]]


def test_subset_renumbers_pairs_per_image():
    _, tensors = _assembled()
    sub = tensors.subset([0, 2, 3, 7])
    assert sub.image_ids == [tensors.image_ids[i] for i in (0, 2, 3, 7)]
    # indices restart per image within the subset
    assert sub.pair_indices == [0, 1, 0, 0]
    assert torch.equal(sub.x_s[1], tensors.x_s[2])
    assert len(sub) == 4


def test_assembly_is_deterministic():
    _, a = _assembled(seed=3)
    _, b = _assembled(seed=3)
    assert torch.equal(a.masks, b.masks)
    assert torch.equal(a.x_p, b.x_p)
    assert torch.equal(a.subject_emb, b.subject_emb)
