import numpy as np
import pytest
import torch
import torch.nn.functional as F

from predcls.model.branches import (
    AttentionalPooling,
    HypernetClassifier,
    ObjectSubjectBranch,
    PredicateBranch,
)

from fdcheck import check_gradients


class TestAttentionalPooling:
    def test_zero_query_gives_spatial_mean(self):
        pooling = AttentionalPooling(attn_dim=4, map_channels=6)
        with torch.no_grad():
            pooling.query.weight.zero_()
            pooling.query.bias.zero_()
        x_p = torch.randn(3, 6, 5, 5)
        out = pooling(x_p, torch.randn(3, 4))
        assert torch.allclose(out, x_p.mean(dim=(2, 3)), atol=1e-6)

    def test_weights_sum_to_one(self):
        torch.manual_seed(0)
        pooling = AttentionalPooling(attn_dim=4, map_channels=6, generator_std=0.5)
        alpha = pooling.attention_weights(torch.randn(4, 6, 5, 5), torch.randn(4, 4))
        assert torch.allclose(alpha.sum(dim=(1, 2)), torch.ones(4), atol=1e-6)
        assert (alpha >= 0).all()

    def test_hand_softmax_oracle(self):
        # 2 channels, 2x2 map, hand-set query; oracle is an independent
        # numpy softmax over the four locations.
        pooling = AttentionalPooling(attn_dim=2, map_channels=2)
        with torch.no_grad():
            pooling.query.weight.copy_(torch.tensor([[1.0, 0.0], [0.0, 1.0]]))
            pooling.query.bias.zero_()
        a = torch.tensor([[0.5, -1.0]])
        x_p = torch.tensor(
            [[[[1.0, 2.0], [0.0, -1.0]], [[0.5, 0.0], [2.0, 1.0]]]]
        )  # (1, 2, 2, 2)

        q = np.array([0.5, -1.0])
        features = x_p[0].numpy().reshape(2, 4)  # channel x location
        logits = q @ features
        weights = np.exp(logits - logits.max())
        weights /= weights.sum()
        expected = features @ weights

        out = pooling(x_p, a).detach()
        assert np.allclose(out[0].numpy(), expected, atol=1e-6)

    def test_output_in_convex_hull(self):
        torch.manual_seed(1)
        pooling = AttentionalPooling(attn_dim=3, map_channels=5, generator_std=0.8)
        x_p = torch.randn(6, 5, 4, 4)
        a = torch.randn(6, 3)
        alpha = pooling.attention_weights(x_p, a)
        out = pooling(x_p, a)
        manual = torch.einsum("bhw,bchw->bc", alpha, x_p)
        assert torch.allclose(out, manual, atol=1e-6)
        per_channel = x_p.flatten(2)
        assert (out <= per_channel.max(dim=2).values + 1e-6).all()
        assert (out >= per_channel.min(dim=2).values - 1e-6).all()

    def test_shape_mismatch(self):
        pooling = AttentionalPooling(attn_dim=3, map_channels=5)
        with pytest.raises(ValueError):
            pooling(torch.randn(1, 4, 3, 3), torch.randn(1, 3))

    def test_gradients_match_finite_differences(self):
        torch.manual_seed(2)
        pooling = AttentionalPooling(
            attn_dim=3, map_channels=4, generator_std=0.5, dtype=torch.float64
        )
        x_p = torch.randn(2, 4, 3, 3, dtype=torch.float64)
        a = torch.randn(2, 3, dtype=torch.float64)
        probe = torch.randn(4, dtype=torch.float64)
        check_gradients(
            lambda: (pooling(x_p, a) * probe).sum(),
            pooling.named_parameters(),
        )


class TestHypernetClassifier:
    def test_degenerate_classifier_returns_bias(self):
        clf = HypernetClassifier(in_dim=5, n_classes=4, attn_dim=3, rank=2)
        with torch.no_grad():
            clf.base_weight.zero_()
            clf.generator.weight.zero_()
            clf.generator.bias.zero_()
            clf.bias.copy_(torch.tensor([1.0, -2.0, 0.5, 3.0]))
        scores = clf(torch.randn(4, 5), torch.randn(4, 3))
        assert torch.allclose(scores, clf.bias.expand(4, 4), atol=1e-7)

    def test_hand_contraction_oracle(self):
        # d_f=3, n_pred=2, d_a=2, r=1; W(a) = W0 + U(a) V(a)^T worked by hand.
        clf = HypernetClassifier(in_dim=3, n_classes=2, attn_dim=2, rank=1)
        with torch.no_grad():
            clf.generator.weight.copy_(
                torch.tensor([[1.0, 0], [0, 1], [1, 1], [2, 0], [0, 3]])
            )
            clf.generator.bias.copy_(torch.tensor([0.5, 0.0, 0.0, 0.0, 1.0]))
            clf.base_weight.copy_(torch.tensor([[1.0, 0], [0, 1], [1, 1]]))
            clf.bias.copy_(torch.tensor([0.1, -0.1]))
        scores = clf(torch.tensor([[1.0, 2.0, 3.0]]), torch.tensor([[1.0, -1.0]]))
        assert torch.allclose(scores, torch.tensor([[3.1, 5.9]]), atol=1e-5)

    def test_weight_for_matches_forward(self):
        torch.manual_seed(3)
        clf = HypernetClassifier(in_dim=4, n_classes=3, attn_dim=2, rank=2,
                                 generator_std=0.4, dtype=torch.float64)
        f = torch.randn(5, 4, dtype=torch.float64)
        a = torch.randn(5, 2, dtype=torch.float64)
        explicit = torch.einsum("bi,bic->bc", f, clf.weight_for(a)) + clf.bias
        assert torch.allclose(clf(f, a), explicit, atol=1e-10)

    def test_linear_in_features_for_fixed_conditioning(self):
        torch.manual_seed(4)
        clf = HypernetClassifier(in_dim=4, n_classes=3, attn_dim=2, rank=2,
                                 generator_std=0.4, dtype=torch.float64)
        a = torch.randn(1, 2, dtype=torch.float64)
        f1 = torch.randn(1, 4, dtype=torch.float64)
        f2 = torch.randn(1, 4, dtype=torch.float64)
        additivity = clf(f1 + f2, a) - (clf(f1, a) + clf(f2, a) - clf.bias)
        assert additivity.abs().max() < 1e-9
        homogeneity = clf(2.5 * f1, a) - (2.5 * (clf(f1, a) - clf.bias) + clf.bias)
        assert homogeneity.abs().max() < 1e-9

    def test_rank_validated(self):
        with pytest.raises(ValueError):
            HypernetClassifier(in_dim=4, n_classes=3, attn_dim=2, rank=0)


class TestPredicateBranch:
    def test_output_length_matches_vocabulary(self):
        branch = PredicateBranch(map_channels=8, feat_dim=6, n_pred=70, attn_dim=4)
        scores = branch(torch.randn(2, 8, 3, 3), torch.randn(2, 4))
        assert scores.shape == (2, 70)

    def test_encode_zero_input_zero_bias(self):
        branch = PredicateBranch(map_channels=8, feat_dim=6, n_pred=5, attn_dim=4)
        with torch.no_grad():
            branch.encoder.bias.zero_()
        assert torch.equal(branch.encode(torch.zeros(2, 8)), torch.zeros(2, 6))

    def test_deterministic(self):
        branch = PredicateBranch(map_channels=8, feat_dim=6, n_pred=5, attn_dim=4)
        x_p, a = torch.randn(2, 8, 3, 3), torch.randn(2, 4)
        assert torch.equal(branch(x_p, a), branch(x_p, a))

    def test_full_branch_gradients(self):
        torch.manual_seed(5)
        branch = PredicateBranch(
            map_channels=5, feat_dim=4, n_pred=3, attn_dim=2, rank=2, dtype=torch.float64
        )
        with torch.no_grad():  # give the conditioning path non-trivial weights
            for layer in (branch.pooling.query, branch.classifier.generator):
                torch.nn.init.normal_(layer.weight, std=0.4)
                torch.nn.init.normal_(layer.bias, std=0.2)
        x_p = torch.randn(3, 5, 3, 3, dtype=torch.float64)
        a = torch.randn(3, 2, dtype=torch.float64)
        targets = torch.tensor([0, 2, 1])
        check_gradients(
            lambda: F.cross_entropy(branch(x_p, a), targets),
            branch.named_parameters(),
        )


class TestObjectSubjectBranch:
    def _branch(self, dtype=torch.float32):
        return ObjectSubjectBranch(
            visual_dim=6, feat_dim=4, n_pred=3, attn_dim=2, rank=2, dtype=dtype
        )

    def test_encoders_zero_input_zero_bias(self):
        branch = self._branch()
        with torch.no_grad():
            branch.subject_encoder.bias.zero_()
            branch.object_encoder.bias.zero_()
        assert torch.equal(branch.encode_subject(torch.zeros(1, 6)), torch.zeros(1, 4))
        assert torch.equal(branch.encode_object(torch.zeros(1, 6)), torch.zeros(1, 4))

    def test_encoders_use_distinct_parameters(self):
        torch.manual_seed(6)
        branch = self._branch()
        x = torch.randn(1, 6)
        assert not torch.allclose(branch.encode_subject(x), branch.encode_object(x))

    def test_equal_encodings_give_bias(self):
        torch.manual_seed(7)
        branch = self._branch()
        f = torch.relu(torch.randn(2, 4))
        a = torch.randn(2, 2)
        scores = branch.scores_from_encoded(f, f, a)
        assert torch.allclose(scores, branch.classifier.bias.expand(2, 3), atol=1e-6)

    def test_swap_negates_scores_with_zero_bias(self):
        torch.manual_seed(8)
        branch = self._branch(dtype=torch.float64)
        with torch.no_grad():
            branch.classifier.bias.zero_()
            torch.nn.init.normal_(branch.classifier.generator.weight, std=0.4)
        f_o = torch.randn(2, 4, dtype=torch.float64)
        f_s = torch.randn(2, 4, dtype=torch.float64)
        a = torch.randn(2, 2, dtype=torch.float64)
        forward = branch.scores_from_encoded(f_o, f_s, a)
        backward = branch.scores_from_encoded(f_s, f_o, a)
        assert torch.allclose(forward, -backward, atol=1e-9)

    def test_bias_centered_antisymmetry(self):
        torch.manual_seed(9)
        branch = self._branch(dtype=torch.float64)
        with torch.no_grad():
            torch.nn.init.normal_(branch.classifier.generator.weight, std=0.4)
            torch.nn.init.normal_(branch.classifier.bias, std=1.0)
        f_o = torch.randn(2, 4, dtype=torch.float64)
        f_s = torch.randn(2, 4, dtype=torch.float64)
        a = torch.randn(2, 2, dtype=torch.float64)
        total = branch.scores_from_encoded(f_o, f_s, a) + branch.scores_from_encoded(f_s, f_o, a)
        assert torch.allclose(total, 2.0 * branch.classifier.bias.expand(2, 3), atol=1e-9)

    def test_depends_only_on_difference(self):
        torch.manual_seed(10)
        branch = self._branch(dtype=torch.float64)
        f_o = torch.randn(2, 4, dtype=torch.float64)
        f_s = torch.randn(2, 4, dtype=torch.float64)
        shift = torch.randn(2, 4, dtype=torch.float64)
        a = torch.randn(2, 2, dtype=torch.float64)
        base = branch.scores_from_encoded(f_o, f_s, a)
        shifted = branch.scores_from_encoded(f_o + shift, f_s + shift, a)
        assert torch.allclose(base, shifted, atol=1e-9)

    def test_hand_contraction_oracle(self):
        # d_f=2, n_pred=2, d_a=1, r=1; worked by hand: scores = [-10, -5].
        branch = ObjectSubjectBranch(visual_dim=3, feat_dim=2, n_pred=2, attn_dim=1, rank=1)
        clf = branch.classifier
        with torch.no_grad():
            clf.generator.weight.copy_(torch.tensor([[1.0], [2.0], [3.0], [0.0]]))
            clf.generator.bias.copy_(torch.tensor([0.0, 0.0, 0.0, 1.0]))
            clf.base_weight.copy_(torch.tensor([[1.0, 0.0], [0.0, 2.0]]))
            clf.bias.copy_(torch.tensor([1.0, -1.0]))
        scores = branch.scores_from_encoded(
            torch.tensor([[2.0, 0.0]]), torch.tensor([[1.0, 1.0]]), torch.tensor([[2.0]])
        )
        assert torch.allclose(scores, torch.tensor([[-10.0, -5.0]]), atol=1e-5)

    def test_full_branch_gradients(self):
        torch.manual_seed(11)
        branch = self._branch(dtype=torch.float64)
        with torch.no_grad():
            torch.nn.init.normal_(branch.classifier.generator.weight, std=0.4)
            torch.nn.init.normal_(branch.classifier.generator.bias, std=0.2)
        x_s = torch.randn(3, 6, dtype=torch.float64)
        x_o = torch.randn(3, 6, dtype=torch.float64)
        a = torch.randn(3, 2, dtype=torch.float64)
        targets = torch.tensor([2, 0, 1])
        check_gradients(
            lambda: F.cross_entropy(branch(x_s, x_o, a), targets),
            branch.named_parameters(),
        )
