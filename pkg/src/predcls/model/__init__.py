"""Network modules: conditioning, branches, fusion and the training objective."""

from .branches import AttentionalPooling, HypernetClassifier, ObjectSubjectBranch, PredicateBranch
from .losses import LossWeights, supervised_heads, total_loss
from .network import BRANCH_MODES, ModelConfig, PairPredicateNet, Scores
from .sla import ATTENTION_MODES, LanguageEncoder, MaskEncoder, SpatioLinguisticAttention

__all__ = [
    "ATTENTION_MODES",
    "AttentionalPooling",
    "BRANCH_MODES",
    "HypernetClassifier",
    "LanguageEncoder",
    "LossWeights",
    "MaskEncoder",
    "ModelConfig",
    "ObjectSubjectBranch",
    "PairPredicateNet",
    "PredicateBranch",
    "Scores",
    "SpatioLinguisticAttention",
    "supervised_heads",
    "total_loss",
]
