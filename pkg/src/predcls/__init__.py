"""Pair predicate classification with spatio-linguistic attention.

A library and CLI for classifying the relationship predicate of
subject-object pairs whose boxes and classes are given: a two-branch
network conditioned on pair geometry and class embeddings, a deeply
supervised training recipe that aligns the branches in score space, a
bit-exact recall_k@x evaluator, and a synthetic benchmark whose labels
follow a known generative rule.
"""

from . import ablation, data, evaluation, model, pipeline, provision, reporting, training
from .errors import (
    AnnotationParseError,
    ConfigError,
    EvaluationError,
    FeatureKeyError,
    PredclsError,
    TrainingDivergedError,
    VocabularyError,
)

__version__ = "0.1.0"

__all__ = [
    "AnnotationParseError",
    "ConfigError",
    "EvaluationError",
    "FeatureKeyError",
    "PredclsError",
    "TrainingDivergedError",
    "VocabularyError",
    "ablation",
    "data",
    "evaluation",
    "model",
    "pipeline",
    "provision",
    "reporting",
    "training",
]
