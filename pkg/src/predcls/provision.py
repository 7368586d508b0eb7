"""Data-side provisioning: which features and embeddings a run uses.

A :class:`DataConfig` captures everything needed to re-create the exact
model inputs for a dataset (provider kind and seeds, noise levels, shapes,
embedding source, mask resolution).  It is echoed into checkpoints so that
evaluation featurizes pairs exactly the way training did.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import torch

from .data.embeddings import EmbeddingTable, load_embedding_file, synthetic_table
from .data.features import FeatureShapes, PrecomputedFeatureProvider, SyntheticFeatureProvider
from .data.types import DatasetBundle
from .errors import ConfigError
from .pipeline import PairTensors, assemble_tensors

SYNTHETIC = "synthetic"


@dataclass(frozen=True)
class DataConfig:
    """Feature and embedding provisioning for one run.

    ``features`` / ``embeddings`` are either the literal ``"synthetic"``
    or a path (an ``.npz`` feature file, a text embedding file).
    """

    features: str = SYNTHETIC
    feature_seed: int = 0
    visual_dim: int = 256
    map_channels: int = 64
    map_size: int = 7
    class_signal: float = 1.0
    visual_noise: float = 1.0
    map_signal: float = 1.0
    map_noise: float = 0.5
    embeddings: str = SYNTHETIC
    embed_dim: int = 300
    embedding_seed: int = 0
    mask_resolution: int = 32


def build_feature_provider(cfg: DataConfig):
    if cfg.features == SYNTHETIC:
        return SyntheticFeatureProvider(
            shapes=FeatureShapes(cfg.visual_dim, cfg.map_channels, cfg.map_size),
            seed=cfg.feature_seed,
            class_signal=cfg.class_signal,
            visual_noise=cfg.visual_noise,
            map_signal=cfg.map_signal,
            map_noise=cfg.map_noise,
        )
    return PrecomputedFeatureProvider(cfg.features)


def build_embedding_table(
    cfg: DataConfig, n_obj: int, class_names: Optional[Sequence[str]] = None
) -> EmbeddingTable:
    if cfg.embeddings == SYNTHETIC:
        return synthetic_table(n_obj, dim=cfg.embed_dim, seed=cfg.embedding_seed)
    if class_names is None:
        raise ConfigError(
            "loading an embedding file requires the object class names "
            "(pass the objects vocabulary)"
        )
    return load_embedding_file(cfg.embeddings, class_names)


def assemble_from_config(
    bundle: DatasetBundle,
    cfg: DataConfig,
    class_names: Optional[Sequence[str]] = None,
    dtype: torch.dtype = torch.float32,
) -> PairTensors:
    provider = build_feature_provider(cfg)
    table = build_embedding_table(cfg, bundle.n_obj, class_names)
    return assemble_tensors(bundle, provider, table, cfg.mask_resolution, dtype=dtype)
