"""Domain types, annotation ingestion, masks, embeddings and feature providers."""

from .annotations import (
    load_annotations,
    load_dataset_dir,
    load_vocab,
    save_annotations,
)
from .embeddings import EmbeddingTable, load_embedding_file, synthetic_table
from .features import (
    FeatureShapes,
    PrecomputedFeatureProvider,
    SyntheticFeatureProvider,
    pair_key,
    write_feature_file,
)
from .masks import rasterize_masks
from .synthetic import (
    SPATIAL_BUCKETS,
    SyntheticSpec,
    assign_predicate,
    generate_synthetic,
    object_names,
    predicate_names,
    spatial_bucket,
)
from .types import (
    BoundingBox,
    DatasetBundle,
    FeatureBundle,
    MaskPair,
    ObjectInstance,
    PairExample,
)

__all__ = [
    "BoundingBox",
    "DatasetBundle",
    "EmbeddingTable",
    "FeatureBundle",
    "FeatureShapes",
    "MaskPair",
    "ObjectInstance",
    "PairExample",
    "PrecomputedFeatureProvider",
    "SPATIAL_BUCKETS",
    "SyntheticFeatureProvider",
    "SyntheticSpec",
    "assign_predicate",
    "generate_synthetic",
    "load_annotations",
    "load_dataset_dir",
    "load_embedding_file",
    "load_vocab",
    "object_names",
    "pair_key",
    "predicate_names",
    "rasterize_masks",
    "save_annotations",
    "spatial_bucket",
    "synthetic_table",
    "write_feature_file",
]
