"""Word-embedding table keyed by object class id.

Two construction routes: loading a plain-text embedding file against the
class-name vocabulary, or a seeded pseudo-random table so everything runs
without downloading anything.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Sequence

import numpy as np

from ..errors import ConfigError, VocabularyError
from ..seeding import rng_from

SOURCE_SYNTHETIC = "synthetic-seeded"
SOURCE_FILE = "loaded-from-file"


@dataclass
class EmbeddingTable:
    """Immutable map class_id -> embedding vector, all of one dimension."""

    vectors: Dict[int, np.ndarray]
    source: str

    def __post_init__(self) -> None:
        if not self.vectors:
            raise ConfigError("embedding table is empty")
        dims = {v.shape for v in self.vectors.values()}
        if len(dims) != 1 or next(iter(dims))[0] < 1:
            raise ConfigError(f"embedding vectors must share one dimension, got shapes {dims}")
        for class_id, vec in self.vectors.items():
            if not np.isfinite(vec).all():
                raise ConfigError(f"embedding for class {class_id} contains non-finite values")
            vec.setflags(write=False)

    @property
    def dim(self) -> int:
        return int(next(iter(self.vectors.values())).shape[0])

    def lookup(self, class_id: int) -> np.ndarray:
        try:
            return self.vectors[class_id]
        except KeyError:
            raise VocabularyError(f"no embedding for class id {class_id}") from None

    def __contains__(self, class_id: int) -> bool:
        return class_id in self.vectors

    def __len__(self) -> int:
        return len(self.vectors)


def synthetic_table(n_classes: int, dim: int = 300, seed: int = 0) -> EmbeddingTable:
    """Unit-normalized pseudo-random embeddings, identical for identical seeds."""
    if n_classes < 1 or dim < 1:
        raise ConfigError("n_classes and dim must be positive")
    rng = rng_from(seed, "embedding-table", n_classes, dim)
    matrix = rng.standard_normal((n_classes, dim))
    matrix /= np.linalg.norm(matrix, axis=1, keepdims=True)
    vectors = {i: matrix[i].copy() for i in range(n_classes)}
    return EmbeddingTable(vectors=vectors, source=SOURCE_SYNTHETIC)


def load_embedding_file(path: str, class_names: Sequence[str]) -> EmbeddingTable:
    """Build a table from a text file of ``token v1 ... v_d`` lines.

    Multi-word class names average their token vectors.  Every token of
    every class name must be present in the file.
    """
    token_vectors: Dict[str, np.ndarray] = {}
    dim = None
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts:
                continue
            token, values = parts[0], parts[1:]
            try:
                vec = np.asarray([float(v) for v in values], dtype=np.float64)
            except ValueError:
                raise ConfigError(f"{path}:{line_no}: non-numeric embedding entry") from None
            if dim is None:
                dim = vec.shape[0]
            elif vec.shape[0] != dim:
                raise ConfigError(
                    f"{path}:{line_no}: expected {dim} values for {token!r}, got {vec.shape[0]}"
                )
            token_vectors[token] = vec
    if dim is None:
        raise ConfigError(f"{path}: no embedding lines found")

    vectors: Dict[int, np.ndarray] = {}
    for class_id, name in enumerate(class_names):
        tokens = name.split()
        missing = [t for t in tokens if t not in token_vectors]
        if missing:
            raise VocabularyError(
                f"class {name!r} (id {class_id}) has tokens missing from {path}: {missing}"
            )
        vectors[class_id] = np.mean([token_vectors[t] for t in tokens], axis=0)
    return EmbeddingTable(vectors=vectors, source=SOURCE_FILE)
