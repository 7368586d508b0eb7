import numpy as np
import pytest

from predcls.data.embeddings import (
    SOURCE_FILE,
    SOURCE_SYNTHETIC,
    EmbeddingTable,
    load_embedding_file,
    synthetic_table,
)
from predcls.errors import ConfigError, VocabularyError


def test_lookup_is_deterministic():
    table = synthetic_table(5, dim=16, seed=3)
    first = table.lookup(2)
    second = table.lookup(2)
    assert np.array_equal(first, second)


def test_default_dimension_is_300():
    table = synthetic_table(3, seed=0)
    assert table.lookup(0).shape == (300,)
    assert table.dim == 300


def test_same_seed_same_table():
    a = synthetic_table(8, dim=32, seed=7)
    b = synthetic_table(8, dim=32, seed=7)
    assert all(np.array_equal(a.lookup(i), b.lookup(i)) for i in range(8))
    assert a.source == SOURCE_SYNTHETIC


def test_different_seed_different_table():
    a = synthetic_table(4, dim=32, seed=1)
    b = synthetic_table(4, dim=32, seed=2)
    assert not np.array_equal(a.lookup(0), b.lookup(0))


def test_vectors_unit_norm():
    table = synthetic_table(6, dim=64, seed=0)
    for i in range(6):
        assert np.linalg.norm(table.lookup(i)) == pytest.approx(1.0)


def test_unknown_class_raises():
    table = synthetic_table(3, dim=8, seed=0)
    with pytest.raises(VocabularyError):
        table.lookup(3)


def test_inconsistent_dims_rejected():
    with pytest.raises(ConfigError):
        EmbeddingTable(
            vectors={0: np.zeros(4), 1: np.zeros(5)}, source=SOURCE_SYNTHETIC
        )


class TestFileLoading:
    def _write(self, tmp_path, lines):
        path = tmp_path / "vectors.txt"
        path.write_text("\n".join(lines) + "\n")
        return str(path)

    def test_single_and_multiword_names(self, tmp_path):
        path = self._write(
            tmp_path,
            ["cat 1.0 2.0 3.0", "traffic 0.0 2.0 4.0", "light 2.0 0.0 0.0"],
        )
        table = load_embedding_file(path, ["cat", "traffic light"])
        assert table.source == SOURCE_FILE
        assert np.allclose(table.lookup(0), [1.0, 2.0, 3.0])
        # multi-word class names average their token vectors
        assert np.allclose(table.lookup(1), [1.0, 1.0, 2.0])

    def test_missing_token_raises(self, tmp_path):
        path = self._write(tmp_path, ["cat 1.0 2.0"])
        with pytest.raises(VocabularyError, match="dog"):
            load_embedding_file(path, ["cat", "dog"])

    def test_ragged_file_rejected(self, tmp_path):
        path = self._write(tmp_path, ["cat 1.0 2.0", "dog 1.0"])
        with pytest.raises(ConfigError):
            load_embedding_file(path, ["cat", "dog"])
