"""Embedding store, distance search, and binary file format."""

import json
import struct

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from toponav.embeddings import (
    FORMAT_VERSION,
    MAGIC,
    EmbeddingStore,
    RowMeta,
    as_embedding,
    distance_profile,
    l2_distance,
    nn_search,
    read_embedding_file,
    sidecar_path,
    write_embedding_file,
)
from toponav.errors import (
    BadMagicError,
    CountMismatchError,
    DimensionMismatchError,
    EmptyStoreError,
    SidecarMismatchError,
    UnsupportedVersionError,
)


def reference_l2(a, b):
    """Textbook Euclidean distance, written independently of the library."""
    total = 0.0
    for x, y in zip(a, b):
        total += (float(x) - float(y)) ** 2
    return total ** 0.5


class TestStoreBasics:
    def test_from_rows_preserves_order_and_dim(self):
        rows = [np.arange(4, dtype=float), np.ones(4), np.zeros(4)]
        store = EmbeddingStore.from_rows(rows)
        assert store.count == 3
        assert store.dim == 4
        assert len(store) == 3
        np.testing.assert_array_equal(store.vector(0), np.arange(4, dtype=float))

    def test_empty_store_rejected(self):
        with pytest.raises(EmptyStoreError):
            EmbeddingStore.from_rows([])

    def test_mixed_dims_rejected(self):
        with pytest.raises(DimensionMismatchError):
            EmbeddingStore.from_rows([np.ones(3), np.ones(4)])

    def test_matrix_is_read_only(self):
        store = EmbeddingStore.from_rows([np.ones(2), np.zeros(2)])
        with pytest.raises(ValueError):
            store.matrix[0, 0] = 5.0

    def test_non_finite_rows_rejected(self):
        with pytest.raises(ValueError):
            as_embedding([1.0, np.nan])
        with pytest.raises(ValueError):
            EmbeddingStore(np.array([[np.inf, 0.0]]))


class TestDistances:
    def test_l2_matches_reference(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            a = rng.normal(size=6)
            b = rng.normal(size=6)
            assert l2_distance(a, b) == pytest.approx(reference_l2(a, b), rel=1e-12)

    def test_l2_shape_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            l2_distance(np.ones(3), np.ones(4))

    def test_profile_agrees_with_pairwise_calls(self):
        # Batched and one-at-a-time paths share the summation order, so the
        # agreement is bitwise, not merely approximate.
        rng = np.random.default_rng(3)
        store = EmbeddingStore.from_rows([rng.normal(size=8) for _ in range(12)])
        q = rng.normal(size=8)
        profile = distance_profile(q, store)
        singles = np.array([l2_distance(q, store.vector(i)) for i in range(12)])
        np.testing.assert_array_equal(profile, singles)

    def test_profile_rejects_wrong_dim(self):
        store = EmbeddingStore.from_rows([np.ones(5)])
        with pytest.raises(DimensionMismatchError):
            distance_profile(np.ones(4), store)

    def test_nn_search_sorted_ascending(self):
        rng = np.random.default_rng(11)
        store = EmbeddingStore.from_rows([rng.normal(size=5) for _ in range(20)])
        result = nn_search(rng.normal(size=5), store, k=6)
        dists = [d for _, d in result]
        assert dists == sorted(dists)
        assert len(result) == 6

    def test_nn_search_breaks_ties_toward_lower_index(self):
        row = np.array([1.0, 2.0, 3.0])
        store = EmbeddingStore.from_rows([row * 2, row, row, row * 3])
        result = nn_search(row, store, k=3)
        assert [i for i, _ in result][:2] == [1, 2]
        assert result[0][1] == 0.0

    def test_nn_search_k_bounds(self):
        store = EmbeddingStore.from_rows([np.ones(2), np.zeros(2)])
        with pytest.raises(ValueError):
            nn_search(np.ones(2), store, k=0)
        with pytest.raises(ValueError):
            nn_search(np.ones(2), store, k=3)

    @given(st.integers(min_value=1, max_value=8), st.integers(min_value=0, max_value=2**32 - 1))
    @settings(max_examples=25, deadline=None)
    def test_self_distance_is_zero(self, dim, seed):
        v = np.random.default_rng(seed).normal(size=dim)
        assert l2_distance(v, v) == 0.0


class TestFileFormat:
    def test_round_trip_is_bitwise(self, tmp_path):
        rng = np.random.default_rng(0)
        store = EmbeddingStore.from_rows([rng.normal(size=7) for _ in range(9)])
        path = tmp_path / "vecs.bin"
        write_embedding_file(path, store)
        loaded, meta = read_embedding_file(path)
        np.testing.assert_array_equal(loaded.matrix, store.matrix)
        assert loaded.matrix.dtype == np.float32
        assert len(meta) == 9
        assert all(m.position is None for m in meta)

    def test_header_layout(self, tmp_path):
        # Reconstruct the header independently: magic, u32 version, u32 dim,
        # u64 count, all little-endian, then raw float32 rows.
        store = EmbeddingStore.from_rows([np.array([1.5, -2.0]), np.array([0.0, 3.25])])
        path = tmp_path / "vecs.bin"
        write_embedding_file(path, store)
        raw = path.read_bytes()
        expected_header = struct.pack("<4sIIQ", b"PNAV", 1, 2, 2)
        assert raw[:20] == expected_header
        body = np.frombuffer(raw, dtype="<f4", offset=20)
        np.testing.assert_array_equal(body.reshape(2, 2), store.matrix)
        assert MAGIC == b"PNAV" and FORMAT_VERSION == 1

    def test_sidecar_round_trip(self, tmp_path):
        store = EmbeddingStore.from_rows([np.ones(3), np.zeros(3)])
        meta = [RowMeta(position=(1.0, 2.0), image="a.jpg", timestamp=12.5),
                RowMeta()]
        path = tmp_path / "vecs.bin"
        write_embedding_file(path, store, meta)
        _, loaded = read_embedding_file(path)
        assert loaded[0].position == (1.0, 2.0)
        assert loaded[0].image == "a.jpg"
        assert loaded[0].timestamp == 12.5
        assert loaded[1].position is None

    def test_sidecar_object_form_accepted(self, tmp_path):
        # Producers may wrap the row array in {"rows": [...]} to attach
        # provenance keys; the reader takes either shape.
        store = EmbeddingStore.from_rows([np.ones(2)])
        path = tmp_path / "vecs.bin"
        write_embedding_file(path, store)
        sidecar_path(path).write_text(json.dumps(
            {"rows": [{"position": [4.0, 5.0]}], "tool": "test"}))
        _, meta = read_embedding_file(path)
        assert meta[0].position == (4.0, 5.0)

    def test_meta_length_mismatch_on_write(self, tmp_path):
        store = EmbeddingStore.from_rows([np.ones(2), np.zeros(2)])
        with pytest.raises(SidecarMismatchError):
            write_embedding_file(tmp_path / "v.bin", store, [RowMeta()])

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "not_vecs.bin"
        path.write_bytes(b"XXXX" + b"\x00" * 32)
        (tmp_path / "not_vecs.bin.meta.json").write_text("[]")
        with pytest.raises(BadMagicError):
            read_embedding_file(path)

    def test_truncated_file(self, tmp_path):
        path = tmp_path / "short.bin"
        path.write_bytes(b"PN")
        with pytest.raises(BadMagicError):
            read_embedding_file(path)

    def test_unsupported_version(self, tmp_path):
        path = tmp_path / "vecs.bin"
        path.write_bytes(struct.pack("<4sIIQ", b"PNAV", 99, 1, 0))
        with pytest.raises(UnsupportedVersionError):
            read_embedding_file(path)

    def test_payload_size_mismatch(self, tmp_path):
        # Header promises 3x4 float32 values but only half arrive.
        path = tmp_path / "vecs.bin"
        path.write_bytes(struct.pack("<4sIIQ", b"PNAV", 1, 4, 3) + b"\x00" * 24)
        with pytest.raises(CountMismatchError):
            read_embedding_file(path)

    def test_missing_sidecar(self, tmp_path):
        store = EmbeddingStore.from_rows([np.ones(2)])
        path = tmp_path / "vecs.bin"
        write_embedding_file(path, store)
        sidecar_path(path).unlink()
        with pytest.raises(SidecarMismatchError):
            read_embedding_file(path)

    def test_sidecar_row_count_mismatch(self, tmp_path):
        store = EmbeddingStore.from_rows([np.ones(2), np.zeros(2)])
        path = tmp_path / "vecs.bin"
        write_embedding_file(path, store)
        sidecar_path(path).write_text("[{}]")
        with pytest.raises(SidecarMismatchError):
            read_embedding_file(path)

    def test_malformed_position_rejected(self, tmp_path):
        store = EmbeddingStore.from_rows([np.ones(2)])
        path = tmp_path / "vecs.bin"
        write_embedding_file(path, store)
        sidecar_path(path).write_text(json.dumps([{"position": [1.0, 2.0, 3.0]}]))
        with pytest.raises(SidecarMismatchError):
            read_embedding_file(path)

    @given(dim=st.integers(min_value=1, max_value=6),
           count=st.integers(min_value=1, max_value=10),
           seed=st.integers(min_value=0, max_value=2**32 - 1))
    @settings(max_examples=20, deadline=None,
              suppress_health_check=[HealthCheck.function_scoped_fixture])
    def test_round_trip_any_shape(self, tmp_path, dim, count, seed):
        mat = np.random.default_rng(seed).normal(size=(count, dim)).astype(np.float32)
        path = tmp_path / f"rt_{dim}_{count}_{seed}.bin"
        write_embedding_file(path, EmbeddingStore(mat))
        loaded, _ = read_embedding_file(path)
        np.testing.assert_array_equal(loaded.matrix, mat)
