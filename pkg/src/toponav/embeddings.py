"""Embedding vectors, exhaustive nearest-neighbor search, and the on-disk format.

Embedding vectors are plain 1-D numpy arrays. Storage is 32-bit float (the
on-disk format below); every distance is computed in double precision so
results do not depend on storage rounding or platform BLAS choices.

On-disk format (little-endian):
    magic ``PNAV`` (4 bytes), version u32 = 1, dim u32, count u64,
    then count*dim IEEE-754 float32 values in row-major order.
A sidecar JSON file (same basename + ``.meta.json``) carries one metadata
row per binary row: optional ``position`` [x_meters, y_meters], optional
``image`` path, optional ``timestamp`` seconds. The sidecar top level is
either a bare array of rows or an object with a ``rows`` key (the object
form lets producers attach provenance keys without breaking alignment).
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    BadMagicError,
    CountMismatchError,
    DimensionMismatchError,
    EmptyStoreError,
    SidecarMismatchError,
    UnsupportedVersionError,
)

MAGIC = b"PNAV"
FORMAT_VERSION = 1

# Default descriptor width; the file format carries dim explicitly, so any
# backbone dimensionality round-trips unchanged.
DEFAULT_DIM = 512


def as_embedding(values) -> np.ndarray:
    """Validate and return a 1-D float64 embedding vector."""
    vec = np.asarray(values, dtype=np.float64)
    if vec.ndim != 1 or vec.shape[0] < 1:
        raise ValueError(f"embedding must be a non-empty 1-D vector, got shape {vec.shape}")
    if not np.all(np.isfinite(vec)):
        raise ValueError("embedding contains NaN or Inf")
    return vec


class EmbeddingStore:
    """Immutable, ordered store of same-dimension embedding vectors.

    Vectors are held as one float32 (count, dim) matrix in insertion order.
    The store is safe to share across threads once constructed.
    """

    def __init__(self, vectors: np.ndarray):
        mat = np.ascontiguousarray(vectors, dtype=np.float32)
        if mat.ndim != 2:
            raise ValueError(f"expected a (count, dim) matrix, got shape {mat.shape}")
        if mat.shape[1] < 1:
            raise ValueError("store dimension must be >= 1")
        if not np.all(np.isfinite(mat)):
            raise ValueError("store contains NaN or Inf")
        self._matrix = mat
        self._matrix.setflags(write=False)

    @classmethod
    def from_rows(cls, rows) -> "EmbeddingStore":
        """Build a store from an iterable of 1-D vectors, checking dimensions."""
        arrs = [as_embedding(r) for r in rows]
        if not arrs:
            raise EmptyStoreError("cannot build a store from zero vectors")
        dim = arrs[0].shape[0]
        for i, a in enumerate(arrs):
            if a.shape[0] != dim:
                raise DimensionMismatchError(f"row {i} has dim {a.shape[0]}, store dim is {dim}")
        return cls(np.stack(arrs))

    @property
    def dim(self) -> int:
        return self._matrix.shape[1]

    @property
    def count(self) -> int:
        return self._matrix.shape[0]

    @property
    def matrix(self) -> np.ndarray:
        """The (count, dim) float32 matrix; read-only view."""
        return self._matrix

    def vector(self, index: int) -> np.ndarray:
        """Row `index` as a float64 vector."""
        return self._matrix[index].astype(np.float64)

    def __len__(self) -> int:
        return self.count


def _row_l2(rows: np.ndarray, vec: np.ndarray) -> np.ndarray:
    # Single shared code path: every distance in the package reduces to this,
    # so pairwise and batched calls agree bitwise (same summation order).
    diff = rows.astype(np.float64) - vec.astype(np.float64)
    return np.sqrt(np.sum(diff * diff, axis=1))


def l2_distance(a, b) -> float:
    """Euclidean distance between two embedding vectors (double precision)."""
    av = np.asarray(a, dtype=np.float64)
    bv = np.asarray(b, dtype=np.float64)
    if av.shape != bv.shape:
        raise DimensionMismatchError(f"dimension mismatch: {av.shape} vs {bv.shape}")
    return float(_row_l2(av.reshape(1, -1), bv)[0])


def distance_profile(query, store: EmbeddingStore) -> np.ndarray:
    """Distances from `query` to every stored vector, in store order."""
    q = np.asarray(query, dtype=np.float64)
    if store.count == 0:
        raise EmptyStoreError("distance profile over an empty store")
    if q.ndim != 1 or q.shape[0] != store.dim:
        raise DimensionMismatchError(f"query shape {q.shape} does not match store dim {store.dim}")
    return _row_l2(store.matrix, q)


def nn_search(query, store: EmbeddingStore, k: int) -> list[tuple[int, float]]:
    """Exhaustive k-nearest-neighbor search.

    Returns the k (index, distance) pairs with smallest distance, ascending;
    ties broken by lower index. Exact linear scan: map-scale stores are small
    enough that approximate indexes would only cost determinism.
    """
    if store.count == 0:
        raise EmptyStoreError("nearest-neighbor search over an empty store")
    if not isinstance(k, (int, np.integer)) or k < 1 or k > store.count:
        raise ValueError(f"k must be in 1..{store.count}, got {k!r}")
    dists = distance_profile(query, store)
    order = np.argsort(dists, kind="stable")[:k]
    return [(int(i), float(dists[i])) for i in order]


@dataclass
class RowMeta:
    """Optional per-row metadata carried by the sidecar file."""

    position: tuple[float, float] | None = None
    image: str | None = None
    timestamp: float | None = None

    def to_json_obj(self) -> dict:
        obj: dict = {}
        if self.position is not None:
            obj["position"] = [float(self.position[0]), float(self.position[1])]
        if self.image is not None:
            obj["image"] = self.image
        if self.timestamp is not None:
            obj["timestamp"] = float(self.timestamp)
        return obj

    @classmethod
    def from_json_obj(cls, obj: dict) -> "RowMeta":
        pos = obj.get("position")
        if pos is not None:
            if len(pos) != 2:
                raise SidecarMismatchError(f"position must be [x, y], got {pos!r}")
            pos = (float(pos[0]), float(pos[1]))
        ts = obj.get("timestamp")
        return cls(position=pos, image=obj.get("image"),
                   timestamp=None if ts is None else float(ts))


def write_embedding_file(path, store: EmbeddingStore, meta: list[RowMeta] | None = None) -> None:
    """Write `store` to `path` in the binary format, plus a `.meta.json` sidecar.

    `meta` defaults to empty rows; its length must equal the store count.
    """
    path = Path(path)
    rows = meta if meta is not None else [RowMeta() for _ in range(store.count)]
    if len(rows) != store.count:
        raise SidecarMismatchError(f"{len(rows)} meta rows for {store.count} vectors")
    header = struct.pack("<4sIIQ", MAGIC, FORMAT_VERSION, store.dim, store.count)
    payload = store.matrix.astype("<f4", copy=False).tobytes(order="C")
    path.write_bytes(header + payload)
    sidecar_path(path).write_text(
        json.dumps([r.to_json_obj() for r in rows], indent=1) + "\n"
    )


def sidecar_path(path) -> Path:
    """Sidecar filename for an embedding binary: same basename + `.meta.json`."""
    path = Path(path)
    return path.with_name(path.name + ".meta.json")


def read_embedding_file(path, meta_path=None) -> tuple[EmbeddingStore, list[RowMeta]]:
    """Read a binary embedding file and its sidecar; validate both strictly."""
    path = Path(path)
    raw = path.read_bytes()
    header_size = struct.calcsize("<4sIIQ")
    if len(raw) < header_size or raw[:4] != MAGIC:
        raise BadMagicError(f"{path}: not an embedding file (bad magic)")
    _, version, dim, count = struct.unpack("<4sIIQ", raw[:header_size])
    if version != FORMAT_VERSION:
        raise UnsupportedVersionError(f"{path}: format version {version}, expected {FORMAT_VERSION}")
    if dim < 1:
        raise CountMismatchError(f"{path}: declared dim {dim} is invalid")
    expected = header_size + count * dim * 4
    if len(raw) != expected:
        raise CountMismatchError(
            f"{path}: payload is {len(raw) - header_size} bytes, "
            f"header declares {count}x{dim} float32 ({expected - header_size} bytes)"
        )
    mat = np.frombuffer(raw, dtype="<f4", offset=header_size).reshape(count, dim)
    store = EmbeddingStore(mat)

    mpath = Path(meta_path) if meta_path is not None else sidecar_path(path)
    if not mpath.exists():
        raise SidecarMismatchError(f"meta file not found: {mpath}")
    doc = json.loads(mpath.read_text())
    if isinstance(doc, dict):
        doc = doc.get("rows")
    if not isinstance(doc, list):
        raise SidecarMismatchError(f"{mpath}: sidecar must be a row array or an object with 'rows'")
    if len(doc) != count:
        raise SidecarMismatchError(f"{mpath}: {len(doc)} meta rows for {count} binary rows")
    return store, [RowMeta.from_json_obj(obj) for obj in doc]
