"""Topological route maps: ordered nodes with embeddings and optional poses.

A map is a linear chain of nodes indexed 0..S along a single reference run.
Node spacing is controlled by a stride over the captured sequence; the final
capture always survives striding so the goal view is never dropped.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .embeddings import EmbeddingStore, RowMeta, read_embedding_file, write_embedding_file
from .errors import FormatError, SidecarMismatchError

MANIFEST_NAME = "map.json"
MANIFEST_VERSION = 1
EMBEDDING_FILE = "embeddings.bin"


@dataclass
class MapNode:
    """One route node: ordinal index, descriptor, optional pose and image path."""

    index: int
    embedding: np.ndarray
    position: tuple[float, float] | None = None
    image_ref: str | None = None


class TopologicalMap:
    """Ordered route nodes 0..S with a derived embedding store.

    Immutable after construction; store row i is node i's embedding.
    """

    def __init__(self, nodes: list[MapNode]):
        if len(nodes) < 2:
            raise ValueError(f"a map needs at least 2 nodes (start and goal), got {len(nodes)}")
        for i, node in enumerate(nodes):
            if node.index != i:
                raise ValueError(f"node at position {i} carries index {node.index}")
        self.nodes = nodes
        self.store = EmbeddingStore.from_rows([n.embedding for n in nodes])

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    @property
    def goal_index(self) -> int:
        """Index S of the final node."""
        return len(self.nodes) - 1

    @property
    def dim(self) -> int:
        return self.store.dim

    def __len__(self) -> int:
        return len(self.nodes)


def _normalize_entry(entry) -> tuple[np.ndarray, tuple[float, float] | None, str | None]:
    if isinstance(entry, np.ndarray):
        return entry, None, None
    emb = entry[0]
    pos = entry[1] if len(entry) > 1 else None
    ref = entry[2] if len(entry) > 2 else None
    if pos is not None:
        pos = (float(pos[0]), float(pos[1]))
    return emb, pos, ref


def build_map(sequence, subsample_stride: int = 1) -> TopologicalMap:
    """Build a map from a capture sequence, keeping every stride-th entry.

    `sequence` entries are either bare embedding vectors or tuples
    (embedding, position, image_ref) with trailing elements optional. The
    final entry is always kept as the goal node; surviving entries are
    re-indexed contiguously from 0.
    """
    entries = list(sequence)
    if not isinstance(subsample_stride, (int, np.integer)) or subsample_stride < 1:
        raise ValueError(f"subsample_stride must be a positive integer, got {subsample_stride!r}")
    keep = list(range(0, len(entries), subsample_stride))
    if entries and keep[-1] != len(entries) - 1:
        keep.append(len(entries) - 1)
    if len(keep) < 2:
        raise ValueError(f"striding left {len(keep)} nodes; a route needs at least 2")
    nodes = []
    for new_index, src in enumerate(keep):
        emb, pos, ref = _normalize_entry(entries[src])
        nodes.append(MapNode(index=new_index, embedding=np.asarray(emb, dtype=np.float64),
                             position=pos, image_ref=ref))
    return TopologicalMap(nodes)


def save_map(topo_map: TopologicalMap, path) -> None:
    """Write a map directory: manifest + embedding binary + sidecar."""
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    meta = [RowMeta(position=n.position, image=n.image_ref) for n in topo_map.nodes]
    write_embedding_file(out / EMBEDDING_FILE, topo_map.store, meta)
    manifest = {
        "version": MANIFEST_VERSION,
        "embedding_file": EMBEDDING_FILE,
        "meta_file": EMBEDDING_FILE + ".meta.json",
        "node_count": topo_map.node_count,
        "dim": topo_map.dim,
    }
    (out / MANIFEST_NAME).write_text(json.dumps(manifest, indent=1) + "\n")


def load_map(path) -> TopologicalMap:
    """Load a map directory written by `save_map`, validating the manifest."""
    root = Path(path)
    manifest_path = root / MANIFEST_NAME
    if not manifest_path.exists():
        raise FormatError(f"no {MANIFEST_NAME} manifest in {root}")
    manifest = json.loads(manifest_path.read_text())
    if manifest.get("version") != MANIFEST_VERSION:
        raise FormatError(f"{manifest_path}: manifest version {manifest.get('version')!r}, "
                          f"expected {MANIFEST_VERSION}")
    store, meta = read_embedding_file(root / manifest["embedding_file"],
                                      root / manifest["meta_file"])
    if store.count != manifest["node_count"]:
        raise SidecarMismatchError(f"{manifest_path}: manifest declares {manifest['node_count']} "
                                   f"nodes, binary has {store.count}")
    if store.dim != manifest["dim"]:
        raise SidecarMismatchError(f"{manifest_path}: manifest declares dim {manifest['dim']}, "
                                   f"binary has {store.dim}")
    nodes = [MapNode(index=i, embedding=store.vector(i),
                     position=meta[i].position, image_ref=meta[i].image)
             for i in range(store.count)]
    return TopologicalMap(nodes)
