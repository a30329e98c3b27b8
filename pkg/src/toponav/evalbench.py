"""Retrieval-quality evaluation and runtime-scaling benchmarks.

Two measurement families live here. Recall@N asks how often a query's top-N
retrieved rows include at least one database row within a metric radius of
the query's position (planar Euclidean, default 25 m). The runtime bench
compares the cost curve of two selection strategies as the candidate count
grows: per-pair scoring, whose work is proportional to the number of pairs,
against precomputed-embedding search, which computes the distance profile
over the whole store once and then restricts the argmin to the candidate
set, so its cost does not track the candidate count.

Wall-clock assertions are always relative (fit quality, max/min ratios);
absolute latencies are hardware noise. Pair-evaluation counts, by contrast,
are exact and machine-independent.
"""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import dataclass, field

import numpy as np

from .embeddings import EmbeddingStore, distance_profile
from .subgoal import DEFAULT_PER_PAIR_FLOPS, PairwiseScorerStub
from .topomap import MapNode, TopologicalMap

DEFAULT_POSITIVE_RADIUS = 25.0
RECALL_METHODS = ("embedding_nn", "pairwise_stub")
SUMMARY_CSV_HEADER = ("selector", "scenario", "episodes", "success_rate")
BENCH_CSV_HEADER = ("method", "candidates", "median_latency_ns", "pairs_evaluated")


def _as_positions(positions, count: int, label: str) -> np.ndarray:
    pos = np.asarray(positions, dtype=np.float64)
    if pos.ndim != 2 or pos.shape[1] != 2:
        raise ValueError(f"{label} positions must be (count, 2), got shape {pos.shape}")
    if pos.shape[0] != count:
        raise ValueError(f"{label} has {count} embeddings but {pos.shape[0]} positions")
    if not np.all(np.isfinite(pos)):
        raise ValueError(f"{label} positions contain non-finite values")
    return pos


@dataclass
class RetrievalDataset:
    """Query and database embeddings, each row tagged with a planar position."""

    queries: EmbeddingStore
    query_positions: np.ndarray
    database: EmbeddingStore
    database_positions: np.ndarray
    positive_radius: float = DEFAULT_POSITIVE_RADIUS

    def __post_init__(self):
        if self.queries.count == 0 or self.database.count == 0:
            raise ValueError("retrieval needs non-empty query and database sets")
        if self.positive_radius <= 0:
            raise ValueError(f"positive_radius must be > 0, got {self.positive_radius}")
        self.query_positions = _as_positions(self.query_positions, self.queries.count, "queries")
        self.database_positions = _as_positions(
            self.database_positions, self.database.count, "database")


def _topn_by_embedding(dataset: RetrievalDataset, query: np.ndarray, n: int) -> np.ndarray:
    profile = distance_profile(query, dataset.database)
    return np.argsort(profile, kind="stable")[:n]


def _topn_by_pairwise(dataset: RetrievalDataset, query: np.ndarray, n: int,
                      stub: PairwiseScorerStub) -> np.ndarray:
    scores = np.array([stub.evaluate(query, dataset.database.vector(i))
                       for i in range(dataset.database.count)])
    return np.argsort(scores, kind="stable")[:n]


def recall_at_n(dataset: RetrievalDataset, n: int, method: str = "embedding_nn",
                stub: PairwiseScorerStub | None = None) -> float:
    """Fraction of queries whose top-n retrievals include a positive.

    A database row is a positive for a query when their positions lie within
    `positive_radius` of each other. `embedding_nn` ranks by embedding
    distance; `pairwise_stub` ranks by the per-pair surrogate score (smaller
    = closer). A query with no positive anywhere in the database simply
    never hits, at any n.
    """
    if method not in RECALL_METHODS:
        raise ValueError(f"unknown method {method!r}, expected one of {RECALL_METHODS}")
    if not 1 <= n <= dataset.database.count:
        raise ValueError(f"n must be in [1, {dataset.database.count}], got {n}")
    if method == "pairwise_stub" and stub is None:
        stub = PairwiseScorerStub(per_pair_flops=0)

    hits = 0
    for qi in range(dataset.queries.count):
        query = dataset.queries.vector(qi)
        if method == "embedding_nn":
            top = _topn_by_embedding(dataset, query, n)
        else:
            top = _topn_by_pairwise(dataset, query, n, stub)
        deltas = dataset.database_positions[top] - dataset.query_positions[qi]
        if np.any(np.hypot(deltas[:, 0], deltas[:, 1]) <= dataset.positive_radius):
            hits += 1
    return hits / dataset.queries.count


@dataclass
class BenchReport:
    """Runtime-scaling measurements for both selection methods.

    `median_latency_ns` maps method name to per-candidate-count medians
    (same order as `candidate_counts`); fits are least-squares lines of
    latency against candidate count.
    """

    candidate_counts: list[int]
    median_latency_ns: dict[str, list[int]]
    slope_ns_per_candidate: dict[str, float]
    intercept_ns: dict[str, float]
    r_squared: dict[str, float]
    pair_counts: list[int]
    embedding_dim: int
    per_pair_flops: int
    repetitions: int
    store_size: int

    @property
    def embedding_latency_ratio(self) -> float:
        """max/min of embedding-search medians; near 1 means flat scaling."""
        medians = self.median_latency_ns["embedding"]
        return max(medians) / min(medians)

    def to_dict(self) -> dict:
        return {
            "candidate_counts": list(self.candidate_counts),
            "median_latency_ns": {k: list(v) for k, v in self.median_latency_ns.items()},
            "slope_ns_per_candidate": dict(self.slope_ns_per_candidate),
            "intercept_ns": dict(self.intercept_ns),
            "r_squared": dict(self.r_squared),
            "pair_counts": list(self.pair_counts),
            "embedding_latency_ratio": self.embedding_latency_ratio,
            "embedding_dim": self.embedding_dim,
            "per_pair_flops": self.per_pair_flops,
            "repetitions": self.repetitions,
            "store_size": self.store_size,
        }


def _linear_fit(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    slope, intercept = np.polyfit(x, y, 1)
    predicted = slope * x + intercept
    ss_res = float(np.sum((y - predicted) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else float("nan")
    return float(slope), float(intercept), r2


def _bench_store(store_size: int, dim: int, seed: int) -> tuple[TopologicalMap, np.ndarray]:
    rng = np.random.default_rng(seed)
    rows = rng.standard_normal((store_size, dim))
    rows /= np.linalg.norm(rows, axis=1, keepdims=True)
    nodes = [MapNode(index=i, embedding=rows[i]) for i in range(store_size)]
    query = rng.standard_normal(dim)
    query /= np.linalg.norm(query)
    return TopologicalMap(nodes), query


def runtime_scaling_bench(candidate_counts=(5, 21, 101), embedding_dim: int = 512,
                          per_pair_flops: int = DEFAULT_PER_PAIR_FLOPS,
                          repetitions: int = 9, store_size: int = 512,
                          seed: int = 0) -> BenchReport:
    """Median selection latency per method as candidate count grows.

    The pairwise path calls the scorer stub once per candidate, so its cost
    grows with the count. The embedding path computes the store-wide
    distance profile (whose cost is fixed by the store, built offline in the
    real system) and restricts the argmin to the candidate indices, so the
    count barely matters. Both paths run single-threaded, warmed up once,
    timed `repetitions` times each.
    """
    counts = [int(c) for c in candidate_counts]
    if len(counts) < 3:
        raise ValueError(f"need >= 3 candidate counts, got {len(counts)}")
    if any(b <= a for a, b in zip(counts, counts[1:])):
        raise ValueError(f"candidate counts must be strictly ascending, got {counts}")
    if counts[0] < 1:
        raise ValueError(f"candidate counts must be >= 1, got {counts}")
    if counts[-1] > store_size:
        raise ValueError(f"largest count {counts[-1]} exceeds store size {store_size}")
    if repetitions < 5:
        raise ValueError(f"need >= 5 repetitions for a stable median, got {repetitions}")

    topo_map, query = _bench_store(store_size, embedding_dim, seed)
    store = topo_map.store
    stub = PairwiseScorerStub(per_pair_flops=per_pair_flops)

    def embedding_pick(n: int) -> int:
        candidates = np.arange(n)
        profile = distance_profile(query, store)
        return int(candidates[np.argmin(profile[candidates])])

    def pairwise_pick(n: int) -> int:
        scores, _ = stub.evaluate_batch(query, topo_map, range(n))
        return int(np.argmin(scores))

    medians = {"embedding": [], "pairwise": []}
    pair_counts = []
    for n in counts:
        for name, fn in (("embedding", embedding_pick), ("pairwise", pairwise_pick)):
            fn(n)  # warmup
            samples = []
            for _ in range(repetitions):
                t0 = time.perf_counter_ns()
                fn(n)
                samples.append(time.perf_counter_ns() - t0)
            medians[name].append(int(np.median(samples)))
        _, count = stub.evaluate_batch(query, topo_map, range(n))
        pair_counts.append(count)

    for name, values in medians.items():
        if max(values) == 0:
            raise ValueError(
                f"{name} medians are all zero; timer resolution too coarse, "
                f"increase per_pair_flops (currently {per_pair_flops})")

    x = np.asarray(counts, dtype=np.float64)
    slopes, intercepts, r2s = {}, {}, {}
    for name, values in medians.items():
        slopes[name], intercepts[name], r2s[name] = _linear_fit(
            x, np.asarray(values, dtype=np.float64))

    return BenchReport(candidate_counts=counts, median_latency_ns=medians,
                       slope_ns_per_candidate=slopes, intercept_ns=intercepts,
                       r_squared=r2s, pair_counts=pair_counts,
                       embedding_dim=embedding_dim, per_pair_flops=per_pair_flops,
                       repetitions=repetitions, store_size=store_size)


def _report_rows(report) -> list[dict]:
    """Flatten a BenchReport or batch summary into CSV-ready row dicts."""
    if hasattr(report, "median_latency_ns"):
        rows = []
        for method in sorted(report.median_latency_ns):
            for i, n in enumerate(report.candidate_counts):
                rows.append({
                    "method": method,
                    "candidates": n,
                    "median_latency_ns": report.median_latency_ns[method][i],
                    "pairs_evaluated": report.pair_counts[i] if method == "pairwise" else 0,
                })
        return rows
    return [dict(row) for row in report.rows]


def emit_report(report, path, format: str = "json") -> None:
    """Write a BenchReport or batch summary to disk, deterministically.

    JSON output is sorted-key, indented; CSV columns follow the documented
    headers. Emitting the same in-memory data twice produces byte-identical
    files. An empty summary is an error, never an empty file.
    """
    if format not in ("json", "csv"):
        raise ValueError(f"unknown format {format!r}, expected 'json' or 'csv'")
    payload = report.to_dict()
    if not payload or ("rows" in payload and not payload["rows"]):
        raise ValueError("refusing to emit an empty report")

    if format == "json":
        text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    else:
        rows = _report_rows(report)
        header = BENCH_CSV_HEADER if "median_latency_ns" in rows[0] else SUMMARY_CSV_HEADER
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=header, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        text = buf.getvalue()

    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def write_episode_records(path, records) -> None:
    """Append-style JSON-lines emission of per-episode result records."""
    records = list(records)
    if not records:
        raise ValueError("refusing to emit an empty episode record file")
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record, sort_keys=True) + "\n")


def paired_outcomes(records) -> dict:
    """Per-(world, seed) outcome table across selectors, for matched comparison."""
    table: dict[tuple[str, int], dict[str, bool]] = {}
    for record in records:
        key = (record["world_id"], record["seed"])
        table.setdefault(key, {})[record["selector"]] = record["success"]
    return table
