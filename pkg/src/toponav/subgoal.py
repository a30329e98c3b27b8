"""Subgoal selection and the pairwise-scorer baseline.

The navigation rule is deliberately simple: the node after the best
localization match becomes the subgoal, clamped at the goal; localizing to
the final node raises the goal-reached signal.

The pairwise scorer stands in for temporal-distance networks that must run
one inference per (observation, candidate) pair. It reproduces the cost
structure — n candidates cost n independent pair evaluations of tunable
synthetic work — and the selection rule, which is all the scaling and
selection-logic comparisons need. The network itself is out of scope.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .embeddings import l2_distance
from .topomap import TopologicalMap

DEFAULT_PAIRWISE_THRESHOLD = 3.0
DEFAULT_PER_PAIR_FLOPS = 2_000_000

# Converts embedding distance into surrogate "time steps" so the default
# threshold of 3 separates the current node from nodes a few steps ahead.
SURROGATE_STEPS_PER_UNIT_DISTANCE = 10.0


@dataclass(frozen=True)
class SubgoalDecision:
    """Outcome of one selection step."""

    localized_node: int
    subgoal_node: int
    goal_reached: bool


def decide_subgoal(localized_node: int, topo_map: TopologicalMap) -> SubgoalDecision:
    """Subgoal = next node after the match, clamped at the goal node S."""
    goal = topo_map.goal_index
    if not 0 <= localized_node <= goal:
        raise ValueError(f"localized node {localized_node} outside route 0..{goal}")
    return SubgoalDecision(
        localized_node=int(localized_node),
        subgoal_node=min(int(localized_node) + 1, goal),
        goal_reached=localized_node == goal,
    )


def _default_surrogate(observation, candidate_embedding) -> float:
    return SURROGATE_STEPS_PER_UNIT_DISTANCE * l2_distance(observation, candidate_embedding)


@dataclass
class PairwiseScorerStub:
    """Per-pair temporal-distance surrogate with tunable synthetic cost.

    `distance_fn(observation, candidate_embedding) -> float` supplies the
    surrogate temporal distance; the default scales embedding distance into
    step units. Each evaluation additionally burns ~`per_pair_flops`
    floating-point operations so wall-clock cost scales with the pair count
    the way an iterative network's would.
    """

    per_pair_flops: int = DEFAULT_PER_PAIR_FLOPS
    distance_fn: object = None
    _work: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.per_pair_flops < 0:
            raise ValueError(f"per_pair_flops must be >= 0, got {self.per_pair_flops}")
        if self.distance_fn is None:
            self.distance_fn = _default_surrogate
        # One multiply-add per element; allocated once, reused every pair.
        self._work = np.linspace(0.5, 1.5, max(1, self.per_pair_flops // 2))

    def evaluate(self, observation, candidate_embedding) -> float:
        """Score one (observation, candidate) pair, burning the synthetic work."""
        if self.per_pair_flops > 0:
            float(np.dot(self._work, self._work))
        return float(self.distance_fn(observation, candidate_embedding))

    def evaluate_batch(self, observation, topo_map: TopologicalMap,
                       candidates) -> tuple[np.ndarray, int]:
        """Score each candidate independently; returns (scores, pair count).

        The loop is the point: one evaluation per candidate, never batched,
        mirroring architectures that take each pair through the network.
        """
        scores = np.array([self.evaluate(observation, topo_map.store.vector(int(c)))
                           for c in candidates], dtype=np.float64)
        return scores, len(scores)


def pairwise_select(observation, candidates, topo_map: TopologicalMap,
                    stub: PairwiseScorerStub,
                    threshold: float = DEFAULT_PAIRWISE_THRESHOLD) -> tuple[int, int]:
    """Baseline selection rule over surrogate temporal distances.

    Among candidates scoring at or above `threshold`, picks the smallest
    score; if none qualify, falls back to the largest score below it (the
    candidate presumed furthest ahead). Ties break toward the lower node
    index. Returns (selected node, pair evaluations performed); the count
    always equals len(candidates) — the measurable O(n) contract.
    """
    cand = [int(c) for c in candidates]
    if not cand:
        raise ValueError("pairwise selection needs at least one candidate")
    scores, pair_count = stub.evaluate_batch(observation, topo_map, cand)
    eligible = scores >= threshold
    if np.any(eligible):
        pick = int(np.flatnonzero(eligible)[np.argmin(scores[eligible])])
    else:
        pick = int(np.argmax(scores))
    return cand[pick], pair_count
