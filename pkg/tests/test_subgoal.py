"""Subgoal rule and the per-pair scorer baseline."""

import numpy as np
import pytest

from toponav.embeddings import l2_distance
from toponav.subgoal import (
    DEFAULT_PAIRWISE_THRESHOLD,
    PairwiseScorerStub,
    SubgoalDecision,
    decide_subgoal,
    pairwise_select,
)
from toponav.topomap import MapNode, TopologicalMap


def small_map(n=8, dim=4, seed=0):
    rng = np.random.default_rng(seed)
    rows = rng.normal(size=(n, dim))
    rows /= np.linalg.norm(rows, axis=1, keepdims=True)
    return TopologicalMap([MapNode(index=i, embedding=rows[i]) for i in range(n)])


class TestDecideSubgoal:
    def test_next_node_is_subgoal(self):
        decision = decide_subgoal(3, small_map())
        assert decision == SubgoalDecision(localized_node=3, subgoal_node=4,
                                           goal_reached=False)

    def test_clamped_at_goal(self):
        topo_map = small_map()
        decision = decide_subgoal(topo_map.goal_index, topo_map)
        assert decision.subgoal_node == topo_map.goal_index
        assert decision.goal_reached

    def test_one_before_goal_targets_goal_without_signal(self):
        topo_map = small_map()
        decision = decide_subgoal(topo_map.goal_index - 1, topo_map)
        assert decision.subgoal_node == topo_map.goal_index
        assert not decision.goal_reached

    def test_out_of_range_rejected(self):
        topo_map = small_map()
        with pytest.raises(ValueError):
            decide_subgoal(-1, topo_map)
        with pytest.raises(ValueError):
            decide_subgoal(topo_map.node_count, topo_map)


class FixedScores:
    """Deterministic surrogate distances keyed by candidate embedding."""

    def __init__(self, topo_map, scores):
        self.lookup = {topo_map.store.matrix[i].tobytes(): s
                       for i, s in enumerate(scores)}

    def __call__(self, observation, candidate_embedding):
        return self.lookup[np.asarray(candidate_embedding,
                                      dtype=np.float32).tobytes()]


class TestPairwiseSelect:
    def test_smallest_score_at_or_above_threshold_wins(self):
        # Scores 2, 4, 9 with threshold 3: 2 is "too close", so the rule
        # takes the smaller of the eligible scores and picks the node
        # scoring 4.
        topo_map = small_map()
        scores = [2.0, 4.0, 9.0]
        stub = PairwiseScorerStub(per_pair_flops=0,
                                  distance_fn=FixedScores(topo_map, scores))
        obs = topo_map.store.vector(0)
        picked, pairs = pairwise_select(obs, [0, 1, 2], topo_map, stub, threshold=3.0)
        assert picked == 1
        assert pairs == 3

    def test_fallback_when_nothing_clears_threshold(self):
        topo_map = small_map()
        stub = PairwiseScorerStub(per_pair_flops=0,
                                  distance_fn=FixedScores(topo_map, [0.5, 2.5, 1.0]))
        picked, _ = pairwise_select(topo_map.store.vector(0), [0, 1, 2], topo_map,
                                    stub, threshold=3.0)
        assert picked == 1  # largest score below the threshold

    def test_ties_break_toward_lower_candidate(self):
        topo_map = small_map()
        stub = PairwiseScorerStub(per_pair_flops=0,
                                  distance_fn=FixedScores(topo_map, [5.0, 5.0, 7.0]))
        picked, _ = pairwise_select(topo_map.store.vector(0), [0, 1, 2], topo_map,
                                    stub, threshold=3.0)
        assert picked == 0

    def test_pair_count_always_equals_candidate_count(self):
        # The O(n) cost contract: every candidate costs one evaluation, with
        # no early exit on a good score.
        topo_map = small_map()
        stub = PairwiseScorerStub(per_pair_flops=0)
        obs = topo_map.store.vector(2)
        for candidates in ([0], [0, 1, 2], list(range(8))):
            _, pairs = pairwise_select(obs, candidates, topo_map, stub)
            assert pairs == len(candidates)

    def test_empty_candidates_rejected(self):
        with pytest.raises(ValueError):
            pairwise_select(np.ones(4), [], small_map(), PairwiseScorerStub(per_pair_flops=0))

    def test_default_threshold_exported(self):
        assert DEFAULT_PAIRWISE_THRESHOLD == 3.0


class TestScorerStub:
    def test_default_surrogate_scales_embedding_distance(self):
        topo_map = small_map()
        stub = PairwiseScorerStub(per_pair_flops=0)
        obs = topo_map.store.vector(0)
        cand = topo_map.store.vector(5)
        assert stub.evaluate(obs, cand) == pytest.approx(10.0 * l2_distance(obs, cand))

    def test_batch_preserves_candidate_order(self):
        topo_map = small_map()
        stub = PairwiseScorerStub(per_pair_flops=0)
        obs = topo_map.store.vector(0)
        scores, count = stub.evaluate_batch(obs, topo_map, [3, 1, 6])
        assert count == 3
        expected = [stub.evaluate(obs, topo_map.store.vector(c)) for c in (3, 1, 6)]
        np.testing.assert_allclose(scores, expected)

    def test_synthetic_work_does_not_change_scores(self):
        topo_map = small_map()
        obs = topo_map.store.vector(0)
        cand = topo_map.store.vector(4)
        light = PairwiseScorerStub(per_pair_flops=0).evaluate(obs, cand)
        heavy = PairwiseScorerStub(per_pair_flops=100_000).evaluate(obs, cand)
        assert light == heavy

    def test_negative_flops_rejected(self):
        with pytest.raises(ValueError):
            PairwiseScorerStub(per_pair_flops=-1)
