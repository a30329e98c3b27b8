"""Route map construction, striding, and the on-disk map directory."""

import json

import numpy as np
import pytest

from toponav.errors import FormatError, SidecarMismatchError
from toponav.topomap import MapNode, TopologicalMap, build_map, load_map, save_map


def embeddings_of(topo_map):
    return [topo_map.nodes[i].embedding for i in range(topo_map.node_count)]


class TestBuildMap:
    def test_stride_keeps_every_kth_and_the_final(self):
        # 10 captures at stride 4 keep sources 0, 4, 8 and then 9 (the goal
        # view always survives), re-indexed 0..3.
        captures = [np.full(3, float(i)) for i in range(10)]
        topo_map = build_map(captures, subsample_stride=4)
        assert topo_map.node_count == 4
        kept = [float(e[0]) for e in embeddings_of(topo_map)]
        assert kept == [0.0, 4.0, 8.0, 9.0]
        assert [n.index for n in topo_map.nodes] == [0, 1, 2, 3]

    def test_stride_one_keeps_everything(self):
        captures = [np.full(2, float(i)) for i in range(5)]
        assert build_map(captures).node_count == 5

    def test_final_not_duplicated_when_stride_lands_on_it(self):
        captures = [np.full(2, float(i)) for i in range(9)]
        topo_map = build_map(captures, subsample_stride=4)
        kept = [float(e[0]) for e in embeddings_of(topo_map)]
        assert kept == [0.0, 4.0, 8.0]

    def test_tuple_entries_carry_pose_and_image(self):
        captures = [
            (np.ones(2), (0.0, 0.0), "f0.jpg"),
            (np.zeros(2), (1.5, 0.0), "f1.jpg"),
        ]
        topo_map = build_map(captures)
        assert topo_map.nodes[1].position == (1.5, 0.0)
        assert topo_map.nodes[1].image_ref == "f1.jpg"

    def test_bare_vectors_leave_pose_unset(self):
        topo_map = build_map([np.ones(2), np.zeros(2)])
        assert topo_map.nodes[0].position is None

    def test_too_few_nodes_rejected(self):
        with pytest.raises(ValueError):
            build_map([np.ones(2)])

    def test_bad_stride_rejected(self):
        captures = [np.ones(2), np.zeros(2)]
        with pytest.raises(ValueError):
            build_map(captures, subsample_stride=0)
        with pytest.raises(ValueError):
            build_map(captures, subsample_stride=1.5)


class TestTopologicalMap:
    def test_goal_is_last_index(self):
        topo_map = build_map([np.ones(2) * i for i in range(1, 5)])
        assert topo_map.goal_index == 3
        assert len(topo_map) == 4
        assert topo_map.dim == 2

    def test_store_rows_match_nodes(self):
        topo_map = build_map([np.array([1.0, 2.0]), np.array([3.0, 4.0])])
        np.testing.assert_array_equal(topo_map.store.vector(1), [3.0, 4.0])

    def test_out_of_order_indices_rejected(self):
        nodes = [MapNode(index=1, embedding=np.ones(2)),
                 MapNode(index=0, embedding=np.zeros(2))]
        with pytest.raises(ValueError):
            TopologicalMap(nodes)

    def test_single_node_rejected(self):
        with pytest.raises(ValueError):
            TopologicalMap([MapNode(index=0, embedding=np.ones(2))])


class TestMapDirectory:
    def build_sample(self):
        rng = np.random.default_rng(42)
        captures = [(rng.normal(size=6), (float(i), 0.5), f"img_{i:03d}.jpg")
                    for i in range(7)]
        return build_map(captures, subsample_stride=2)

    def test_save_load_round_trip(self, tmp_path):
        original = self.build_sample()
        save_map(original, tmp_path / "route")
        loaded = load_map(tmp_path / "route")
        assert loaded.node_count == original.node_count
        np.testing.assert_array_equal(loaded.store.matrix, original.store.matrix)
        assert [n.position for n in loaded.nodes] == [n.position for n in original.nodes]
        assert [n.image_ref for n in loaded.nodes] == [n.image_ref for n in original.nodes]

    def test_directory_contents(self, tmp_path):
        save_map(self.build_sample(), tmp_path / "route")
        root = tmp_path / "route"
        assert (root / "map.json").exists()
        assert (root / "embeddings.bin").exists()
        assert (root / "embeddings.bin.meta.json").exists()
        manifest = json.loads((root / "map.json").read_text())
        assert manifest["version"] == 1
        assert manifest["node_count"] == 4
        assert manifest["dim"] == 6

    def test_missing_manifest(self, tmp_path):
        with pytest.raises(FormatError):
            load_map(tmp_path)

    def test_wrong_manifest_version(self, tmp_path):
        save_map(self.build_sample(), tmp_path / "route")
        manifest_path = tmp_path / "route" / "map.json"
        manifest = json.loads(manifest_path.read_text())
        manifest["version"] = 2
        manifest_path.write_text(json.dumps(manifest))
        with pytest.raises(FormatError):
            load_map(tmp_path / "route")

    def test_manifest_node_count_must_match_binary(self, tmp_path):
        save_map(self.build_sample(), tmp_path / "route")
        manifest_path = tmp_path / "route" / "map.json"
        manifest = json.loads(manifest_path.read_text())
        manifest["node_count"] = 99
        manifest_path.write_text(json.dumps(manifest))
        with pytest.raises(SidecarMismatchError):
            load_map(tmp_path / "route")
