"""Recall@N evaluation of embedding retrieval on a synthetic route pair.

The database is one pass over a route; the queries are a second pass with
observation noise, offset by half a node so no query is a trivial bit-equal
hit. A retrieval counts as correct when the returned node lies within the
positive radius of the query's true position.

Run:  python3 demos/retrieval_recall.py
"""

import numpy as np

from toponav import (
    EmbeddingStore,
    ObservationModel,
    RetrievalDataset,
    RobotState,
    WorldConfig,
    generate_world,
    observe,
    recall_at_n,
)


def main():
    world = generate_world(WorldConfig(length=60.0, dim=64), seed=9)
    rng = np.random.default_rng(0)
    model = ObservationModel(noise_sigma=0.2)

    database = world.base_embeddings.astype(np.float64)
    db_positions = [(world.node_position(i), 0.0) for i in range(world.node_count)]

    queries, q_positions = [], []
    for i in range(world.node_count - 1):
        arc = world.node_position(i) + 0.5
        queries.append(observe(world, model, RobotState(arc_position=arc), rng))
        q_positions.append((arc, 0.0))

    dataset = RetrievalDataset(
        queries=EmbeddingStore.from_rows(queries),
        query_positions=np.asarray(q_positions),
        database=EmbeddingStore(database.astype(np.float32)),
        database_positions=np.asarray(db_positions),
        positive_radius=2.0)

    print(f"{len(queries)} noisy queries against {world.node_count} database "
          f"nodes, positive radius 2 m\n")
    print(f"{'n':>4} {'recall@n':>10}")
    for n in (1, 2, 5, 10, 20):
        print(f"{n:>4} {recall_at_n(dataset, n):>10.3f}")

    print("\nrecall can only grow with n: deeper retrieval never removes a hit.")


if __name__ == "__main__":
    main()
