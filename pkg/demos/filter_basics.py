"""Walk through one cycle of the discrete localization filter by hand.

The filter keeps a probability vector over route nodes. Each step first
spreads the belief through a motion kernel (the robot moved somewhere
between one node back and two nodes ahead), then reweights it by how well
the current camera embedding matches each node, and renormalizes.

Run:  python3 demos/filter_basics.py
"""

import numpy as np

from toponav import (
    MeasurementModel,
    MotionModel,
    bayes_localize_init,
    bayes_localize_step,
    calibrate_lambda1,
    distance_profile,
    generate_world,
    WorldConfig,
    predict,
)


def show(label, belief):
    bars = "".join("#" if p > 0.5 else str(int(p * 10)) if p >= 0.05 else "."
                   for p in belief)
    print(f"  {label:<26} [{bars}]  sum={belief.sum():.12f}")


def main():
    rng = np.random.default_rng(0)
    world = generate_world(WorldConfig(length=20.0, dim=64), seed=3)
    topo_map = world.as_map()
    n = topo_map.node_count
    print(f"route with {n} nodes; belief shown as one digit per node (tenths)\n")

    print("1) the motion kernel spreads and folds probability mass")
    motion = MotionModel(w_l=-1, w_u=2)
    point = np.zeros(n)
    point[10] = 1.0
    show("point belief at node 10", point)
    show("after one predict", predict(point, motion))
    at_end = np.zeros(n)
    at_end[n - 1] = 1.0
    show("point belief at the goal", at_end)
    show("after one predict", predict(at_end, motion))
    print("   mass that would leave the route piles up on the end node;")
    print("   nothing is lost, the route ends are absorbing.\n")

    print("2) the measurement scale is calibrated from the first query")
    first_obs = topo_map.store.vector(6)
    profile = distance_profile(first_obs, topo_map.store)
    meas = calibrate_lambda1(profile, kappa=4.0)
    print(f"   distance spread: min {profile.min():.3f}, mean {profile.mean():.3f}")
    print(f"   lambda1 = ln(4) / spread = {meas.lambda1:.3f}")
    print("   so the best-matching node starts 4x as likely as an average one.\n")

    print("3) a full bootstrap-then-step cycle")
    belief, meas = bayes_localize_init(first_obs, topo_map, kappa=4.0)
    show("belief from first query", belief)
    next_obs = topo_map.store.vector(7)
    belief, best = bayes_localize_step(belief, next_obs, topo_map, motion, meas)
    show("after seeing node 7", belief)
    print(f"   filter's best guess: node {best}")

    print("\n4) the update is just Bayes' rule, written out")
    prior = predict(belief, motion)
    lik = np.exp(-meas.lambda1 * distance_profile(topo_map.store.vector(8),
                                                  topo_map.store))
    posterior = prior * lik / (prior * lik).sum()
    show("prior (predicted)", prior)
    show("posterior (reweighted)", posterior)


if __name__ == "__main__":
    main()
