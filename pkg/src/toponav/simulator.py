"""Deterministic 1-D route world for headless navigation episodes.

The world is an arc-length line with equally spaced nodes, each carrying a
unit embedding drawn from a spatially correlated field. Observations are
interpolated node embeddings plus optional Gaussian noise; the robot is a
point that moves toward its current subgoal by a fixed speed per step. One
simulator step stands for one inference tick of the real system.

There is deliberately no 2-D pose or heading: the claims under test concern
which node gets selected, not steering geometry, and a 1-D world isolates
exactly that variable. Bursty regions — runs of nodes sharing one embedding
up to a tiny perturbation — model repetitive visual content that makes
distinct places look alike to the localizer.

Everything is seeded: (world seed, episode seed, config) reproduces an
episode bit-for-bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .localization import LocalizerConfig, make_localizer
from .subgoal import decide_subgoal
from .topomap import MapNode, TopologicalMap

# Embedding-field calibration constants (documented config, not measured
# values): smoothing weight for adjacent-node correlation and the size of
# the per-node perturbation inside a bursty region.
DEFAULT_ALPHA = 0.7
BURSTY_PERTURBATION = 0.01

FAILURE_TIMEOUT = "timeout"
FAILURE_FALSE_GOAL = "false_goal_signal"
FAILURE_STUCK = "stuck"


@dataclass(frozen=True)
class WorldConfig:
    """Geometry and embedding-field parameters for a synthetic route."""

    length: float = 40.0
    node_spacing: float = 1.0
    dim: int = 64
    alpha: float = DEFAULT_ALPHA
    bursty_regions: tuple = ()

    def __post_init__(self):
        if self.node_spacing <= 0:
            raise ValueError(f"node_spacing must be > 0, got {self.node_spacing}")
        if self.length < 2 * self.node_spacing:
            raise ValueError(f"length {self.length} must be >= 2 * spacing {self.node_spacing}")
        if self.dim < 1:
            raise ValueError(f"dim must be >= 1, got {self.dim}")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must be in [0, 1], got {self.alpha}")


class RouteWorld:
    """Synthesized route: node arc positions plus the base embedding field."""

    def __init__(self, config: WorldConfig, base_embeddings: np.ndarray, seed: int):
        self.config = config
        self.base_embeddings = base_embeddings  # (node_count, dim) float32, unit rows
        self.seed = seed

    @property
    def node_count(self) -> int:
        return self.base_embeddings.shape[0]

    @property
    def goal_index(self) -> int:
        return self.node_count - 1

    @property
    def route_length(self) -> float:
        """Arc length from node 0 to the goal node."""
        return self.goal_index * self.config.node_spacing

    def node_position(self, index: int) -> float:
        return index * self.config.node_spacing

    def nearest_node(self, arc_position: float) -> int:
        i = int(round(arc_position / self.config.node_spacing))
        return min(max(i, 0), self.goal_index)

    def as_map(self) -> TopologicalMap:
        """The topological map a reference run over this world would produce."""
        nodes = [MapNode(index=i, embedding=self.base_embeddings[i].astype(np.float64),
                         position=(self.node_position(i), 0.0))
                 for i in range(self.node_count)]
        return TopologicalMap(nodes)


def _unit(vec: np.ndarray) -> np.ndarray:
    return vec / np.linalg.norm(vec)


def generate_world(config: WorldConfig, seed: int) -> RouteWorld:
    """Build the embedding field by first-order smoothing of unit randoms.

    e_0 is a random unit vector; e_s = normalize(alpha * e_{s-1} +
    (1 - alpha) * g_s) with g_s a fresh unit random, so adjacent nodes
    correlate and the correlation decays with node lag. Bursty regions are
    then overwritten with one shared embedding per region plus a per-node
    perturbation of magnitude BURSTY_PERTURBATION.
    """
    rng = np.random.default_rng(seed)
    node_count = int(math.floor(config.length / config.node_spacing)) + 1
    region_of = {}
    for start, end in config.bursty_regions:
        start, end = int(start), int(end)
        if not 0 <= start <= end <= node_count - 1:
            raise ValueError(f"bursty region ({start}, {end}) outside route 0..{node_count - 1}")
        for s in range(start, end + 1):
            region_of[s] = (start, end)

    # Region members are written in-line so the smoothing chain continues
    # from the shared embedding: the views just past a repetitive stretch
    # still overlap it, the same way adjacent camera frames always do.
    rows = np.empty((node_count, config.dim), dtype=np.float64)
    shared_vectors = {}
    for s in range(node_count):
        if s in region_of:
            key = region_of[s]
            if key not in shared_vectors:
                shared_vectors[key] = _unit(rng.standard_normal(config.dim))
            bump = _unit(rng.standard_normal(config.dim)) * BURSTY_PERTURBATION
            rows[s] = _unit(shared_vectors[key] + bump)
        elif s == 0:
            rows[s] = _unit(rng.standard_normal(config.dim))
        else:
            fresh = _unit(rng.standard_normal(config.dim))
            rows[s] = _unit(config.alpha * rows[s - 1] + (1.0 - config.alpha) * fresh)
    return RouteWorld(config, rows.astype(np.float32), seed)


@dataclass(frozen=True)
class ObservationModel:
    """Synthetic camera+encoder: interpolated field value plus unit-resphered noise."""

    noise_sigma: float = 0.0

    def __post_init__(self):
        if self.noise_sigma < 0:
            raise ValueError(f"noise_sigma must be >= 0, got {self.noise_sigma}")


def observe(world: RouteWorld, model: ObservationModel, robot: "RobotState",
            rng: np.random.Generator) -> np.ndarray:
    """Observation embedding at the robot's arc position.

    Exactly at a node the base embedding is returned unchanged (bit-equal to
    the map row); between nodes the two neighbors are linearly blended by
    arc fraction and renormalized. Noise, when enabled, is added per
    component and the result is renormalized.
    """
    x = robot.arc_position / world.config.node_spacing
    i = int(math.floor(x))
    i = min(max(i, 0), world.goal_index)
    frac = x - i
    if frac <= 0.0 or i == world.goal_index:
        base = world.base_embeddings[i].astype(np.float64)
    else:
        blend = ((1.0 - frac) * world.base_embeddings[i].astype(np.float64)
                 + frac * world.base_embeddings[i + 1].astype(np.float64))
        base = _unit(blend)
    if model.noise_sigma > 0.0:
        return _unit(base + rng.normal(0.0, model.noise_sigma, size=base.shape[0]))
    return base


@dataclass
class RobotState:
    """Point robot on the route arc."""

    arc_position: float
    speed: float = 1.0


def step_robot(robot: RobotState, decision, world: RouteWorld,
               motion_noise: float = 0.0, rng: np.random.Generator | None = None) -> RobotState:
    """Move toward the subgoal node by at most `speed`, clamped to the route.

    A subgoal behind the robot moves it backward — that is the mechanism by
    which bad subgoal choices turn into navigation failures rather than
    being silently absorbed.
    """
    target = world.node_position(decision.subgoal_node)
    delta = target - robot.arc_position
    move = math.copysign(min(robot.speed, abs(delta)), delta) if delta != 0.0 else 0.0
    if motion_noise > 0.0:
        if rng is None:
            raise ValueError("motion_noise > 0 requires an rng")
        move += rng.normal(0.0, motion_noise)
    new_pos = min(max(robot.arc_position + move, 0.0), world.route_length)
    return RobotState(arc_position=new_pos, speed=robot.speed)


@dataclass(frozen=True)
class EpisodePolicy:
    """Per-episode kinematics, noise, and termination settings.

    The default speed of one node spacing per step keeps the robot from
    lingering next to the goal node, where belief mass folded in by the
    motion model's boundary clamping accumulates; much slower speeds are a
    regime where the filter can emit the goal signal a couple of nodes
    early — reproducible deliberately, not a sane default.
    """

    speed: float = 1.0
    motion_noise: float = 0.0
    noise_sigma: float = 0.05
    goal_tolerance: float = 1.0
    max_steps: int | None = None  # None: 4x the zero-noise optimal step count
    stall_window: int = 50
    start_arc_position: float = 0.0
    kidnapped: bool = False
    kidnapped_fraction: float = 0.6

    def __post_init__(self):
        if self.speed <= 0:
            raise ValueError(f"speed must be > 0, got {self.speed}")
        if self.goal_tolerance <= 0:
            raise ValueError(f"goal_tolerance must be > 0, got {self.goal_tolerance}")
        if self.stall_window < 1:
            raise ValueError(f"stall_window must be >= 1, got {self.stall_window}")
        if not 0.0 <= self.kidnapped_fraction <= 1.0:
            raise ValueError(f"kidnapped_fraction must be in [0, 1], "
                             f"got {self.kidnapped_fraction}")


@dataclass
class EpisodeResult:
    """Outcome and per-step trace of one navigation episode."""

    success: bool
    steps: int
    localization_error_series: np.ndarray
    subgoal_series: list[int]
    failure_reason: str | None = None
    final_arc_position: float = 0.0

    @property
    def mean_localization_error(self) -> float:
        return float(np.mean(self.localization_error_series))


def episode_budget(world: RouteWorld, policy: EpisodePolicy) -> int:
    """Default step budget: 4x the zero-noise optimal step count, floor 20."""
    if policy.max_steps is not None:
        return policy.max_steps
    optimal = math.ceil(world.route_length / policy.speed)
    return max(4 * optimal, 20)


def run_episode(world: RouteWorld, localizer_config: LocalizerConfig,
                policy: EpisodePolicy, seed: int,
                start_arc_position: float | None = None) -> EpisodeResult:
    """One full navigation episode: observe, localize, pick subgoal, move.

    Terminates on the goal signal (success if the robot is within
    goal_tolerance of the goal node, otherwise a false_goal_signal failure),
    on an exhausted step budget (timeout), or after stall_window steps with
    no forward progress (stuck). The sliding-window localizer always starts
    at node 0 regardless of the robot's true start — exactly the manual
    start-node assumption a kidnapped start violates.
    """
    topo_map = world.as_map()
    rng = np.random.default_rng(seed)
    if start_arc_position is None:
        start_arc_position = (policy.kidnapped_fraction * world.route_length
                              if policy.kidnapped else policy.start_arc_position)
    start_arc_position = min(max(start_arc_position, 0.0), world.route_length)
    robot = RobotState(arc_position=start_arc_position, speed=policy.speed)
    localizer = make_localizer(topo_map, localizer_config, start_node=0)
    obs_model = ObservationModel(noise_sigma=policy.noise_sigma)
    budget = episode_budget(world, policy)
    goal_arc = world.node_position(world.goal_index)

    loc_errors: list[int] = []
    subgoals: list[int] = []
    best_progress = robot.arc_position
    stall = 0

    for step in range(1, budget + 1):
        obs = observe(world, obs_model, robot, rng)
        best = localizer.step(obs)
        loc_errors.append(abs(best - world.nearest_node(robot.arc_position)))
        decision = decide_subgoal(best, topo_map)
        subgoals.append(decision.subgoal_node)

        if decision.goal_reached:
            at_goal = abs(robot.arc_position - goal_arc) <= policy.goal_tolerance
            return EpisodeResult(
                success=at_goal, steps=step,
                localization_error_series=np.asarray(loc_errors),
                subgoal_series=subgoals,
                failure_reason=None if at_goal else FAILURE_FALSE_GOAL,
                final_arc_position=robot.arc_position)

        robot = step_robot(robot, decision, world, policy.motion_noise, rng)
        if robot.arc_position > best_progress + 1e-9:
            best_progress = robot.arc_position
            stall = 0
        else:
            stall += 1
            if stall >= policy.stall_window:
                return EpisodeResult(
                    success=False, steps=step,
                    localization_error_series=np.asarray(loc_errors),
                    subgoal_series=subgoals, failure_reason=FAILURE_STUCK,
                    final_arc_position=robot.arc_position)

    return EpisodeResult(success=False, steps=budget,
                         localization_error_series=np.asarray(loc_errors),
                         subgoal_series=subgoals, failure_reason=FAILURE_TIMEOUT,
                         final_arc_position=robot.arc_position)


def localization_trial(world: RouteWorld, localizer_config: LocalizerConfig,
                       arc_position: float, steps: int, noise_sigma: float,
                       seed: int) -> np.ndarray:
    """Open-loop localization episode: the robot observes but never moves.

    Returns the per-step |best_node - true_nearest_node| series. Isolates
    the localizer from closed-loop motion effects; the scripted wrong-start
    scenario uses it to ask whether a localizer finds the robot's true place
    at all, without the robot helpfully driving toward the wrong belief.
    """
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    topo_map = world.as_map()
    rng = np.random.default_rng(seed)
    robot = RobotState(arc_position=min(max(arc_position, 0.0), world.route_length))
    localizer = make_localizer(topo_map, localizer_config, start_node=0)
    obs_model = ObservationModel(noise_sigma=noise_sigma)
    true_node = world.nearest_node(robot.arc_position)
    errors = np.empty(steps, dtype=np.int64)
    for t in range(steps):
        obs = observe(world, obs_model, robot, rng)
        errors[t] = abs(localizer.step(obs) - true_node)
    return errors


@dataclass
class BatchSummary:
    """Aggregated success rates: one row per (selector, scenario)."""

    rows: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"rows": self.rows}


def run_batch(worlds, localizer_configs, seeds, policy: EpisodePolicy,
              scenario: str = "nominal") -> tuple[list[dict], BatchSummary]:
    """Run the full worlds x configs x seeds grid of episodes.

    Every config sees the same worlds and the same seed list, so per-seed
    outcomes are directly comparable across selectors. Returns one record
    dict per episode (JSON-lines ready) in deterministic (world, selector,
    seed) order, plus a per-selector summary.
    """
    worlds = list(worlds)
    localizer_configs = list(localizer_configs)
    seeds = list(seeds)
    if not worlds or not localizer_configs or not seeds:
        raise ValueError("batch grid must contain at least one world, config, and seed")

    records = []
    tally: dict[str, list[int]] = {}
    for world_id, world in worlds:
        for config in localizer_configs:
            for seed in seeds:
                result = run_episode(world, config, policy, seed)
                records.append({
                    "world_id": world_id,
                    "selector": config.selector,
                    "scenario": scenario,
                    "seed": int(seed),
                    "success": result.success,
                    "steps": result.steps,
                    "failure_reason": result.failure_reason,
                    "mean_loc_error": result.mean_localization_error,
                })
                wins, total = tally.setdefault(config.selector, [0, 0])
                tally[config.selector] = [wins + int(result.success), total + 1]

    summary = BatchSummary(rows=[
        {"selector": selector, "scenario": scenario, "episodes": total,
         "success_rate": wins / total}
        for selector, (wins, total) in tally.items()])
    return records, summary
