"""Localizing an observation embedding against a topological map.

Three selectors are provided:

* a discrete Bayesian filter that keeps a full posterior belief over all map
  nodes, alternating a motion-model prediction with a place-recognition
  measurement update — it starts from the first query alone (kidnapped-robot
  mode) and can re-localize anywhere on the route;
* a sliding-window localizer that restricts the match to a band around the
  previous result — cheap, but it must be told the start node and can drift;
* an unconstrained global nearest-neighbor localizer.

Beliefs are plain probability vectors over node indices 0..S, kept in linear
space and renormalized at every measurement update. Likelihoods are bounded
in (0, 1] and routes are short, so log-space bookkeeping buys nothing here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .embeddings import distance_profile
from .errors import FilterDivergenceError
from .topomap import TopologicalMap

# Motion-model transition bounds: per step the robot advances up to
# DEFAULT_FORWARD_BOUND nodes, stays put, or falls back one node, all with
# equal probability. Calibrated operating values for a node-per-second-ish
# reference run; both bounds are plain config.
DEFAULT_BACKWARD_BOUND = -1
DEFAULT_FORWARD_BOUND = 2
DEFAULT_KAPPA = 4.0
DEFAULT_WINDOW_SIZE = 5


@dataclass
class MotionModel:
    """Uniform transition kernel over node offsets w_l..w_u (inclusive).

    Offsets that would leave the route are clamped into the nearest end node,
    so probability mass is conserved exactly and the route ends are absorbing.
    `epsilon_uniform` optionally mixes a uniform component into the kernel for
    robustness experiments; 0 disables it and reproduces the pure kernel.
    """

    w_l: int = DEFAULT_BACKWARD_BOUND
    w_u: int = DEFAULT_FORWARD_BOUND
    epsilon_uniform: float = 0.0

    def __post_init__(self):
        if self.w_l > self.w_u:
            raise ValueError(f"w_l={self.w_l} must be <= w_u={self.w_u}")
        if not 0.0 <= self.epsilon_uniform <= 1.0:
            raise ValueError(f"epsilon_uniform must be in [0, 1], got {self.epsilon_uniform}")

    @property
    def kernel_width(self) -> int:
        return self.w_u - self.w_l + 1


@dataclass
class MeasurementModel:
    """Exponential distance-to-likelihood map: exp(-lambda1 * distance)."""

    lambda1: float

    def __post_init__(self):
        if not (np.isfinite(self.lambda1) and self.lambda1 > 0):
            raise ValueError(f"lambda1 must be positive and finite, got {self.lambda1}")


@dataclass
class WindowState:
    """Sliding-window localizer state: center node and odd window width."""

    center: int
    width: int = DEFAULT_WINDOW_SIZE

    def __post_init__(self):
        if self.width < 1 or self.width % 2 == 0:
            raise ValueError(f"window width must be odd and >= 1, got {self.width}")
        if self.center < 0:
            raise ValueError(f"window center must be a valid node index, got {self.center}")


def validate_belief(probs: np.ndarray, node_count: int | None = None) -> np.ndarray:
    """Check belief invariants: matching length, nonnegative, sums to 1."""
    b = np.asarray(probs, dtype=np.float64)
    if b.ndim != 1:
        raise ValueError(f"belief must be 1-D, got shape {b.shape}")
    if node_count is not None and b.shape[0] != node_count:
        raise ValueError(f"belief length {b.shape[0]} does not match map node count {node_count}")
    if np.any(b < 0):
        raise ValueError("belief has negative entries")
    if abs(float(b.sum()) - 1.0) > 1e-9:
        raise ValueError(f"belief sums to {b.sum()!r}, expected 1")
    return b


def predict(belief: np.ndarray, motion: MotionModel) -> np.ndarray:
    """Propagate a belief one step through the motion model.

    new[i] = sum_j belief[j] * K(i - j) with K uniform over offsets
    w_l..w_u; mass that would land outside 0..S folds into node 0 or S.
    Pure linear operator, conserves total mass; no renormalization.
    """
    b = np.asarray(belief, dtype=np.float64)
    if b.ndim != 1 or b.shape[0] < 1:
        raise ValueError(f"belief must be a non-empty 1-D vector, got shape {b.shape}")
    n = b.shape[0]
    w = 1.0 / motion.kernel_width
    out = np.zeros(n, dtype=np.float64)
    for offset in range(motion.w_l, motion.w_u + 1):
        if offset == 0:
            out += b * w
        elif offset > 0:
            if offset >= n:
                out[n - 1] += b.sum() * w
            else:
                out[offset:] += b[: n - offset] * w
                out[n - 1] += b[n - offset :].sum() * w
        else:
            back = -offset
            if back >= n:
                out[0] += b.sum() * w
            else:
                out[: n - back] += b[back:] * w
                out[0] += b[:back].sum() * w
    if motion.epsilon_uniform > 0.0:
        eps = motion.epsilon_uniform
        out = (1.0 - eps) * out + eps * (b.sum() / n)
    return out


def measurement_likelihood(observation, topo_map: TopologicalMap,
                           meas: MeasurementModel) -> np.ndarray:
    """Likelihood of the observation at each node: exp(-lambda1 * ||z_t - z_s||)."""
    profile = distance_profile(observation, topo_map.store)
    return np.exp(-meas.lambda1 * profile)


def update(prior: np.ndarray, likelihood: np.ndarray) -> np.ndarray:
    """Posterior proportional to prior * likelihood, normalized to sum 1.

    Underflow guard: if every unnormalized product is tiny (< 1e-300 at the
    max), the likelihood is rescaled by its own max before multiplying; the
    posterior is invariant to that rescaling.
    """
    p = np.asarray(prior, dtype=np.float64)
    lik = np.asarray(likelihood, dtype=np.float64)
    if p.shape != lik.shape:
        raise ValueError(f"prior shape {p.shape} does not match likelihood shape {lik.shape}")
    if np.any(lik < 0):
        raise ValueError("likelihood has negative entries")
    post = p * lik
    m = float(post.max(initial=0.0))
    if m < 1e-300:
        lik_max = float(lik.max(initial=0.0))
        if lik_max > 0.0:
            post = p * (lik / lik_max)
    total = float(post.sum())
    if total <= 0.0 or not np.isfinite(total):
        raise FilterDivergenceError("posterior mass vanished: prior and likelihood "
                                    "have no overlapping support")
    return post / total


def calibrate_lambda1(first_profile, kappa: float = DEFAULT_KAPPA) -> MeasurementModel:
    """Pick the likelihood scale from the first query's distance profile.

    lambda1 = ln(kappa) / (mean(d) - min(d)): the best match is kappa times
    as likely as an average-distance node on the first update. The rule is
    invariant to uniform scaling of the embeddings, and degenerates to
    lambda1 = 1 when the profile has no spread.
    """
    d = np.asarray(first_profile, dtype=np.float64)
    if d.ndim != 1 or d.shape[0] < 2:
        raise ValueError(f"need at least 2 distances to calibrate, got shape {d.shape}")
    if not np.all(np.isfinite(d)):
        raise ValueError("distance profile contains NaN or Inf")
    if not kappa > 1.0:
        raise ValueError(f"kappa must be > 1, got {kappa}")
    spread = float(d.mean() - d.min())
    if spread < 1e-9:
        return MeasurementModel(lambda1=1.0)
    return MeasurementModel(lambda1=float(np.log(kappa)) / spread)


def bayes_localize_init(observation, topo_map: TopologicalMap,
                        kappa: float = DEFAULT_KAPPA) -> tuple[np.ndarray, MeasurementModel]:
    """Bootstrap the filter from the first place-recognition query alone.

    Calibrates lambda1 from the first distance profile and returns the
    normalized first measurement likelihood as the initial belief, so the
    filter starts with no prior on the robot's position.
    """
    profile = distance_profile(observation, topo_map.store)
    meas = calibrate_lambda1(profile, kappa)
    lik = np.exp(-meas.lambda1 * profile)
    return lik / lik.sum(), meas


def bayes_localize_step(belief: np.ndarray, observation, topo_map: TopologicalMap,
                        motion: MotionModel, meas: MeasurementModel) -> tuple[np.ndarray, int]:
    """One filter iteration: predict, measure, update; returns (belief, best node).

    Ties in the posterior argmax break toward the lower index.
    """
    prior = predict(np.asarray(belief, dtype=np.float64), motion)
    if prior.shape[0] != topo_map.node_count:
        raise ValueError(f"belief length {prior.shape[0]} does not match map "
                         f"node count {topo_map.node_count}")
    lik = measurement_likelihood(observation, topo_map, meas)
    posterior = update(prior, lik)
    return posterior, int(np.argmax(posterior))


def window_candidates(state: WindowState, node_count: int) -> np.ndarray:
    """Node indices inside the window, clipped to the route."""
    half = state.width // 2
    lo = max(0, state.center - half)
    hi = min(node_count - 1, state.center + half)
    return np.arange(lo, hi + 1)


def window_localize_step(state: WindowState, observation,
                         topo_map: TopologicalMap) -> tuple[WindowState, int]:
    """Best match restricted to a window around the previous result.

    The new window re-centers on the match, which is what lets the window
    drift away from the robot when the content inside it is ambiguous.
    """
    candidates = window_candidates(state, topo_map.node_count)
    profile = distance_profile(observation, topo_map.store)
    best = int(candidates[np.argmin(profile[candidates])])
    return WindowState(center=best, width=state.width), best


def global_localize_step(observation, topo_map: TopologicalMap) -> int:
    """Unconstrained nearest-neighbor match over all nodes."""
    profile = distance_profile(observation, topo_map.store)
    return int(np.argmin(profile))


SELECTORS = ("bayes", "window", "global")


@dataclass
class LocalizerConfig:
    """Selector choice plus every tunable the selectors consume.

    Matches the JSON config block: {"selector": ..., "w_l": ..., "w_u": ...,
    "kappa": ..., "window_size": ..., "epsilon_uniform": ...}.
    """

    selector: str = "bayes"
    w_l: int = DEFAULT_BACKWARD_BOUND
    w_u: int = DEFAULT_FORWARD_BOUND
    kappa: float = DEFAULT_KAPPA
    window_size: int = DEFAULT_WINDOW_SIZE
    epsilon_uniform: float = 0.0

    def __post_init__(self):
        if self.selector not in SELECTORS:
            raise ValueError(f"unknown selector {self.selector!r}, expected one of {SELECTORS}")
        MotionModel(self.w_l, self.w_u, self.epsilon_uniform)  # bounds check
        if not self.kappa > 1.0:
            raise ValueError(f"kappa must be > 1, got {self.kappa}")
        if self.window_size < 1 or self.window_size % 2 == 0:
            raise ValueError(f"window_size must be odd and >= 1, got {self.window_size}")

    def to_dict(self) -> dict:
        return {"selector": self.selector, "w_l": self.w_l, "w_u": self.w_u,
                "kappa": self.kappa, "window_size": self.window_size,
                "epsilon_uniform": self.epsilon_uniform}

    @classmethod
    def from_dict(cls, obj: dict) -> "LocalizerConfig":
        known = {f: obj[f] for f in ("selector", "w_l", "w_u", "kappa",
                                     "window_size", "epsilon_uniform") if f in obj}
        unknown = set(obj) - set(known)
        if unknown:
            raise ValueError(f"unknown localizer config keys: {sorted(unknown)}")
        return cls(**known)


class BayesLocalizer:
    """Stateful wrapper running the discrete filter over successive queries.

    The first step bootstraps belief and lambda1 from the query itself; later
    steps run the full predict/measure/update cycle. Each instance must be
    stepped sequentially; independent instances are fully isolated.
    """

    def __init__(self, topo_map: TopologicalMap, config: LocalizerConfig):
        self.topo_map = topo_map
        self.motion = MotionModel(config.w_l, config.w_u, config.epsilon_uniform)
        self.kappa = config.kappa
        self.meas: MeasurementModel | None = None
        self.belief: np.ndarray | None = None

    def step(self, observation) -> int:
        if self.belief is None:
            self.belief, self.meas = bayes_localize_init(observation, self.topo_map, self.kappa)
            return int(np.argmax(self.belief))
        self.belief, best = bayes_localize_step(self.belief, observation, self.topo_map,
                                                self.motion, self.meas)
        return best


class WindowLocalizer:
    """Stateful sliding-window wrapper; the start node must be supplied."""

    def __init__(self, topo_map: TopologicalMap, config: LocalizerConfig, start_node: int = 0):
        self.topo_map = topo_map
        self.state = WindowState(center=start_node, width=config.window_size)

    def step(self, observation) -> int:
        self.state, best = window_localize_step(self.state, observation, self.topo_map)
        return best


class GlobalLocalizer:
    """Stateless global nearest-neighbor wrapper."""

    def __init__(self, topo_map: TopologicalMap, config: LocalizerConfig):
        self.topo_map = topo_map

    def step(self, observation) -> int:
        return global_localize_step(observation, self.topo_map)


def make_localizer(topo_map: TopologicalMap, config: LocalizerConfig, start_node: int = 0):
    """Instantiate the selector named by `config`."""
    if config.selector == "bayes":
        return BayesLocalizer(topo_map, config)
    if config.selector == "window":
        return WindowLocalizer(topo_map, config, start_node=start_node)
    return GlobalLocalizer(topo_map, config)
