"""Topological navigation with place-recognition subgoal selection.

A route is a chain of nodes, each holding an image embedding captured on a
reference run. At runtime the robot localizes by comparing its current
observation embedding against the node embeddings — either with a plain
nearest neighbor, a sliding window around the last match, or a discrete
Bayesian filter that carries temporal consistency across steps — and then
steers toward the node just past the localized one. The package bundles the
filter math, the map and embedding file formats, a pairwise-scoring baseline
with its cost model, a deterministic 1-D simulator for closed-loop episodes,
and retrieval/runtime benchmarks.
"""

from .embeddings import (
    DEFAULT_DIM,
    EmbeddingStore,
    RowMeta,
    as_embedding,
    distance_profile,
    l2_distance,
    nn_search,
    read_embedding_file,
    sidecar_path,
    write_embedding_file,
)
from .errors import (
    BadMagicError,
    CountMismatchError,
    DimensionMismatchError,
    EmptyStoreError,
    FilterDivergenceError,
    FormatError,
    SidecarMismatchError,
    ToponavError,
    UnsupportedVersionError,
)
from .evalbench import (
    BenchReport,
    RetrievalDataset,
    emit_report,
    paired_outcomes,
    recall_at_n,
    runtime_scaling_bench,
    write_episode_records,
)
from .localization import (
    BayesLocalizer,
    GlobalLocalizer,
    LocalizerConfig,
    MeasurementModel,
    MotionModel,
    SELECTORS,
    WindowLocalizer,
    WindowState,
    bayes_localize_init,
    bayes_localize_step,
    calibrate_lambda1,
    global_localize_step,
    make_localizer,
    measurement_likelihood,
    predict,
    update,
    window_localize_step,
)
from .simulator import (
    EpisodePolicy,
    EpisodeResult,
    ObservationModel,
    RobotState,
    RouteWorld,
    WorldConfig,
    generate_world,
    localization_trial,
    observe,
    run_batch,
    run_episode,
    step_robot,
)
from .subgoal import (
    PairwiseScorerStub,
    SubgoalDecision,
    decide_subgoal,
    pairwise_select,
)
from .topomap import MapNode, TopologicalMap, build_map, load_map, save_map

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_DIM",
    "EmbeddingStore",
    "RowMeta",
    "as_embedding",
    "distance_profile",
    "l2_distance",
    "nn_search",
    "read_embedding_file",
    "sidecar_path",
    "write_embedding_file",
    "ToponavError",
    "DimensionMismatchError",
    "EmptyStoreError",
    "FormatError",
    "BadMagicError",
    "UnsupportedVersionError",
    "CountMismatchError",
    "SidecarMismatchError",
    "FilterDivergenceError",
    "BenchReport",
    "RetrievalDataset",
    "emit_report",
    "paired_outcomes",
    "recall_at_n",
    "runtime_scaling_bench",
    "write_episode_records",
    "MotionModel",
    "MeasurementModel",
    "WindowState",
    "LocalizerConfig",
    "SELECTORS",
    "BayesLocalizer",
    "WindowLocalizer",
    "GlobalLocalizer",
    "bayes_localize_init",
    "bayes_localize_step",
    "calibrate_lambda1",
    "global_localize_step",
    "make_localizer",
    "measurement_likelihood",
    "predict",
    "update",
    "window_localize_step",
    "WorldConfig",
    "RouteWorld",
    "ObservationModel",
    "RobotState",
    "EpisodePolicy",
    "EpisodeResult",
    "generate_world",
    "localization_trial",
    "observe",
    "step_robot",
    "run_episode",
    "run_batch",
    "PairwiseScorerStub",
    "SubgoalDecision",
    "decide_subgoal",
    "pairwise_select",
    "MapNode",
    "TopologicalMap",
    "build_map",
    "load_map",
    "save_map",
    "__version__",
]
