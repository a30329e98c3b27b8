"""Command-line entry point wiring maps, simulation, evaluation, and benchmarks.

Configuration resolves in strict precedence order: explicit flags beat the
JSON config file, which beats built-in defaults. The resolved configuration
is validated in full before any run starts and its hash is embedded in every
emitted result record, so an output file always identifies the exact
settings that produced it.

Subcommands: `map build`, `sim run`, `eval recall`, `bench runtime`.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

from .errors import ToponavError
from .evalbench import (RetrievalDataset, emit_report, recall_at_n, runtime_scaling_bench,
                        write_episode_records)
from .embeddings import read_embedding_file
from .localization import LocalizerConfig, SELECTORS
from .simulator import EpisodePolicy, WorldConfig, generate_world, run_batch
from .subgoal import PairwiseScorerStub
from .topomap import build_map, save_map


def _defaults() -> dict:
    """Built-in configuration, one block per module."""
    return {
        "localizer": {"selector": "bayes", "w_l": -1, "w_u": 2,
                      "kappa": 4.0, "window_size": 5},
        "subgoal": {"pairwise_threshold": 3.0, "per_pair_flops": 2_000_000},
        "simulator": {"length": 40.0, "node_spacing": 1.0, "dim": 64, "alpha": 0.7,
                      "bursty_regions": [], "noise_sigma": 0.05, "speed": 1.0,
                      "motion_noise": 0.0, "goal_tolerance": 1.0, "stall_window": 50,
                      "max_steps": None, "episodes": 20, "kidnapped": False,
                      "kidnapped_fraction": 0.6, "world_seed": None},
        "benchmark": {"counts": [5, 21, 101], "reps": 9, "store_size": 512,
                      "embedding_dim": 512},
        "eval": {"n": 1, "radius": 25.0, "method": "embedding_nn"},
        "io": {"seed": 0, "out": ".", "format": "json"},
    }


# flag attribute -> (config block, key); flags use default=SUPPRESS so only
# explicitly given ones override the file/defaults.
_FLAG_MAP = {
    "selector": ("localizer", "selector"),
    "w_l": ("localizer", "w_l"),
    "w_u": ("localizer", "w_u"),
    "kappa": ("localizer", "kappa"),
    "window_size": ("localizer", "window_size"),
    "pairwise_threshold": ("subgoal", "pairwise_threshold"),
    "flops": ("subgoal", "per_pair_flops"),
    "length": ("simulator", "length"),
    "node_spacing": ("simulator", "node_spacing"),
    "dim": ("simulator", "dim"),
    "alpha": ("simulator", "alpha"),
    "noise_sigma": ("simulator", "noise_sigma"),
    "speed": ("simulator", "speed"),
    "motion_noise": ("simulator", "motion_noise"),
    "goal_tolerance": ("simulator", "goal_tolerance"),
    "stall_window": ("simulator", "stall_window"),
    "max_steps": ("simulator", "max_steps"),
    "episodes": ("simulator", "episodes"),
    "kidnapped": ("simulator", "kidnapped"),
    "world_seed": ("simulator", "world_seed"),
    "bursty": ("simulator", "bursty_regions"),
    "counts": ("benchmark", "counts"),
    "reps": ("benchmark", "reps"),
    "store_size": ("benchmark", "store_size"),
    "bench_dim": ("benchmark", "embedding_dim"),
    "n": ("eval", "n"),
    "radius": ("eval", "radius"),
    "method": ("eval", "method"),
    "seed": ("io", "seed"),
    "out": ("io", "out"),
    "format": ("io", "format"),
}


def resolve_config(args: argparse.Namespace) -> tuple[dict, str]:
    """Merge defaults <- config file <- flags; returns (config, hash).

    Unknown blocks or keys in the config file are errors: a typo must fail
    loudly, never silently fall back to a default.
    """
    config = _defaults()
    path = getattr(args, "config", None)
    if path is not None:
        loaded = json.loads(Path(path).read_text())
        if not isinstance(loaded, dict):
            raise ValueError(f"{path}: config must be a JSON object of per-module blocks")
        for block, values in loaded.items():
            if block not in config:
                raise ValueError(f"{path}: unknown config block {block!r}")
            if not isinstance(values, dict):
                raise ValueError(f"{path}: block {block!r} must be an object")
            for key, value in values.items():
                if key not in config[block]:
                    raise ValueError(f"{path}: unknown config key {block}.{key}")
                config[block][key] = value
    for attr, (block, key) in _FLAG_MAP.items():
        if hasattr(args, attr):
            config[block][key] = getattr(args, attr)
    # The hash identifies the experiment: settings plus seed, but not output
    # routing, so the same run emitted into two directories (or formats)
    # carries the same hash and produces identical records.
    hashed = {block: values for block, values in config.items() if block != "io"}
    hashed["seed"] = config["io"]["seed"]
    digest = hashlib.sha256(
        json.dumps(hashed, sort_keys=True).encode("utf-8")).hexdigest()[:12]
    return config, digest


def _localizer_config(config: dict) -> LocalizerConfig:
    block = config["localizer"]
    return LocalizerConfig(selector=block["selector"], w_l=int(block["w_l"]),
                           w_u=int(block["w_u"]), kappa=float(block["kappa"]),
                           window_size=int(block["window_size"]))


def _out_dir(config: dict) -> Path:
    out = Path(config["io"]["out"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_map_build(args: argparse.Namespace) -> int:
    config, _ = resolve_config(args)
    store, meta = read_embedding_file(args.embeddings)
    sequence = [(store.vector(i), meta[i].position, meta[i].image)
                for i in range(store.count)]
    topo_map = build_map(sequence, subsample_stride=args.stride)
    out = _out_dir(config)
    save_map(topo_map, out)
    print(f"map: {topo_map.node_count} nodes, dim {topo_map.dim} -> {out}")
    return 0


def cmd_sim_run(args: argparse.Namespace) -> int:
    config, digest = resolve_config(args)
    sim = config["simulator"]
    world_config = WorldConfig(
        length=float(sim["length"]), node_spacing=float(sim["node_spacing"]),
        dim=int(sim["dim"]), alpha=float(sim["alpha"]),
        bursty_regions=tuple(tuple(int(v) for v in r) for r in sim["bursty_regions"]))
    policy = EpisodePolicy(
        speed=float(sim["speed"]), motion_noise=float(sim["motion_noise"]),
        noise_sigma=float(sim["noise_sigma"]), goal_tolerance=float(sim["goal_tolerance"]),
        max_steps=None if sim["max_steps"] is None else int(sim["max_steps"]),
        stall_window=int(sim["stall_window"]), kidnapped=bool(sim["kidnapped"]),
        kidnapped_fraction=float(sim["kidnapped_fraction"]))
    localizer_config = _localizer_config(config)
    episodes = int(sim["episodes"])
    if episodes < 1:
        raise ValueError(f"episodes must be >= 1, got {episodes}")

    base_seed = int(config["io"]["seed"])
    world_seed = base_seed if sim["world_seed"] is None else int(sim["world_seed"])
    world = generate_world(world_config, world_seed)
    world_id = f"route-{world_seed}"
    if sim["kidnapped"]:
        scenario = "kidnapped"
    elif world_config.bursty_regions:
        scenario = "bursty"
    else:
        scenario = "nominal"
    seeds = list(range(base_seed, base_seed + episodes))

    records, summary = run_batch([(world_id, world)], [localizer_config], seeds,
                                 policy, scenario=scenario)
    for record in records:
        record["config_hash"] = digest

    out = _out_dir(config)
    write_episode_records(out / "episodes.jsonl", records)
    fmt = config["io"]["format"]
    summary_path = out / ("summary.csv" if fmt == "csv" else "summary.json")
    emit_report(summary, summary_path, format=fmt)
    (out / "resolved_config.json").write_text(
        json.dumps({"hash": digest, "config": config}, indent=2, sort_keys=True) + "\n")
    for row in summary.rows:
        print(f"selector={row['selector']} scenario={row['scenario']} "
              f"episodes={row['episodes']} success_rate={row['success_rate']:.4f}")
    return 0


def _positions_from_meta(meta, label: str):
    positions = []
    for i, row in enumerate(meta):
        if row.position is None:
            raise ValueError(f"{label} row {i} has no position; recall needs one per row")
        positions.append(row.position)
    return positions


def cmd_eval_recall(args: argparse.Namespace) -> int:
    config, digest = resolve_config(args)
    block = config["eval"]
    queries, query_meta = read_embedding_file(args.queries)
    database, db_meta = read_embedding_file(args.database)
    dataset = RetrievalDataset(
        queries=queries, query_positions=_positions_from_meta(query_meta, "query"),
        database=database, database_positions=_positions_from_meta(db_meta, "database"),
        positive_radius=float(block["radius"]))
    stub = PairwiseScorerStub(per_pair_flops=0)
    value = recall_at_n(dataset, int(block["n"]), method=block["method"], stub=stub)
    print(f"recall@{block['n']} ({block['method']}, radius {block['radius']} m) = {value:.4f}")

    out = _out_dir(config)
    payload = {"config_hash": digest, "method": block["method"], "n": int(block["n"]),
               "radius": float(block["radius"]), "queries": queries.count,
               "database": database.count, "recall": value}
    if config["io"]["format"] == "csv":
        lines = [",".join(str(k) for k in payload), ",".join(str(payload[k]) for k in payload)]
        (out / "recall.csv").write_text("\n".join(lines) + "\n")
    else:
        (out / "recall.json").write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return 0


def cmd_bench_runtime(args: argparse.Namespace) -> int:
    config, _ = resolve_config(args)
    block = config["benchmark"]
    report = runtime_scaling_bench(
        candidate_counts=[int(c) for c in block["counts"]],
        embedding_dim=int(block["embedding_dim"]),
        per_pair_flops=int(config["subgoal"]["per_pair_flops"]),
        repetitions=int(block["reps"]), store_size=int(block["store_size"]),
        seed=int(config["io"]["seed"]))
    out = _out_dir(config)
    fmt = config["io"]["format"]
    emit_report(report, out / ("bench.csv" if fmt == "csv" else "bench.json"), format=fmt)
    for method in sorted(report.median_latency_ns):
        medians = ", ".join(f"{n}:{t}ns" for n, t in
                            zip(report.candidate_counts, report.median_latency_ns[method]))
        print(f"{method}: {medians}  slope={report.slope_ns_per_candidate[method]:.0f} ns/cand "
              f"R2={report.r_squared[method]:.4f}")
    print(f"embedding latency ratio (max/min): {report.embedding_latency_ratio:.3f}")
    print(f"pair counts: {report.pair_counts}")
    return 0


def _int_or_none(text: str):
    return None if text.lower() == "none" else int(text)


def _comma_ints(text: str) -> list[int]:
    return [int(part) for part in text.split(",") if part.strip()]


def _region(text: str) -> list[int]:
    try:
        start, end = text.split(":")
        return [int(start), int(end)]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(
            f"expected START:END node indices, got {text!r}") from exc


class _AppendRegion(argparse.Action):
    """Collect repeated --bursty flags into a fresh list (not the default)."""

    def __call__(self, parser, namespace, values, option_string=None):
        current = getattr(namespace, self.dest, None)
        if current is None or current is argparse.SUPPRESS:
            current = []
        namespace.__setattr__(self.dest, current + [values])


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    sup = argparse.SUPPRESS
    common.add_argument("--config", default=None, metavar="PATH",
                        help="JSON config file of per-module blocks (default: none)")
    common.add_argument("--seed", type=int, default=sup,
                        help="base random seed (default: 0)")
    common.add_argument("--out", default=sup, metavar="DIR",
                        help="output directory (default: current directory)")
    common.add_argument("--format", choices=("json", "csv"), default=sup,
                        help="report format (default: json)")
    return common


def _selector_flags() -> argparse.ArgumentParser:
    sel = argparse.ArgumentParser(add_help=False)
    sup = argparse.SUPPRESS
    sel.add_argument("--selector", choices=SELECTORS, default=sup,
                     help="localizer to run (default: bayes)")
    sel.add_argument("--w-l", dest="w_l", type=int, default=sup,
                     help="motion-model backward offset bound (default: -1)")
    sel.add_argument("--w-u", dest="w_u", type=int, default=sup,
                     help="motion-model forward offset bound (default: 2)")
    sel.add_argument("--kappa", type=float, default=sup,
                     help="likelihood calibration ratio (default: 4.0)")
    sel.add_argument("--window-size", dest="window_size", type=int, default=sup,
                     help="sliding-window width, odd (default: 5)")
    sel.add_argument("--pairwise-threshold", dest="pairwise_threshold", type=float,
                     default=sup, help="pairwise selection threshold (default: 3.0)")
    return sel


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="toponav",
        description="Topological navigation: maps, localization, simulation, benchmarks.")
    groups = parser.add_subparsers(dest="group", required=True)
    common = _common_flags()
    selector = _selector_flags()
    sup = argparse.SUPPRESS

    map_group = groups.add_parser("map", help="map construction").add_subparsers(
        dest="cmd", required=True)
    p = map_group.add_parser("build", parents=[common],
                             help="build a route map from an embedding file")
    p.add_argument("--embeddings", required=True, metavar="PATH",
                   help="embedding binary (sidecar required alongside)")
    p.add_argument("--stride", type=int, default=1,
                   help="keep every stride-th capture (default: 1)")
    p.set_defaults(func=cmd_map_build)

    sim_group = groups.add_parser("sim", help="simulated navigation").add_subparsers(
        dest="cmd", required=True)
    p = sim_group.add_parser("run", parents=[common, selector],
                             help="run simulated navigation episodes")
    p.add_argument("--episodes", type=int, default=sup,
                   help="episodes to run (default: 20)")
    p.add_argument("--length", type=float, default=sup,
                   help="route length in meters (default: 40.0)")
    p.add_argument("--node-spacing", dest="node_spacing", type=float, default=sup,
                   help="map node spacing in meters (default: 1.0)")
    p.add_argument("--dim", type=int, default=sup,
                   help="embedding dimension of the synthetic world (default: 64)")
    p.add_argument("--alpha", type=float, default=sup,
                   help="embedding-field smoothing weight (default: 0.7)")
    p.add_argument("--noise-sigma", dest="noise_sigma", type=float, default=sup,
                   help="observation noise std (default: 0.05)")
    p.add_argument("--speed", type=float, default=sup,
                   help="robot speed, meters per step (default: 1.0)")
    p.add_argument("--motion-noise", dest="motion_noise", type=float, default=sup,
                   help="motion noise std (default: 0.0)")
    p.add_argument("--goal-tolerance", dest="goal_tolerance", type=float, default=sup,
                   help="success radius around the goal node (default: 1.0)")
    p.add_argument("--stall-window", dest="stall_window", type=int, default=sup,
                   help="steps without progress before 'stuck' (default: 50)")
    p.add_argument("--max-steps", dest="max_steps", type=_int_or_none, default=sup,
                   help="step budget; 'none' means 4x optimal (default: none)")
    p.add_argument("--kidnapped", action="store_true", default=sup,
                   help="teleport the start mid-route (default: off)")
    p.add_argument("--world-seed", dest="world_seed", type=int, default=sup,
                   help="world-generation seed (default: --seed)")
    p.add_argument("--bursty", action=_AppendRegion, type=_region, default=sup,
                   metavar="START:END",
                   help="bursty node region, repeatable (default: none)")
    p.set_defaults(func=cmd_sim_run)

    eval_group = groups.add_parser("eval", help="retrieval evaluation").add_subparsers(
        dest="cmd", required=True)
    p = eval_group.add_parser("recall", parents=[common],
                              help="recall@N over a query/database pair")
    p.add_argument("--queries", required=True, metavar="PATH",
                   help="query embedding binary (positions in sidecar)")
    p.add_argument("--database", required=True, metavar="PATH",
                   help="database embedding binary (positions in sidecar)")
    p.add_argument("--n", type=int, default=sup, help="retrieval depth (default: 1)")
    p.add_argument("--radius", type=float, default=sup,
                   help="positive radius in meters (default: 25.0)")
    p.add_argument("--method", choices=("embedding_nn", "pairwise_stub"), default=sup,
                   help="ranking method (default: embedding_nn)")
    p.set_defaults(func=cmd_eval_recall)

    bench_group = groups.add_parser("bench", help="runtime benchmarks").add_subparsers(
        dest="cmd", required=True)
    p = bench_group.add_parser("runtime", parents=[common],
                               help="selection-latency scaling benchmark")
    p.add_argument("--counts", type=_comma_ints, default=sup, metavar="N,N,N",
                   help="candidate counts, ascending (default: 5,21,101)")
    p.add_argument("--flops", type=int, default=sup,
                   help="synthetic flops per pair evaluation (default: 2000000)")
    p.add_argument("--reps", type=int, default=sup,
                   help="timing repetitions per point (default: 9)")
    p.add_argument("--store-size", dest="store_size", type=int, default=sup,
                   help="benchmark store rows (default: 512)")
    p.add_argument("--bench-dim", dest="bench_dim", type=int, default=sup,
                   help="benchmark embedding dimension (default: 512)")
    p.set_defaults(func=cmd_bench_runtime)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ToponavError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
