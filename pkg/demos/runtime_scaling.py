"""Why subgoal selection cost matters: per-pair scoring vs embedding search.

A scorer that takes each (observation, candidate) pair through a network
pays once per candidate, so widening the candidate set costs linearly more
wall-clock time. Embedding search computes one distance profile against a
store built offline; the candidate count barely moves the needle.

The per-pair scorer here is a stub that burns a calibrated amount of
floating-point work per evaluation; the cost structure is the subject, not
the network.

Run:  python3 demos/runtime_scaling.py
"""

from toponav import runtime_scaling_bench


def main():
    report = runtime_scaling_bench(candidate_counts=(5, 21, 101),
                                   per_pair_flops=500_000, repetitions=7)

    print(f"store: {report.store_size} nodes, dim {report.embedding_dim}; "
          f"{report.per_pair_flops:,} flops per pair; "
          f"median of {report.repetitions} repetitions\n")

    print(f"{'candidates':>10} {'pairwise (us)':>14} {'embedding (us)':>15} "
          f"{'pairs':>6}")
    for i, n in enumerate(report.candidate_counts):
        pw = report.median_latency_ns["pairwise"][i] / 1000
        emb = report.median_latency_ns["embedding"][i] / 1000
        print(f"{n:>10} {pw:>14.0f} {emb:>15.0f} {report.pair_counts[i]:>6}")

    print(f"\npairwise fit: {report.slope_ns_per_candidate['pairwise']:.0f} ns "
          f"per extra candidate, R^2 = {report.r_squared['pairwise']:.3f}")
    print(f"embedding spread across counts (max/min): "
          f"{report.embedding_latency_ratio:.2f}")


if __name__ == "__main__":
    main()
