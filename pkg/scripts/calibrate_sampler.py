#!/usr/bin/env python3
"""Sweep ego-sampler settings and report serialized-sequence length stats.

Helps pick (depth, fanout) pairs whose prolonged sequences fit a context
window before committing to a pre-training run. Works on a provided graph
JSON/JSONL or on a built-in synthetic power-law graph.

Example:
    python scripts/calibrate_sampler.py --synthetic 100000 --mode node-ego \
        --depths 1 2 3 --fanouts 4 8 12 --budget 256 --trials 200
"""
import argparse
import random
import statistics
import sys

from graphseq import (
    AttributedGraph,
    ReindexConfig,
    SamplerConfig,
    adjacency,
    build_vocab,
    derive_seed,
    draw_roots,
    sample,
    serialize_graph,
)
from graphseq.graph import iter_graphs_jsonl


def synthetic_power_law(n: int, m: int = 2, seed: int = 0) -> AttributedGraph:
    rng = random.Random(seed)
    edges = set()
    repeated = []
    for v in range(m, n):
        chosen = set()
        while len(chosen) < m:
            pick = rng.choice(repeated) if repeated and rng.random() < 0.8 else rng.randrange(v)
            chosen.add(pick)
        for u in chosen:
            edges.add((u, v))
            repeated += [u, v]
        if len(repeated) > 200000:
            repeated = repeated[-100000:]
    return AttributedGraph(num_nodes=n, edges=tuple(sorted(edges)))


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--graph", help="parent graph JSON/JSONL")
    ap.add_argument("--synthetic", type=int, help="build a power-law graph of this many nodes")
    ap.add_argument("--mode", choices=("node-ego", "edge-ego"), default="node-ego")
    ap.add_argument("--depths", type=int, nargs="+", default=[1, 2, 3])
    ap.add_argument("--fanouts", type=int, nargs="+", default=[4, 8, 12])
    ap.add_argument("--budget", type=int, default=256, help="context budget in tokens")
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    if args.graph:
        g = next(iter_graphs_jsonl(args.graph))
    elif args.synthetic:
        g = synthetic_power_law(args.synthetic, seed=args.seed)
    else:
        ap.error("need --graph or --synthetic")
    adj = adjacency(g)
    vocab = build_vocab([g], "cal", ReindexConfig())
    roots = draw_roots(g, args.mode, args.trials, derive_seed(args.seed, "roots"))

    print(f"graph: {g.num_nodes} nodes, {g.num_edges} edges; budget {args.budget}")
    print(f"{'depth':>5} {'fanout':>6} {'mean':>7} {'p95':>6} {'max':>6} {'fit%':>6}")
    for depth in args.depths:
        for fanout in args.fanouts:
            lengths = []
            for i, r in enumerate(roots):
                cfg = SamplerConfig(
                    mode=args.mode,
                    depth=depth,
                    neighbors=fanout,
                    max_seq_len=args.budget,
                    seed=derive_seed(args.seed, depth, fanout, i),
                )
                sub = sample(g, r, cfg, adj=adj)
                grid = serialize_graph(
                    sub.graph, vocab, "prolonged", None, derive_seed(args.seed, "ser", i)
                )
                lengths.append(grid.num_rows)
            lengths.sort()
            fit = sum(1 for x in lengths if x <= args.budget) / len(lengths)
            print(
                f"{depth:>5} {fanout:>6} {statistics.mean(lengths):>7.1f}"
                f" {lengths[int(0.95 * (len(lengths) - 1))]:>6}"
                f" {lengths[-1]:>6} {100 * fit:>5.0f}%"
            )
    return 0


if __name__ == "__main__":
    sys.exit(main())
