"""Global node identity as a combination of k tokens.

A partition of the parent graph gives each node a (cluster, local index)
pair; for k > 2 the local index is further decomposed positionally. Slot
values become inline semantic tokens (``TAG#node#SLOT#VALUE``), so a
billion-node graph needs only per-slot vocabularies whose sizes multiply
to the node count instead of one token per node.
"""
from __future__ import annotations

import math
import random
from collections import deque
from dataclasses import dataclass, replace
from functools import cached_property
from pathlib import Path
from typing import Sequence

from .graph import AttributedGraph, SubgraphSample, adjacency
from .vocab import parse_semantic, semantic_token

STRATEGIES = ("given-labels", "bfs-partition")


@dataclass(frozen=True)
class NodeIdentityCodebook:
    dataset_tag: str
    k: int
    partition: tuple[int, ...]
    local_index: tuple[int, ...]

    @property
    def num_nodes(self) -> int:
        return len(self.partition)

    @cached_property
    def _local_base(self) -> int:
        # Positional base for spreading the local index over k-1 slots.
        if self.k <= 2:
            return 0
        max_local = max(self.local_index, default=0)
        return max(2, math.ceil((max_local + 1) ** (1.0 / (self.k - 1))))

    def code(self, node: int) -> tuple[int, ...]:
        """The k slot values identifying ``node``."""
        if not 0 <= node < self.num_nodes:
            raise ValueError(f"node {node} not in codebook")
        if self.k == 1:
            return (self.partition[node],)
        if self.k == 2:
            return (self.partition[node], self.local_index[node])
        rest = []
        local = self.local_index[node]
        for _ in range(self.k - 1):
            rest.append(local % self._local_base)
            local //= self._local_base
        return (self.partition[node],) + tuple(reversed(rest))

    @cached_property
    def _decode_map(self) -> dict[tuple[int, ...], int]:
        return {self.code(v): v for v in range(self.num_nodes)}

    @cached_property
    def slot_sizes(self) -> tuple[int, ...]:
        values = [set() for _ in range(self.k)]
        for v in range(self.num_nodes):
            for slot, val in enumerate(self.code(v)):
                values[slot].add(val)
        return tuple(len(s) for s in values)

    def slot_tokens(self) -> tuple[set[str], ...]:
        out = [set() for _ in range(self.k)]
        for v in range(self.num_nodes):
            for slot, val in enumerate(self.code(v)):
                out[slot].add(semantic_token(self.dataset_tag, "node", slot, val))
        return tuple(out)

    def save(self, path: str | Path):
        lines = []
        for v in range(self.num_nodes):
            tokens = encode_node(self, v)
            lines.append("\t".join([str(v), *tokens]))
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def encode_node(cb: NodeIdentityCodebook, node: int) -> tuple[str, ...]:
    """The node's k semantic identity tokens."""
    return tuple(
        semantic_token(cb.dataset_tag, "node", slot, val)
        for slot, val in enumerate(cb.code(node))
    )


def decode_node(cb: NodeIdentityCodebook, tokens: Sequence[str]) -> int:
    """Invert ``encode_node``; unknown tuples are an error."""
    values = []
    for slot, token in enumerate(tokens):
        tag, kind, dim, value = parse_semantic(token)
        if tag != cb.dataset_tag or kind != "node" or dim != slot:
            raise ValueError(f"token {token!r} does not fit identity slot {slot}")
        values.append(value)
    key = tuple(values)
    try:
        return cb._decode_map[key]
    except KeyError:
        raise ValueError(f"identity code {key} not in codebook") from None


def _bfs_partition(g: AttributedGraph, max_cluster: int, seed: int) -> list[int]:
    """Greedy seeded BFS regions of at most ``max_cluster`` nodes.

    Region seeds are the lowest-id unassigned nodes, which keeps region
    counts near ceil(n / max_cluster) on well-connected graphs; the rng
    only shuffles expansion order inside a region.
    """
    adj = adjacency(g)
    rng = random.Random(seed)
    cluster = [-1] * g.num_nodes
    next_seed = 0
    current = 0
    while True:
        while next_seed < g.num_nodes and cluster[next_seed] >= 0:
            next_seed += 1
        if next_seed == g.num_nodes:
            break
        size = 0
        queue = deque([next_seed])
        cluster[next_seed] = current
        size += 1
        while queue and size < max_cluster:
            u = queue.popleft()
            fresh = sorted({v for v, _ in adj[u] if cluster[v] < 0})
            rng.shuffle(fresh)
            for v in fresh:
                if size >= max_cluster:
                    break
                cluster[v] = current
                size += 1
                queue.append(v)
        current += 1
    return cluster


def build_codebook(
    g: AttributedGraph,
    k: int,
    strategy: str,
    max_cluster: int | None = None,
    seed: int = 0,
    labels: Sequence[int] | None = None,
    dataset_tag: str = "data",
) -> NodeIdentityCodebook:
    """Assign every node an injective k-token identity.

    ``given-labels`` clusters by a caller-provided per-node label column
    (raw label values become the cluster slot); ``bfs-partition`` grows
    seeded BFS regions capped at ``max_cluster`` nodes. Local indices run
    in ascending global-id order within each cluster. ``k=1`` degenerates
    to one unique token per node.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if strategy not in STRATEGIES:
        raise ValueError(f"strategy must be one of {STRATEGIES}")
    if k == 1:
        partition = list(range(g.num_nodes))
    elif strategy == "given-labels":
        if labels is None:
            raise ValueError("given-labels strategy requires a node label column")
        if len(labels) != g.num_nodes:
            raise ValueError("label column must cover every node")
        partition = [int(v) for v in labels]
    else:
        if max_cluster is None or max_cluster < 1:
            raise ValueError("bfs-partition requires max_cluster >= 1")
        partition = _bfs_partition(g, max_cluster, seed)

    counts: dict[int, int] = {}
    local = [0] * g.num_nodes
    for v in range(g.num_nodes):
        c = partition[v]
        local[v] = counts.get(c, 0)
        counts[c] = local[v] + 1

    if max_cluster is not None and k > 1:
        if len(counts) * max_cluster < g.num_nodes:
            raise ValueError(
                f"{len(counts)} clusters capped at {max_cluster} nodes cannot"
                f" cover {g.num_nodes} nodes"
            )
        oversized = max(counts.values(), default=0)
        if strategy == "given-labels" and oversized > max_cluster:
            raise ValueError(
                f"label cluster of {oversized} nodes exceeds max_cluster={max_cluster}"
            )

    cb = NodeIdentityCodebook(
        dataset_tag=dataset_tag,
        k=k,
        partition=tuple(partition),
        local_index=tuple(local),
    )
    capacity = 1
    for size in cb.slot_sizes:
        capacity *= size
    if capacity < g.num_nodes:
        raise ValueError(
            f"identity capacity {capacity} cannot cover {g.num_nodes} nodes"
        )
    return cb


def codebook_from_partition(
    partition: Sequence[int], k: int = 2, dataset_tag: str = "data"
) -> NodeIdentityCodebook:
    """Build a codebook from an externally computed node->cluster map."""
    if k < 1:
        raise ValueError("k must be >= 1")
    partition = [int(c) for c in partition]
    if k == 1:
        partition = list(range(len(partition)))
    counts: dict[int, int] = {}
    local = []
    for c in partition:
        local.append(counts.get(c, 0))
        counts[c] = local[-1] + 1
    return NodeIdentityCodebook(
        dataset_tag=dataset_tag,
        k=k,
        partition=tuple(partition),
        local_index=tuple(local),
    )


def load_partition(path: str | Path) -> list[int]:
    """Read a "global_id<TAB>cluster" TSV into a dense node->cluster list."""
    rows: dict[int, int] = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t") if "\t" in line else line.split()
        if len(parts) != 2:
            raise ValueError(f"partition line {lineno}: expected 'global_id<TAB>cluster'")
        rows[int(parts[0])] = int(parts[1])
    if sorted(rows) != list(range(len(rows))):
        raise ValueError("partition file must cover node ids 0..n-1 exactly once")
    return [rows[v] for v in range(len(rows))]


def with_identity_attrs(sample: SubgraphSample, cb: NodeIdentityCodebook) -> SubgraphSample:
    """Replace a sample's node attributes with its nodes' identity codes.

    Identity slots use a -1 default so every slot token is always emitted.
    """
    attrs = tuple(cb.code(gid) for gid in sample.origin_ids)
    graph = replace(
        sample.graph,
        node_attrs=attrs,
        node_defaults=(-1,) * cb.k,
    )
    return SubgraphSample(graph=graph, root_nodes=sample.root_nodes, origin_ids=sample.origin_ids)


def with_label_attrs(sample: SubgraphSample, labels: Sequence[int]) -> SubgraphSample:
    """Identity-encoding ablation: keep only the coarse per-node label."""
    attrs = tuple((int(labels[gid]),) for gid in sample.origin_ids)
    graph = replace(sample.graph, node_attrs=attrs, node_defaults=(-1,))
    return SubgraphSample(graph=graph, root_nodes=sample.root_nodes, origin_ids=sample.origin_ids)
