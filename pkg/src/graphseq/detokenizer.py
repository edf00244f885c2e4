"""Grid-to-graph reconstruction and the isomorphism check backing the
round-trip guarantee.

Consecutive node tokens define edges; jump-marked instances are dropped
and repeat traversals collapse to one edge. The cyclic index shift is not
inverted: reconstruction is up to relabeling, which is what the guarantee
promises.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .graph import AttributedGraph
from .tokenizer import (
    ROLE_EDGE_ATTR,
    ROLE_NODE,
    ROLE_NODE_ATTR,
    ROLE_PAD,
    ROLE_TYPE,
    TokenGrid,
)
from .vocab import (
    CLASS_DIGIT,
    CLASS_SEMANTIC,
    CLASS_SPECIAL,
    CLASS_STRUCTURAL,
    Vocabulary,
    parse_semantic,
)

ISO_NODE_LIMIT = 12


@dataclass(frozen=True)
class ReconstructionReport:
    graph: AttributedGraph
    dropped_jump_edges: int
    deduplicated_edges: int
    warnings: tuple[str, ...] = ()


def grid_from_prolonged_tokens(tokens: list[str], vocab: Vocabulary) -> TokenGrid:
    """Lift a raw prolonged token list into a role-tagged grid.

    Roles follow from token classes alone: structural tokens are node
    visits, specials are edge-type markers, and semantic tokens (with any
    digit tokens that follow) are node or edge attributes depending on
    the kind embedded in the token itself.
    """
    roles = []
    current = ROLE_PAD
    for tok in tokens:
        tid = vocab.id(tok)
        cls = vocab.class_of(tid)
        if cls == CLASS_STRUCTURAL:
            roles.append(ROLE_NODE)
        elif cls == CLASS_SPECIAL:
            roles.append(ROLE_TYPE)
        elif cls == CLASS_SEMANTIC:
            _, kind, _, _ = parse_semantic(tok)
            current = ROLE_NODE_ATTR if kind == "node" else ROLE_EDGE_ATTR
            roles.append(current)
        elif cls == CLASS_DIGIT:
            roles.append(current)
        else:  # pragma: no cover
            raise ValueError(f"unclassified token {tok!r}")
    node_count = sum(1 for r in roles if r == ROLE_NODE)
    ids = tuple((vocab.id(t),) for t in tokens)
    return TokenGrid(
        layout="prolonged",
        m=max(node_count - 1, 0),
        l=1,
        tokens=ids,
        roles=tuple((r,) for r in roles),
    )


@dataclass
class _Step:
    node: int
    node_attr_ids: list[int] = field(default_factory=list)
    type_id: int | None = None
    edge_attr_ids: list[int] = field(default_factory=list)


def _collect_steps(grid: TokenGrid, vocab: Vocabulary) -> list[_Step]:
    steps: list[_Step] = []
    for row, roles in zip(grid.tokens, grid.roles):
        for tid, role in zip(row, roles):
            if role == ROLE_PAD:
                continue
            if role == ROLE_NODE:
                if vocab.class_of(tid) != CLASS_STRUCTURAL:
                    raise ValueError(
                        f"edge-type token {vocab.token(tid)!r} in a node cell"
                        if vocab.class_of(tid) == CLASS_SPECIAL
                        else f"non-structural token {vocab.token(tid)!r} in a node cell"
                    )
                steps.append(_Step(node=tid))
            elif not steps:
                raise ValueError("dangling attribute tokens before any node token")
            elif role == ROLE_TYPE:
                steps[-1].type_id = tid
            elif role == ROLE_NODE_ATTR:
                steps[-1].node_attr_ids.append(tid)
            elif role == ROLE_EDGE_ATTR:
                steps[-1].edge_attr_ids.append(tid)
    return steps


def _parse_block(ids: list[int], vocab: Vocabulary, kind: str, style: str):
    """Decode an attribute cell run into (dimension, value) pairs."""
    out = []
    i = 0
    while i < len(ids):
        tid = ids[i]
        if vocab.class_of(tid) != CLASS_SEMANTIC:
            raise ValueError(
                f"malformed attribute run: expected a semantic token, got {vocab.token(tid)!r}"
            )
        _, token_kind, dim, value = parse_semantic(vocab.token(tid))
        if token_kind != kind:
            raise ValueError(f"malformed attribute run: {token_kind} token in {kind} block")
        i += 1
        if style == "digits":
            chars = []
            while i < len(ids) and vocab.class_of(ids[i]) == CLASS_DIGIT:
                chars.append(vocab.digit_value(ids[i]))
                i += 1
            if not chars:
                raise ValueError("malformed attribute run: dimension marker without digits")
            text = "".join(chars)
            if "." in text:
                raise ValueError(f"malformed attribute run: non-integer value {text!r}")
            value = int(text)
        out.append((dim, value))
    return out


def _attr_vector(pairs, width, defaults, what):
    vec = list(defaults) if defaults else [0] * width
    for dim, value in pairs:
        if dim >= width:
            raise ValueError(f"{what} attribute dimension {dim} outside width {width}")
        vec[dim] = value
    return vec


def detokenize(
    grid: TokenGrid,
    vocab: Vocabulary,
    node_attr_width: int | None = None,
    edge_attr_width: int | None = None,
    node_defaults: tuple[int, ...] | None = None,
    edge_defaults: tuple[int, ...] | None = None,
) -> ReconstructionReport:
    """Rebuild an attributed graph from a token grid.

    Attribute widths and defaults may be supplied by the caller; otherwise
    widths are inferred from the vocabulary's semantic tokens and omitted
    dimensions fall back to zero. Directedness is inferred from direction
    tokens, so a directed graph with no base edges reconstructs as
    undirected.
    """
    steps = _collect_steps(grid, vocab)
    if not steps:
        raise ValueError("grid contains no node tokens")
    warnings: list[str] = []

    local: dict[int, int] = {}
    for step in steps:
        if step.node not in local:
            local[step.node] = len(local)

    n_width = node_attr_width if node_attr_width is not None else vocab.attr_width("node")
    e_width = edge_attr_width if edge_attr_width is not None else vocab.attr_width("edge")
    n_defaults = tuple(node_defaults) if node_defaults is not None else (0,) * n_width
    e_defaults = tuple(edge_defaults) if edge_defaults is not None else (0,) * e_width

    node_attr_pairs: dict[int, list] = {}
    for step in steps:
        if not step.node_attr_ids:
            continue
        pairs = _parse_block(step.node_attr_ids, vocab, "node", vocab.node_attr_style)
        v = local[step.node]
        if v in node_attr_pairs and node_attr_pairs[v] != pairs:
            warnings.append(f"conflicting attribute blocks for node {v}; keeping the first")
        else:
            node_attr_pairs.setdefault(v, pairs)

    directed = any(
        step.type_id in (vocab.fwd_id, vocab.bwd_id) for step in steps if step.type_id is not None
    )

    dropped_jumps = 0
    duplicates = 0
    edge_order: list[tuple[int, int]] = []
    edge_attr_pairs: dict[tuple[int, int], list] = {}
    seen: set[tuple[int, int]] = set()
    for i in range(len(steps) - 1):
        step = steps[i]
        a, b = local[steps[i].node], local[steps[i + 1].node]
        if step.type_id == vocab.jump_id:
            dropped_jumps += 1
            if step.edge_attr_ids:
                warnings.append("attribute tokens on a jump edge were discarded")
            continue
        if directed and step.type_id == vocab.bwd_id:
            a, b = b, a
        key = (a, b) if directed else (min(a, b), max(a, b))
        if key in seen:
            duplicates += 1
        else:
            seen.add(key)
            edge_order.append(key)
        if step.edge_attr_ids:
            pairs = _parse_block(step.edge_attr_ids, vocab, "edge", vocab.edge_attr_style)
            if key in edge_attr_pairs and edge_attr_pairs[key] != pairs:
                warnings.append(f"conflicting attribute blocks for edge {key}; keeping the first")
            else:
                edge_attr_pairs.setdefault(key, pairs)
    if steps[-1].type_id is not None or steps[-1].edge_attr_ids:
        raise ValueError("malformed attribute run: edge tokens after the final node")

    node_attrs = (
        tuple(
            tuple(_attr_vector(node_attr_pairs.get(v, []), n_width, n_defaults, "node"))
            for v in range(len(local))
        )
        if n_width
        else ()
    )
    edge_attrs = (
        tuple(
            tuple(_attr_vector(edge_attr_pairs.get(e, []), e_width, e_defaults, "edge"))
            for e in edge_order
        )
        if e_width
        else ()
    )
    graph = AttributedGraph(
        num_nodes=len(local),
        edges=tuple(edge_order),
        directed=directed,
        node_attrs=node_attrs,
        edge_attrs=edge_attrs,
        node_defaults=n_defaults if n_width else (),
        edge_defaults=e_defaults if e_width else (),
    )
    return ReconstructionReport(
        graph=graph,
        dropped_jump_edges=dropped_jumps,
        deduplicated_edges=duplicates,
        warnings=tuple(warnings),
    )


def _signature(g: AttributedGraph):
    """Per-node invariant used to prune candidate bijections."""
    indeg = [0] * g.num_nodes
    outdeg = [0] * g.num_nodes
    for s, d in g.edges:
        outdeg[s] += 1
        indeg[d] += 1
    sigs = []
    for v in range(g.num_nodes):
        attrs = g.node_attrs[v] if g.node_attrs else ()
        if g.directed:
            sigs.append((indeg[v], outdeg[v], attrs))
        else:
            sigs.append((indeg[v] + outdeg[v], attrs))
    return sigs


def _edge_attr_map(g: AttributedGraph):
    out = {}
    for i, (s, d) in enumerate(g.edges):
        key = (s, d) if g.directed else (min(s, d), max(s, d))
        out[key] = g.edge_attrs[i] if g.edge_attrs else ()
    return out


def isomorphic(g1: AttributedGraph, g2: AttributedGraph) -> bool:
    """Attribute-preserving isomorphism by pruned backtracking search.

    A test oracle, not a general solver: inputs above ``ISO_NODE_LIMIT``
    nodes are rejected.
    """
    if g1.num_nodes > ISO_NODE_LIMIT or g2.num_nodes > ISO_NODE_LIMIT:
        raise ValueError(f"isomorphism oracle is limited to {ISO_NODE_LIMIT} nodes")
    if (
        g1.num_nodes != g2.num_nodes
        or g1.num_edges != g2.num_edges
        or g1.directed != g2.directed
        or g1.node_attr_width != g2.node_attr_width
        or g1.edge_attr_width != g2.edge_attr_width
    ):
        return False
    sig1, sig2 = _signature(g1), _signature(g2)
    if sorted(sig1) != sorted(sig2):
        return False
    edges1, edges2 = _edge_attr_map(g1), _edge_attr_map(g2)

    candidates = [
        [u for u in range(g2.num_nodes) if sig2[u] == sig1[v]] for v in range(g1.num_nodes)
    ]
    order = sorted(range(g1.num_nodes), key=lambda v: len(candidates[v]))
    mapping: dict[int, int] = {}
    used: set[int] = set()

    adj1: dict[int, list[tuple[int, int, int]]] = {v: [] for v in range(g1.num_nodes)}
    for s, d in g1.edges:
        adj1[s].append((d, s, d))
        adj1[d].append((s, s, d))

    def consistent(v: int, u: int) -> bool:
        for w, s, d in adj1[v]:
            if w not in mapping:
                continue
            ms, md = (u, mapping[w]) if s == v else (mapping[w], u)
            key1 = (s, d) if g1.directed else (min(s, d), max(s, d))
            key2 = (ms, md) if g1.directed else (min(ms, md), max(ms, md))
            if key2 not in edges2 or edges2[key2] != edges1[key1]:
                return False
        return True

    def search(i: int) -> bool:
        if i == len(order):
            return True
        v = order[i]
        for u in candidates[v]:
            if u in used or not consistent(v, u):
                continue
            mapping[v] = u
            used.add(u)
            if search(i + 1):
                return True
            del mapping[v]
            used.discard(u)
        return False

    return search(0)
