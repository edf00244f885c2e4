"""Walk-to-token serialization in three layouts.

Every layout starts from the same per-step record: the step's node index
token, the node's attribute block (attached at exactly one of the node's
visits, drawn uniformly under the call seed), an optional edge-type token
(jump marker, or traversal direction for directed graphs), and the edge's
attribute block (attached at exactly one traversal of each base edge).
Attribute dimensions holding their default value are omitted.

* ``prolonged`` - fully flattened, width-1 grid. Per step:
  ``node, node-attrs?, edge-type?, edge-attrs?`` then the next node.
* ``short`` - one row per step, width ``l = 2 + We + Wn``:
  ``[node, edge-type, edge-attr cells.., node-attr cells..]`` where ``We``
  and ``Wn`` are the configured (or auto-fit) attribute token widths.
* ``long`` - a node row ``[node, edge-type, pad..]`` per step, followed by
  a node-attr row and an edge-attr row (same width ``l``) whenever the
  step carries the corresponding block.

Cell roles (node / edge-type / edge-attr / node-attr / pad) are recorded
alongside tokens so grids deserialize without re-deriving structure.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

from .euler import EulerPath, EulerizedMultigraph
from .vocab import (
    EDGE_BWD,
    EDGE_FWD,
    EDGE_JUMP,
    Vocabulary,
    digits,
    marker_token,
    semantic_token,
)

LAYOUTS = ("short", "long", "prolonged")

ROLE_NODE = "node"
ROLE_TYPE = "edge-type"
ROLE_EDGE_ATTR = "edge-attr"
ROLE_NODE_ATTR = "node-attr"
ROLE_PAD = "pad"


@dataclass(frozen=True)
class ReindexConfig:
    """Node re-indexing parameters.

    ``num_indices`` is the structural token count and must cover the node
    count of any serialized (sub)graph. With ``cyclic`` set, a random
    offset drawn under ``seed`` shifts every first-appearance index
    modulo ``num_indices`` so all index tokens occur at equal rates.
    """

    num_indices: int = 256
    cyclic: bool = True
    seed: int = 0


@dataclass(frozen=True)
class TokenGrid:
    """Token ids in grid form. ``m`` is the walk's edge-instance count and
    ``l`` the row width (1 for prolonged)."""

    layout: str
    m: int
    l: int
    tokens: tuple[tuple[int, ...], ...]
    roles: tuple[tuple[str, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(tuple(r) for r in self.tokens))
        object.__setattr__(self, "roles", tuple(tuple(r) for r in self.roles))
        if self.layout not in LAYOUTS:
            raise ValueError(f"unknown layout {self.layout!r}")
        for row, roles in zip(self.tokens, self.roles):
            if len(row) != self.l or len(roles) != self.l:
                raise ValueError("grid rows must all have width l")

    @property
    def num_rows(self) -> int:
        return len(self.tokens)

    def flat(self) -> list[int]:
        return [tok for row in self.tokens for tok in row]

    def flat_roles(self) -> list[str]:
        return [role for row in self.roles for role in row]

    def to_json(self) -> dict:
        return {
            "layout": self.layout,
            "m": self.m,
            "l": self.l,
            "tokens": [list(r) for r in self.tokens],
            "roles": [list(r) for r in self.roles],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "TokenGrid":
        return cls(
            layout=doc["layout"],
            m=doc["m"],
            l=doc["l"],
            tokens=tuple(tuple(r) for r in doc["tokens"]),
            roles=tuple(tuple(r) for r in doc["roles"]),
        )


def write_grids_jsonl(grids: Iterable[TokenGrid], path: str | Path):
    with Path(path).open("w") as fh:
        for grid in grids:
            fh.write(json.dumps(grid.to_json()) + "\n")


def iter_grids_jsonl(path: str | Path) -> Iterator[TokenGrid]:
    with Path(path).open() as fh:
        for line in fh:
            line = line.strip()
            if line:
                yield TokenGrid.from_json(json.loads(line))


def reindex(path: EulerPath, cfg: ReindexConfig) -> dict[int, int]:
    """Map node ids to serialization indices.

    First appearance along the walk gets 0, 1, 2, ...; with ``cfg.cyclic``
    every index is shifted by one offset drawn uniformly from
    ``0..num_indices-1`` under ``cfg.seed``.
    """
    order: dict[int, int] = {}
    for v in path.nodes:
        if v not in order:
            order[v] = len(order)
    if len(order) > cfg.num_indices:
        raise ValueError(
            f"{len(order)} nodes exceed the index space of {cfg.num_indices}"
        )
    offset = random.Random(cfg.seed).randrange(cfg.num_indices) if cfg.cyclic else 0
    return {v: (i + offset) % cfg.num_indices for v, i in order.items()}


def _block_tokens(tag, kind, style, attrs, defaults):
    tokens: list[str] = []
    for dim, value in enumerate(attrs):
        if value == defaults[dim]:
            continue
        if style == "inline":
            tokens.append(semantic_token(tag, kind, dim, value))
        else:
            tokens.append(marker_token(tag, kind, dim))
            tokens.extend(digits(value))
    return tokens


@dataclass
class _Step:
    node: str
    node_block: list[str]
    type_token: str | None
    edge_block: list[str]


def _build_steps(
    path: EulerPath, mg: EulerizedMultigraph, vocab: Vocabulary, index_of, seed: int
) -> list[_Step]:
    g = mg.base
    tag = vocab.dataset_tag
    rng = random.Random(seed)

    occurrences: dict[int, list[int]] = {}
    for pos, v in enumerate(path.nodes):
        occurrences.setdefault(v, []).append(pos)
    node_attach = {v: rng.choice(occurrences[v]) for v in sorted(occurrences)}

    steps_of_edge: dict[int, list[int]] = {}
    for step, (eid, _) in enumerate(path.edge_instances):
        if not mg.is_jump(eid):
            steps_of_edge.setdefault(eid, []).append(step)
    edge_attach = {eid: rng.choice(steps_of_edge[eid]) for eid in sorted(steps_of_edge)}

    node_blocks = {
        v: _block_tokens(tag, "node", vocab.node_attr_style, g.node_attrs[v], g.node_defaults)
        if g.node_attrs
        else []
        for v in occurrences
    }
    edge_blocks = {
        eid: _block_tokens(tag, "edge", vocab.edge_attr_style, g.edge_attrs[eid], g.edge_defaults)
        if g.edge_attrs
        else []
        for eid in steps_of_edge
    }

    steps = []
    for i, v in enumerate(path.nodes):
        node_block = node_blocks[v] if node_attach[v] == i else []
        type_token = None
        edge_block: list[str] = []
        if i < len(path.edge_instances):
            eid, _ = path.edge_instances[i]
            if mg.is_jump(eid):
                type_token = EDGE_JUMP
            elif g.directed:
                src, _dst = mg.endpoints(eid)
                type_token = EDGE_FWD if path.nodes[i] == src else EDGE_BWD
            if edge_attach.get(eid) == i:
                edge_block = edge_blocks[eid]
        steps.append(_Step(str(index_of[v]), node_block, type_token, edge_block))
    return steps


def _emit_prolonged(steps, vocab):
    tokens: list[str] = []
    roles: list[str] = []
    for step in steps:
        tokens.append(step.node)
        roles.append(ROLE_NODE)
        tokens.extend(step.node_block)
        roles.extend([ROLE_NODE_ATTR] * len(step.node_block))
        if step.type_token is not None:
            tokens.append(step.type_token)
            roles.append(ROLE_TYPE)
        tokens.extend(step.edge_block)
        roles.extend([ROLE_EDGE_ATTR] * len(step.edge_block))
    ids = tuple((vocab.id(t),) for t in tokens)
    return ids, tuple((r,) for r in roles)


def _fit_width(blocks, configured, what):
    needed = max((len(b) for b in blocks), default=0)
    if configured is None:
        return needed
    if needed > configured:
        raise ValueError(
            f"{what} block needs {needed} cells but width is capped at {configured}"
        )
    return configured


def _padded(block, width, role, vocab):
    ids = [vocab.id(t) for t in block] + [vocab.pad_id] * (width - len(block))
    roles = [role] * len(block) + [ROLE_PAD] * (width - len(block))
    return ids, roles


def _emit_short(steps, vocab, edge_width, node_width):
    we = _fit_width([s.edge_block for s in steps], edge_width, "edge attribute")
    wn = _fit_width([s.node_block for s in steps], node_width, "node attribute")
    width = 2 + we + wn
    rows, roles = [], []
    for step in steps:
        row = [vocab.id(step.node)]
        role = [ROLE_NODE]
        if step.type_token is None:
            row.append(vocab.pad_id)
            role.append(ROLE_PAD)
        else:
            row.append(vocab.id(step.type_token))
            role.append(ROLE_TYPE)
        ids, rs = _padded(step.edge_block, we, ROLE_EDGE_ATTR, vocab)
        row += ids
        role += rs
        ids, rs = _padded(step.node_block, wn, ROLE_NODE_ATTR, vocab)
        row += ids
        role += rs
        rows.append(tuple(row))
        roles.append(tuple(role))
    return tuple(rows), tuple(roles), width


def _emit_long(steps, vocab, edge_width, node_width):
    we = _fit_width([s.edge_block for s in steps], edge_width, "edge attribute")
    wn = _fit_width([s.node_block for s in steps], node_width, "node attribute")
    width = 2 + we + wn
    rows, roles = [], []

    def pad_row(ids, rs):
        rows.append(tuple(ids + [vocab.pad_id] * (width - len(ids))))
        roles.append(tuple(rs + [ROLE_PAD] * (width - len(ids))))

    for step in steps:
        if step.type_token is None:
            pad_row([vocab.id(step.node)], [ROLE_NODE])
        else:
            pad_row([vocab.id(step.node), vocab.id(step.type_token)], [ROLE_NODE, ROLE_TYPE])
        if step.node_block:
            ids, rs = _padded(step.node_block, len(step.node_block), ROLE_NODE_ATTR, vocab)
            pad_row(ids, rs)
        if step.edge_block:
            ids, rs = _padded(step.edge_block, len(step.edge_block), ROLE_EDGE_ATTR, vocab)
            pad_row(ids, rs)
    return tuple(rows), tuple(roles), width


def tokenize(
    path: EulerPath,
    mg: EulerizedMultigraph,
    vocab: Vocabulary,
    layout: str,
    cfg: ReindexConfig,
    seed: int,
    edge_attr_width: int | None = None,
    node_attr_width: int | None = None,
) -> TokenGrid:
    """Serialize one walk into a token grid.

    ``cfg.seed`` drives the cyclic index offset; ``seed`` drives the
    per-node / per-edge attribute placement draws. Explicit attribute
    widths cap the grid sections (overflow is an error, never a
    truncation); by default they fit the widest block in the walk.
    """
    if layout not in LAYOUTS:
        raise ValueError(f"unknown layout {layout!r}")
    index_of = reindex(path, cfg)
    steps = _build_steps(path, mg, vocab, index_of, seed)
    m = len(path.edge_instances)
    if layout == "prolonged":
        tokens, roles = _emit_prolonged(steps, vocab)
        return TokenGrid(layout=layout, m=m, l=1, tokens=tokens, roles=roles)
    if layout == "short":
        tokens, roles, width = _emit_short(steps, vocab, edge_attr_width, node_attr_width)
    else:
        tokens, roles, width = _emit_long(steps, vocab, edge_attr_width, node_attr_width)
    return TokenGrid(layout=layout, m=m, l=width, tokens=tokens, roles=roles)
