"""Self-supervised example construction: NTP targets, scheduled node
masking, and context-window packing.

Grid rows are the model's time steps. NTP targets pair a predicting row
index with each non-padding token of the following row (multi-token
prediction for short/long layouts; plain shift-by-one for prolonged).
Masked-prediction targets pair the flat cell index of every masked cell
with the token it hid.
"""
from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Iterator

from .tokenizer import ROLE_NODE, ROLE_NODE_ATTR, ROLE_PAD, TokenGrid
from .vocab import Vocabulary

ATTENTION_CONTRACT = "no-cross-sequence-visibility"


def linear_schedule(u: float) -> float:
    """Identity schedule: a Uniform(0, 1] draw is the mask fraction."""
    return u


def cosine_schedule(u: float) -> float:
    return math.cos((1.0 - u) * math.pi / 2.0)


def draw_mask_fraction(rng: random.Random, schedule: Callable[[float], float] = linear_schedule) -> float:
    # 1 - random() lies in (0, 1], so at least one node is always masked.
    return schedule(1.0 - rng.random())


@dataclass(frozen=True)
class PretrainExample:
    inputs: TokenGrid
    targets: tuple[tuple[int, int], ...]
    task: str
    mask_rate_drawn: float | None = None

    def to_json(self) -> dict:
        doc = {
            "task": self.task,
            "inputs": [list(r) for r in self.inputs.tokens],
            "targets": [list(t) for t in self.targets],
            "r": self.mask_rate_drawn,
            "layout": self.inputs.layout,
            "m": self.inputs.m,
            "l": self.inputs.l,
            "roles": [list(r) for r in self.inputs.roles],
        }
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> "PretrainExample":
        grid = TokenGrid(
            layout=doc["layout"],
            m=doc["m"],
            l=doc["l"],
            tokens=tuple(tuple(r) for r in doc["inputs"]),
            roles=tuple(tuple(r) for r in doc["roles"]),
        )
        return cls(
            inputs=grid,
            targets=tuple((int(p), int(t)) for p, t in doc["targets"]),
            task=doc["task"],
            mask_rate_drawn=doc["r"],
        )


def build_ntp(grid: TokenGrid, vocab: Vocabulary) -> PretrainExample:
    """Next-row prediction targets.

    Each row index t gets one target per non-padding token of row t+1;
    padding cells never contribute targets.
    """
    targets = []
    for t in range(grid.num_rows - 1):
        for tok, role in zip(grid.tokens[t + 1], grid.roles[t + 1]):
            if role != ROLE_PAD:
                targets.append((t, tok))
    return PretrainExample(inputs=grid, targets=tuple(targets), task="ntp")


def distinct_node_tokens(grid: TokenGrid) -> list[int]:
    seen: list[int] = []
    for row, roles in zip(grid.tokens, grid.roles):
        for tok, role in zip(row, roles):
            if role == ROLE_NODE and tok not in seen:
                seen.append(tok)
    return seen


def build_smtp(
    grid: TokenGrid, schedule_draw: float, seed: int, vocab: Vocabulary
) -> PretrainExample:
    """Scheduled masked-node prediction.

    ``ceil(schedule_draw * #distinct nodes)`` nodes are drawn without
    replacement; every visit of a chosen node and every cell of its
    attribute/identity block turns into ``<mask>``, so no occurrence can
    leak the answer. Edge attribute cells are never masked.
    """
    if not 0.0 < schedule_draw <= 1.0:
        raise ValueError("mask fraction must lie in (0, 1]")
    nodes = distinct_node_tokens(grid)
    if not nodes:
        raise ValueError("grid contains no node tokens")
    count = math.ceil(schedule_draw * len(nodes))
    rng = random.Random(seed)
    masked = set(rng.sample(sorted(nodes), count))

    mask_id = vocab.mask_id
    new_rows = []
    targets = []
    owner: int | None = None
    flat = 0
    for row, roles in zip(grid.tokens, grid.roles):
        new_row = list(row)
        for c, (tok, role) in enumerate(zip(row, roles)):
            if role == ROLE_NODE:
                owner = tok
            hit = (role == ROLE_NODE and tok in masked) or (
                role == ROLE_NODE_ATTR and owner in masked
            )
            if hit:
                new_row[c] = mask_id
                targets.append((flat + c, tok))
        new_rows.append(tuple(new_row))
        flat += grid.l
    inputs = TokenGrid(
        layout=grid.layout, m=grid.m, l=grid.l, tokens=tuple(new_rows), roles=grid.roles
    )
    return PretrainExample(
        inputs=inputs,
        targets=tuple(targets),
        task="smtp",
        mask_rate_drawn=schedule_draw,
    )


@dataclass(frozen=True)
class PackedBatch:
    """Several examples in one context window, separated by ``<eos>`` rows.

    ``boundaries`` are [start, end) row spans of the member sequences so a
    consumer can mask attention across them; separator rows belong to no
    span.
    """

    layout: str
    l: int
    tokens: tuple[tuple[int, ...], ...]
    boundaries: tuple[tuple[int, int], ...]
    tasks: tuple[str, ...]
    targets: tuple[tuple[tuple[int, int], ...], ...]
    attention_contract: str = ATTENTION_CONTRACT

    def to_json(self) -> dict:
        return {
            "layout": self.layout,
            "l": self.l,
            "tokens": [list(r) for r in self.tokens],
            "boundaries": [list(b) for b in self.boundaries],
            "tasks": list(self.tasks),
            "targets": [[list(t) for t in seq] for seq in self.targets],
            "attention_contract": self.attention_contract,
        }


def pack(
    examples: Iterable[PretrainExample], context: int, vocab: Vocabulary
) -> list[PackedBatch]:
    """Greedy first-fit packing of examples into ``context`` rows.

    Each example must fit the context on its own. Target positions are
    re-based onto the packed entry (row indices shift by the span start;
    flat cell indices by start * l).
    """
    bins: list[list[PretrainExample]] = []
    used: list[int] = []
    layout: str | None = None
    width: int | None = None
    for ex in examples:
        rows = ex.inputs.num_rows
        if rows > context:
            raise ValueError(f"example of {rows} rows exceeds context {context}")
        if layout is None:
            layout, width = ex.inputs.layout, ex.inputs.l
        elif ex.inputs.layout != layout or ex.inputs.l != width:
            raise ValueError("cannot pack mixed layouts or widths")
        placed = False
        for i, load in enumerate(used):
            if load + 1 + rows <= context:
                bins[i].append(ex)
                used[i] = load + 1 + rows
                placed = True
                break
        if not placed:
            bins.append([ex])
            used.append(rows)

    sep_row = (vocab.eos_id,) + (vocab.pad_id,) * ((width or 1) - 1)
    batches = []
    for members in bins:
        tokens: list[tuple[int, ...]] = []
        boundaries = []
        tasks = []
        targets = []
        for ex in members:
            if tokens:
                tokens.append(sep_row)
            start = len(tokens)
            tokens.extend(ex.inputs.tokens)
            boundaries.append((start, len(tokens)))
            tasks.append(ex.task)
            offset = start if ex.task == "ntp" else start * (width or 1)
            targets.append(tuple((pos + offset, tok) for pos, tok in ex.targets))
        batches.append(
            PackedBatch(
                layout=layout or "prolonged",
                l=width or 1,
                tokens=tuple(tokens),
                boundaries=tuple(boundaries),
                tasks=tuple(tasks),
                targets=tuple(targets),
            )
        )
    return batches


def write_examples_jsonl(examples: Iterable[PretrainExample], path: str | Path):
    with Path(path).open("w") as fh:
        for ex in examples:
            fh.write(json.dumps(ex.to_json()) + "\n")


def iter_examples_jsonl(path: str | Path) -> Iterator[PretrainExample]:
    with Path(path).open() as fh:
        for line in fh:
            line = line.strip()
            if line:
                yield PretrainExample.from_json(json.loads(line))


def write_batches_jsonl(batches: Iterable[PackedBatch], path: str | Path):
    with Path(path).open("w") as fh:
        for batch in batches:
            fh.write(json.dumps(batch.to_json()) + "\n")
