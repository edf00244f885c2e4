"""Fine-tuning sequence formatting for graph-, edge-, and node-level tasks.

A serialized (sub)graph gets a task suffix drawn from its own vocabulary:
a summary token for graph-level readout, or the source/destination
(respectively target) node's identity tokens for edge and node tasks. The
readout position marks the final suffix token, whose representation feeds
the downstream head. Stripping the suffix recovers the serialized
sequence exactly.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .tokenizer import TokenGrid
from .vocab import GSUM, Vocabulary


@dataclass(frozen=True)
class TaskSequence:
    tokens: tuple[int, ...]
    readout_position: int
    task: str
    label: object = None

    def to_json(self) -> dict:
        return {
            "task": self.task,
            "tokens": list(self.tokens),
            "readout": self.readout_position,
            "label": self.label,
        }


def _with_suffix(grid: TokenGrid, suffix_ids: Sequence[int], task: str, label, vocab: Vocabulary):
    """Append one suffix token per row (padded to the grid width) and
    flatten row-major; the readout lands on the last suffix token."""
    flat = grid.flat()
    tokens = list(flat)
    readout = None
    for tid in suffix_ids:
        readout = len(tokens)
        tokens.extend([tid] + [vocab.pad_id] * (grid.l - 1))
    return TaskSequence(tokens=tuple(tokens), readout_position=readout, task=task, label=label)


def format_graph_task(grid: TokenGrid, vocab: Vocabulary, label=None) -> TaskSequence:
    """Graph-level readout: append the summary token."""
    if not grid.tokens:
        raise ValueError("cannot format an empty grid")
    return _with_suffix(grid, [vocab.id(GSUM)], "graph", label, vocab)


def _resolve(grid: TokenGrid, vocab: Vocabulary, tokens: Sequence[str], what: str) -> list[int]:
    """Token ids for a node reference, required to occur contiguously.

    Identity blocks are emitted as adjacent slot tokens, so a contiguous
    match pins down one in-sequence node; single tokens shared across
    nodes (same cluster, same local index) are not enough.
    """
    ids = [vocab.id(t) for t in tokens]
    if not ids:
        raise ValueError(f"{what} node reference is empty")
    flat = grid.flat()
    span = len(ids)
    if not any(flat[i : i + span] == ids for i in range(len(flat) - span + 1)):
        raise ValueError(f"{what} tokens {list(tokens)!r} do not occur in the sequence")
    return ids


def format_edge_task(
    grid: TokenGrid,
    vocab: Vocabulary,
    src_tokens: Sequence[str],
    dst_tokens: Sequence[str],
    label=None,
) -> TaskSequence:
    """Edge-level readout: append the source then destination node tokens.

    The appended tokens must already occur in the sequence so attention
    can bind them to their in-graph occurrences. Positive and negative
    pairs format identically; only the label differs.
    """
    if not grid.tokens:
        raise ValueError("cannot format an empty grid")
    if tuple(src_tokens) == tuple(dst_tokens):
        raise ValueError("source and destination nodes must differ")
    ids = _resolve(grid, vocab, src_tokens, "source") + _resolve(grid, vocab, dst_tokens, "destination")
    return _with_suffix(grid, ids, "edge", label, vocab)


def format_node_task(
    grid: TokenGrid, vocab: Vocabulary, target_tokens: Sequence[str], label=None
) -> TaskSequence:
    """Node-level readout: append the target node's tokens."""
    if not grid.tokens:
        raise ValueError("cannot format an empty grid")
    ids = _resolve(grid, vocab, target_tokens, "target")
    return _with_suffix(grid, ids, "node", label, vocab)


def write_task_jsonl(sequences: Iterable[TaskSequence], path: str | Path):
    with Path(path).open("w") as fh:
        for ts in sequences:
            fh.write(json.dumps(ts.to_json()) + "\n")
