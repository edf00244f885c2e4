"""Token vocabulary: structural node indices, special/digit tokens, and
dataset-scoped semantic tokens for attribute and identity values.

Two attribute spellings exist, chosen per attribute kind:

* ``digits``  - one announcement token per dimension, ``TAG#kind#DIM#1``,
  followed by digit tokens spelling the value. Compact for wide-ranged
  integer attributes.
* ``inline``  - one token per (dimension, value), ``TAG#kind#DIM#VALUE``.
  Required for node identity codes, where each slot must stay one token.
"""
from __future__ import annotations

from pathlib import Path
from typing import Iterable

from .graph import AttributedGraph

PAD = "[p]"
EDGE_JUMP = "[EDGE_JUMP]"
GSUM = "[GSUM]"
EOS = "<eos>"
MASK = "<mask>"
EDGE_FWD = "[->]"
EDGE_BWD = "[<-]"

SPECIAL_TOKENS = (PAD, EDGE_JUMP, GSUM, EOS, MASK, EDGE_FWD, EDGE_BWD)
DIGIT_TOKENS = ("<->", "<.>") + tuple(f"<{d}>" for d in "0123456789")

CLASS_STRUCTURAL = "structural"
CLASS_SPECIAL = "special"
CLASS_DIGIT = "digit"
CLASS_SEMANTIC = "semantic"

ATTR_STYLES = ("digits", "inline")

_DIGIT_FOR_CHAR = {"-": "<->", ".": "<.>", **{d: f"<{d}>" for d in "0123456789"}}


def digits(value: int | str) -> list[str]:
    """Digit-wise spelling of a number: sign, then decimal digit tokens.

    Integers never carry leading zeros (zero itself is a single ``<0>``).
    Strings pass through character-wise, so pre-quantized decimals like
    "3.14" keep their point token.
    """
    text = str(int(value)) if not isinstance(value, str) else value
    out = []
    for ch in text:
        if ch not in _DIGIT_FOR_CHAR:
            raise ValueError(f"cannot digit-tokenize character {ch!r} in {text!r}")
        out.append(_DIGIT_FOR_CHAR[ch])
    if not out:
        raise ValueError("empty value")
    return out


def semantic_token(tag: str, kind: str, dim: int, value: int) -> str:
    return f"{tag}#{kind}#{dim}#{value}"


def marker_token(tag: str, kind: str, dim: int) -> str:
    """Dimension announcement used by the ``digits`` attribute style."""
    return semantic_token(tag, kind, dim, 1)


def parse_semantic(token: str) -> tuple[str, str, int, int]:
    tag, kind, dim, value = token.rsplit("#", 3)
    return tag, kind, int(dim), int(value)


class Vocabulary:
    """Bidirectional token<->id map with dense ids and disjoint classes.

    Id layout: structural indices ``0..N-1`` map to ids ``0..N-1``, then
    the fixed special tokens, the twelve digit tokens, and finally the
    semantic tokens in lexicographic order.
    """

    def __init__(
        self,
        num_indices: int,
        semantic_tokens: Iterable[str] = (),
        dataset_tag: str = "",
        node_attr_style: str = "digits",
        edge_attr_style: str = "digits",
    ):
        if node_attr_style not in ATTR_STYLES or edge_attr_style not in ATTR_STYLES:
            raise ValueError(f"attribute style must be one of {ATTR_STYLES}")
        self.num_indices = num_indices
        self.dataset_tag = dataset_tag
        self.node_attr_style = node_attr_style
        self.edge_attr_style = edge_attr_style
        tokens: list[tuple[str, str]] = []
        tokens += [(str(i), CLASS_STRUCTURAL) for i in range(num_indices)]
        tokens += [(t, CLASS_SPECIAL) for t in SPECIAL_TOKENS]
        tokens += [(t, CLASS_DIGIT) for t in DIGIT_TOKENS]
        tokens += [(t, CLASS_SEMANTIC) for t in sorted(set(semantic_tokens))]
        self._id_to_token = tuple(t for t, _ in tokens)
        self._id_to_class = tuple(c for _, c in tokens)
        self._token_to_id = {t: i for i, (t, _) in enumerate(tokens)}
        if len(self._token_to_id) != len(tokens):
            raise ValueError("token classes overlap")

    def __len__(self) -> int:
        return len(self._id_to_token)

    def __contains__(self, token: str) -> bool:
        return token in self._token_to_id

    def id(self, token: str) -> int:
        try:
            return self._token_to_id[token]
        except KeyError:
            raise ValueError(f"token not in vocabulary: {token!r}") from None

    def token(self, token_id: int) -> str:
        return self._id_to_token[token_id]

    def class_of(self, token_id: int) -> str:
        return self._id_to_class[token_id]

    @property
    def pad_id(self) -> int:
        return self._token_to_id[PAD]

    @property
    def jump_id(self) -> int:
        return self._token_to_id[EDGE_JUMP]

    @property
    def gsum_id(self) -> int:
        return self._token_to_id[GSUM]

    @property
    def eos_id(self) -> int:
        return self._token_to_id[EOS]

    @property
    def mask_id(self) -> int:
        return self._token_to_id[MASK]

    @property
    def fwd_id(self) -> int:
        return self._token_to_id[EDGE_FWD]

    @property
    def bwd_id(self) -> int:
        return self._token_to_id[EDGE_BWD]

    def digit_value(self, token_id: int) -> str:
        token = self.token(token_id)
        for ch, tok in _DIGIT_FOR_CHAR.items():
            if tok == token:
                return ch
        raise ValueError(f"not a digit token: {token!r}")

    def semantic_ids(self) -> list[int]:
        return [i for i, c in enumerate(self._id_to_class) if c == CLASS_SEMANTIC]

    def attr_width(self, kind: str) -> int:
        """1 + highest attribute dimension mentioned by semantic tokens."""
        width = 0
        for i in self.semantic_ids():
            _, k, dim, _ = parse_semantic(self.token(i))
            if k == kind:
                width = max(width, dim + 1)
        return width

    def save(self, path: str | Path):
        lines = [
            f"{tok}\t{i}\t{cls}"
            for i, (tok, cls) in enumerate(zip(self._id_to_token, self._id_to_class))
        ]
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")

    @classmethod
    def load(
        cls,
        path: str | Path,
        dataset_tag: str = "",
        node_attr_style: str = "digits",
        edge_attr_style: str = "digits",
    ) -> "Vocabulary":
        num_indices = 0
        semantic = []
        for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
            if not raw:
                continue
            try:
                token, _, token_class = raw.split("\t")
            except ValueError:
                raise ValueError(f"vocab line {lineno}: expected 'token<TAB>id<TAB>class'")
            if token_class == CLASS_STRUCTURAL:
                num_indices += 1
            elif token_class == CLASS_SEMANTIC:
                semantic.append(token)
                if not dataset_tag:
                    dataset_tag = parse_semantic(token)[0]
        vocab = cls(
            num_indices,
            semantic,
            dataset_tag=dataset_tag,
            node_attr_style=node_attr_style,
            edge_attr_style=edge_attr_style,
        )
        return vocab


def _attr_tokens(tag, kind, style, attrs, defaults):
    tokens = set()
    for row in attrs:
        for dim, value in enumerate(row):
            if value == defaults[dim]:
                continue
            if style == "inline":
                tokens.add(semantic_token(tag, kind, dim, value))
            else:
                tokens.add(marker_token(tag, kind, dim))
    return tokens


def build_vocab(
    corpus: Iterable[AttributedGraph],
    dataset_tag: str,
    cfg,
    node_attr_style: str = "digits",
    edge_attr_style: str = "digits",
) -> Vocabulary:
    """Close the vocabulary over a graph corpus.

    Structural and special/digit tokens are fixed by ``cfg.num_indices``;
    semantic tokens are collected from every non-default attribute value
    observed in the corpus. Rebuilding from the same corpus is
    byte-identical.
    """
    semantic: set[str] = set()
    for g in corpus:
        semantic |= _attr_tokens(dataset_tag, "node", node_attr_style, g.node_attrs, g.node_defaults)
        semantic |= _attr_tokens(dataset_tag, "edge", edge_attr_style, g.edge_attrs, g.edge_defaults)
    return Vocabulary(
        num_indices=cfg.num_indices,
        semantic_tokens=semantic,
        dataset_tag=dataset_tag,
        node_attr_style=node_attr_style,
        edge_attr_style=edge_attr_style,
    )
