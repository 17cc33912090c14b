"""Sparse ℓ1 embeddings of multisets anchored on a weighted tree.

For a multiset ``S`` of tree nodes, the entry of the edge above node ``n``
is ``(number of elements of S in the subtree of n) * weight(n)``. With the
tree rooted at the dummy node, the ℓ1 distance of two such vectors equals the
cost of an optimal assignment between the (implicitly padded) multisets.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import TreeMismatch
from .treemetric import MetricTree

__all__ = [
    "Embedding",
    "CompositeEmbedding",
    "compute_vector",
    "embed_nodes",
    "l1_distance",
    "concat",
]


@dataclass(frozen=True)
class Embedding:
    """Sparse non-negative vector keyed by child node id of each tree edge."""

    entries: dict[int, float]
    tree_version: str

    def l1(self, other: "Embedding") -> float:
        return l1_distance(self, other)

    @property
    def norm(self) -> float:
        return sum(self.entries.values())

    def to_bytes(self) -> bytes:
        keys = sorted(self.entries)
        out = [struct.pack("<I", len(keys))]
        out.extend(struct.pack("<qd", k, self.entries[k]) for k in keys)
        return b"".join(out)

    @classmethod
    def from_bytes(cls, buf: bytes, tree_version: str, offset: int = 0):
        """Decode one embedding; returns ``(embedding, new_offset)``."""
        (count,) = struct.unpack_from("<I", buf, offset)
        offset += 4
        entries = {}
        for _ in range(count):
            k, v = struct.unpack_from("<qd", buf, offset)
            entries[k] = v
            offset += 16
        return cls(entries, tree_version), offset


@dataclass(frozen=True)
class CompositeEmbedding:
    parts: tuple[Embedding, ...]

    def l1(self, other: "CompositeEmbedding") -> float:
        if len(self.parts) != len(other.parts):
            raise TreeMismatch("composite embeddings have different part counts")
        return sum(l1_distance(a, b) for a, b in zip(self.parts, other.parts))


def embed_nodes(nodes: Iterable[int], t: MetricTree) -> dict[int, float]:
    """Entries for a multiset of tree nodes (already resolved anchors).

    Only the subtree spanned by the nodes and their root paths is touched, so
    the cost is linear in the input plus that subtree.
    """
    count: dict[int, int] = {}
    for n in nodes:
        count[n] = count.get(n, 0) + 1
    if not count:
        return {}
    parent_of, depth_of = t.parent_of, t.depth_of
    # close the anchor set under parents; stop at already visited nodes
    frontier = list(count)
    for n in frontier:
        p = parent_of(n)
        if p != -1 and p not in count:
            count[p] = 0
            frontier.append(p)
    entries = {}
    weight_of = t.weight_of
    for n in sorted(count, key=depth_of, reverse=True):
        p = parent_of(n)
        if p == -1:
            continue
        c = count[n]
        count[p] += c
        w = weight_of(n)
        if c and w:
            entries[n] = c * w
    return entries


def compute_vector(keys: Iterable, t: MetricTree) -> Embedding:
    """Embed a multiset of anchor keys (labels, degrees, ...) under ``t``."""
    node_of = t.node_of
    return Embedding(embed_nodes((node_of(k) for k in keys), t), t.version)


def l1_distance(a: Embedding, b: Embedding) -> float:
    if a.tree_version != b.tree_version:
        raise TreeMismatch(f"embeddings come from different trees: "
                           f"{a.tree_version} vs {b.tree_version}")
    ea, eb = a.entries, b.entries
    if len(ea) < len(eb):
        ea, eb = eb, ea
    total = 0.0
    for k, v in ea.items():
        total += abs(v - eb.get(k, 0.0))
    for k, v in eb.items():
        if k not in ea:
            total += v
    return total


def concat(parts: Sequence[Embedding]) -> CompositeEmbedding:
    if not parts:
        raise ValueError("concat needs at least one part")
    return CompositeEmbedding(tuple(parts))
