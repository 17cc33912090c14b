"""Weighted trees that realize the ground costs of the assignment bounds.

Every tree is rooted at the node hosting the dummy element (insertions and
deletions), so that dummy elements never contribute to an embedding entry.
Node ids of the label and degree trees are canonical:

* label tree: ``0`` dummy, ``1`` centre, ``label_id + 2`` for each label;
* degree tree: node ``d`` for degree ``d`` (degree 0 and the dummy share 0).

Because of this, a label or degree outside the alphabet the tree was built
from is resolved to a *virtual* node with a canonical id, i.e. the tree is
extended logically without being copied.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from typing import Hashable, Sequence

from .errors import DeletionTooCheap, TreeMismatch, UnanchoredVertex
from .graph import CostModel, LabelCostTable, SymbolTable, validate_cost_model

__all__ = [
    "DUMMY",
    "MetricTree",
    "build_label_tree",
    "build_degree_tree",
    "build_ultrametric_tree",
    "build_tree",
    "single_linkage",
    "subdominant_ultrametric",
    "tree_distance",
]


class _Dummy:
    def __repr__(self):
        return "DUMMY"

    def __reduce__(self):
        return "DUMMY"


DUMMY = _Dummy()
"""Anchor key of the dummy element (insertion/deletion)."""

GENERIC, LABEL, DEGREE, ULTRAMETRIC = "generic", "label", "degree", "ultrametric"


@dataclass(frozen=True, eq=False)
class MetricTree:
    """Rooted tree with non-negative edge weights and an anchor map.

    ``parent[i]`` is the parent of node ``i`` (``-1`` for the root) and
    ``weight[i]`` the weight of the edge from ``i`` to its parent.
    ``anchors`` maps element keys (labels, degrees, :data:`DUMMY`) to nodes.
    """

    parent: tuple[int, ...]
    weight: tuple[float, ...]
    anchors: dict
    kind: str = GENERIC
    extend_weight: float = 0.0
    names: tuple[str, ...] | None = None
    depth: tuple[int, ...] = field(init=False, repr=False)
    version: str = field(init=False)

    def __post_init__(self):
        n = len(self.parent)
        if len(self.weight) != n:
            raise ValueError("parent and weight must have equal length")
        roots = [i for i, p in enumerate(self.parent) if p == -1]
        if n and len(roots) != 1:
            raise ValueError(f"tree must have exactly one root, found {len(roots)}")
        for w in self.weight:
            if not (w >= 0 and math.isfinite(w)):
                raise ValueError("edge weights must be finite and non-negative")
        depth = [-1] * n
        for start in range(n):
            path = []
            v = start
            while v != -1 and depth[v] == -1:
                if len(path) > n:
                    raise ValueError("parent pointers contain a cycle")
                path.append(v)
                v = self.parent[v]
            d = -1 if v == -1 else depth[v]
            for u in reversed(path):
                d += 1
                depth[u] = d
        for key, node in self.anchors.items():
            if not 0 <= node < n:
                raise ValueError(f"anchor {key!r} points outside the tree")
        object.__setattr__(self, "parent", tuple(int(p) for p in self.parent))
        object.__setattr__(self, "weight", tuple(float(w) for w in self.weight))
        object.__setattr__(self, "depth", tuple(depth))
        object.__setattr__(self, "version", self._fingerprint())

    def _fingerprint(self) -> str:
        h = hashlib.sha1(self.kind.encode())
        # extensible trees are identified by their extension rule; growing the
        # alphabet keeps existing node ids and therefore compatible vectors
        if self.kind == LABEL:
            h.update(repr((self.extend_weight, self.weight[1])).encode())
        elif self.kind == DEGREE:
            h.update(repr(self.extend_weight).encode())
        else:
            h.update(repr((self.parent, self.weight)).encode())
            h.update(repr(sorted((repr(k), v) for k, v in self.anchors.items())).encode())
        return f"{self.kind}:{h.hexdigest()[:16]}"

    @property
    def root(self) -> int:
        return self.parent.index(-1) if self.parent else -1

    @property
    def n_nodes(self) -> int:
        return len(self.parent)

    def node_of(self, key: Hashable) -> int:
        """Node hosting ``key``; resolves out-of-alphabet keys for extensible trees."""
        node = self.anchors.get(key)
        if node is not None:
            return node
        if key is not DUMMY and isinstance(key, int) and key >= 0:
            if self.kind == LABEL:
                return key + 2
            if self.kind == DEGREE:
                return key
        raise UnanchoredVertex(f"{key!r} is not anchored in this {self.kind} tree")

    def parent_of(self, node: int) -> int:
        if node < len(self.parent):
            return self.parent[node]
        if self.kind == LABEL:
            return 1
        if self.kind == DEGREE:
            return node - 1
        raise IndexError(node)

    def weight_of(self, node: int) -> float:
        if node < len(self.weight):
            return self.weight[node]
        if self.kind in (LABEL, DEGREE):
            return self.extend_weight
        raise IndexError(node)

    def depth_of(self, node: int) -> int:
        if node < len(self.depth):
            return self.depth[node]
        if self.kind == LABEL:
            return 2
        if self.kind == DEGREE:
            return node
        raise IndexError(node)

    def node_distance(self, a: int, b: int) -> float:
        total = 0.0
        da, db = self.depth_of(a), self.depth_of(b)
        while da > db:
            total += self.weight_of(a)
            a, da = self.parent_of(a), da - 1
        while db > da:
            total += self.weight_of(b)
            b, db = self.parent_of(b), db - 1
        while a != b:
            total += self.weight_of(a) + self.weight_of(b)
            a, b = self.parent_of(a), self.parent_of(b)
        return total

    def distance(self, x: Hashable, y: Hashable) -> float:
        return self.node_distance(self.node_of(x), self.node_of(y))

    def check_compatible(self, other: "MetricTree") -> None:
        if self.version != other.version:
            raise TreeMismatch(f"{self.version} != {other.version}")


def tree_distance(t: MetricTree, x: Hashable, y: Hashable) -> float:
    """Weighted length of the path between the nodes anchoring ``x`` and ``y``."""
    return t.distance(x, y)


def build_label_tree(labels: Sequence[int], c: CostModel) -> MetricTree:
    """Star tree realizing the uniform label ground cost.

    The dummy node is the root, joined to the centre with weight
    ``c_v - c_vl / 2``; every label hangs off the centre with weight ``c_vl / 2``.
    """
    validate_cost_model(c)
    half = c.vertex_relabel / 2
    n_labels = max(labels, default=-1) + 1
    parent = [-1, 0] + [1] * n_labels
    weight = [0.0, c.vertex_indel - half] + [half] * n_labels
    anchors = {DUMMY: 0}
    anchors.update((lab, lab + 2) for lab in range(n_labels))
    return MetricTree(tuple(parent), tuple(weight), anchors, LABEL, half)


def build_degree_tree(max_degree: int, c: CostModel) -> MetricTree:
    """Path ``0 - 1 - ... - max_degree`` with uniform weight ``c_e / 2``."""
    if max_degree < 0:
        raise ValueError("max_degree must be non-negative")
    half = c.edge_indel / 2
    parent = [-1] + list(range(max_degree))
    weight = [0.0] + [half] * max_degree
    anchors = {DUMMY: 0}
    anchors.update((d, d) for d in range(max_degree + 1))
    return MetricTree(tuple(parent), tuple(weight), anchors, DEGREE, half)


def single_linkage(cost: Sequence[Sequence[float]]) -> list[tuple[int, int, float]]:
    """Single-linkage merge sequence over a dense dissimilarity matrix.

    Returns ``(a, b, height)`` triples in merge order where ``a`` and ``b`` are
    cluster ids: ``0..k-1`` for singletons, ``k + i`` for the cluster formed by
    the ``i``-th merge. Uses Prim's minimum spanning tree in O(k^2); ties are
    resolved towards the lowest label index.
    """
    k = len(cost)
    if k == 0:
        return []
    in_tree = [False] * k
    best = [math.inf] * k
    link = [-1] * k
    best[0] = 0.0
    mst = []
    for _ in range(k):
        u = -1
        for v in range(k):
            if not in_tree[v] and (u == -1 or best[v] < best[u]):
                u = v
        in_tree[u] = True
        if link[u] != -1:
            mst.append((best[u], min(u, link[u]), max(u, link[u])))
        row = cost[u]
        for v in range(k):
            if not in_tree[v] and row[v] < best[v]:
                best[v] = row[v]
                link[v] = u
    mst.sort()
    cluster = list(range(k))

    def find(x):
        while cluster[x] != x:
            cluster[x] = cluster[cluster[x]]
            x = cluster[x]
        return x

    merges = []
    for h, u, v in mst:
        a, b = find(u), find(v)
        new = k + len(merges)
        merges.append((min(a, b), max(a, b), h))
        cluster.append(new)
        cluster[a] = cluster[b] = new
    return merges


def subdominant_ultrametric(cost: Sequence[Sequence[float]]) -> list[list[float]]:
    """Largest ultrametric bounded above by ``cost`` (cophenetic single-linkage)."""
    k = len(cost)
    members = {i: [i] for i in range(k)}
    out = [[0.0] * k for _ in range(k)]
    for step, (a, b, h) in enumerate(single_linkage(cost)):
        for i in members[a]:
            for j in members[b]:
                out[i][j] = out[j][i] = h
        members[k + step] = members.pop(a) + members.pop(b)
    return out


def build_ultrametric_tree(
    table: LabelCostTable, c: CostModel, symbols: SymbolTable | None = None
) -> MetricTree:
    """Dendrogram tree for a non-uniform label cost table.

    A merge at linkage height ``h`` creates an internal node at depth ``h / 2``
    below the leaves' common level, so leaf-to-leaf distances equal the
    subdominant ultrametric. The dummy root is attached to the dendrogram
    root with weight ``c_v - u`` where ``u`` is the leaf depth.

    Anchors are keyed by label id in ``symbols`` (interned in table order when
    no symbol table is given).
    """
    k = len(table.labels)
    if k == 0:
        raise ValueError("label cost table is empty")
    merges = single_linkage(table.cost)
    height = [0.0] * k + [h / 2 for _, _, h in merges]
    up = [-1] * (k + len(merges))
    for step, (a, b, _) in enumerate(merges):
        up[a] = up[b] = k + step
    top = len(up) - 1
    u = height[top]
    if c.vertex_indel < u:
        raise DeletionTooCheap(
            f"vertex insertion/deletion cost {c.vertex_indel:g} is below the "
            f"ultrametric leaf depth {u:g}"
        )
    # node 0 is the dummy root; dendrogram node i becomes node i + 1
    parent = [-1] + [0] * len(up)
    weight = [0.0] * (len(up) + 1)
    for i, p in enumerate(up):
        if p == -1:
            weight[i + 1] = c.vertex_indel - u
        else:
            parent[i + 1] = p + 1
            weight[i + 1] = height[p] - height[i]
    if symbols is None:
        symbols = SymbolTable(table.labels)
    anchors = {DUMMY: 0}
    for i, lab in enumerate(table.labels):
        anchors[symbols.intern(lab)] = i + 1
    names = ("<dummy>",) + tuple(table.labels) + tuple(f"m{j}" for j in range(len(merges)))
    return MetricTree(tuple(parent), tuple(weight), anchors, ULTRAMETRIC, names=names)


def build_tree(kind: str, **kw) -> MetricTree:
    """Rebuild a tree from its serialized fields (used by index persistence)."""
    return MetricTree(
        tuple(kw["parent"]), tuple(kw["weight"]), dict(kw["anchors"]), kind,
        kw.get("extend_weight", 0.0), kw.get("names"),
    )
