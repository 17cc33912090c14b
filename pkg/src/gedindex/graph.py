"""Core graph and edit-cost types.

Graphs are small, immutable, undirected and vertex-labelled. Vertex labels are
interned integers; the original symbols live in a :class:`SymbolTable` owned by
the dataset the graph came from.
"""

from __future__ import annotations

import copy
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping, Sequence

from .errors import ParseError, RelabelTooExpensive

__all__ = [
    "Graph",
    "SymbolTable",
    "LabelCostTable",
    "CostModel",
    "UNIFORM",
    "DegreeProfile",
    "degree_profile",
    "validate_cost_model",
]


class SymbolTable:
    """Bidirectional map between label symbols and dense integer ids."""

    def __init__(self, symbols: Iterable[str] = ()):
        self._ids: dict[str, int] = {}
        self._symbols: list[str] = []
        for s in symbols:
            self.intern(s)

    def intern(self, symbol: str) -> int:
        symbol = str(symbol)
        idx = self._ids.get(symbol)
        if idx is None:
            idx = len(self._symbols)
            self._ids[symbol] = idx
            self._symbols.append(symbol)
        return idx

    def lookup(self, symbol: str) -> int | None:
        return self._ids.get(str(symbol))

    def symbol(self, idx: int) -> str:
        return self._symbols[idx]

    @property
    def symbols(self) -> list[str]:
        return list(self._symbols)

    def copy(self) -> "SymbolTable":
        return SymbolTable(self._symbols)

    def __len__(self):
        return len(self._symbols)

    def __contains__(self, symbol):
        return str(symbol) in self._ids

    def __eq__(self, other):
        return isinstance(other, SymbolTable) and self._symbols == other._symbols

    def __repr__(self):
        return f"SymbolTable({self._symbols!r})"


@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected graph with integer vertex labels and optional edge labels.

    Vertices are ``0 .. n-1``. ``edges`` holds normalized pairs ``(u, v)`` with
    ``u < v``, sorted; ``edge_labels`` is aligned with ``edges`` when present.
    """

    labels: tuple[int, ...]
    edges: tuple[tuple[int, int], ...] = ()
    edge_labels: tuple[int, ...] | None = None
    id: int = 0
    _adj: tuple[frozenset, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        n = len(self.labels)
        labels = tuple(int(x) for x in self.labels)
        pairs = []
        for e in self.edges:
            u, v = int(e[0]), int(e[1])
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) has an endpoint outside 0..{n - 1}")
            pairs.append((u, v) if u < v else (v, u))
        if self.edge_labels is not None and len(self.edge_labels) != len(pairs):
            raise ValueError("edge_labels must align with edges")
        order = sorted(range(len(pairs)), key=pairs.__getitem__)
        edges = tuple(pairs[i] for i in order)
        for a, b in zip(edges, edges[1:]):
            if a == b:
                raise ValueError(f"duplicate edge {a}")
        elabels = None
        if self.edge_labels is not None:
            elabels = tuple(int(self.edge_labels[i]) for i in order)
        adj = [set() for _ in range(n)]
        for u, v in edges:
            adj[u].add(v)
            adj[v].add(u)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "edge_labels", elabels)
        object.__setattr__(self, "_adj", tuple(frozenset(a) for a in adj))

    @property
    def n_vertices(self) -> int:
        return len(self.labels)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def neighbors(self, v: int) -> frozenset:
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def degrees(self) -> list[int]:
        return [len(a) for a in self._adj]

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._adj[u]

    def edge_label_map(self) -> dict[tuple[int, int], int]:
        if self.edge_labels is None:
            return {}
        return dict(zip(self.edges, self.edge_labels))

    def label_counts(self) -> Counter:
        return Counter(self.labels)

    def with_id(self, new_id: int) -> "Graph":
        # fields are already validated and immutable, so a shallow copy suffices
        out = copy.copy(self)
        object.__setattr__(out, "id", int(new_id))
        return out

    def same_structure(self, other: "Graph") -> bool:
        """Identity of labels and edges under the trivial vertex map."""
        return (
            self.labels == other.labels
            and self.edges == other.edges
            and (self.edge_labels or None) == (other.edge_labels or None)
        )

    def __repr__(self):
        return f"Graph(id={self.id}, n={self.n_vertices}, m={self.n_edges})"


@dataclass(frozen=True)
class LabelCostTable:
    """Symmetric label-pair relabel costs with a zero diagonal."""

    labels: tuple[str, ...]
    cost: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        k = len(self.labels)
        if len(set(self.labels)) != k:
            raise ValueError("duplicate label in cost table")
        rows = tuple(tuple(float(x) for x in row) for row in self.cost)
        if len(rows) != k or any(len(r) != k for r in rows):
            raise ValueError(f"cost table must be {k}x{k}")
        for i in range(k):
            if rows[i][i] != 0.0:
                raise ValueError(f"non-zero diagonal for label {self.labels[i]!r}")
            for j in range(k):
                if not math.isfinite(rows[i][j]) or rows[i][j] < 0:
                    raise ValueError("label costs must be finite and non-negative")
                if rows[i][j] != rows[j][i]:
                    raise ValueError(
                        f"asymmetric cost for {self.labels[i]!r}/{self.labels[j]!r}"
                    )
        object.__setattr__(self, "labels", tuple(str(s) for s in self.labels))
        object.__setattr__(self, "cost", rows)

    def index(self, symbol: str) -> int:
        try:
            return self.labels.index(str(symbol))
        except ValueError:
            raise KeyError(symbol) from None

    def __call__(self, a: str, b: str) -> float:
        return self.cost[self.index(a)][self.index(b)]

    @classmethod
    def from_mapping(cls, labels: Sequence[str], cost: Mapping[tuple, float]):
        k = len(labels)
        rows = [[0.0] * k for _ in range(k)]
        for (a, b), value in cost.items():
            i, j = labels.index(a), labels.index(b)
            rows[i][j] = rows[j][i] = float(value)
        return cls(tuple(labels), tuple(tuple(r) for r in rows))

    @classmethod
    def read_csv(cls, path) -> "LabelCostTable":
        import csv

        with open(path, newline="", encoding="utf-8") as fh:
            rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
        if not rows:
            raise ParseError("empty label cost table", path)
        header = [c.strip() for c in rows[0][1:]]
        body = []
        for lineno, row in enumerate(rows[1:], start=2):
            if len(body) >= len(header) or row[0].strip() != header[len(body)]:
                raise ParseError("row label does not match header order", path, lineno)
            try:
                body.append(tuple(float(c) for c in row[1:]))
            except ValueError as exc:
                raise ParseError(str(exc), path, lineno) from None
        try:
            return cls(tuple(header), tuple(body))
        except ValueError as exc:
            raise ParseError(str(exc), path) from None

    def write_csv(self, path) -> None:
        import csv

        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow([""] + list(self.labels))
            for lab, row in zip(self.labels, self.cost):
                w.writerow([lab] + [repr(x) for x in row])


@dataclass(frozen=True)
class CostModel:
    """Edit operation costs.

    ``vertex_relabel`` is the uniform relabel cost; when ``label_costs`` is
    given it replaces the uniform cost for vertex relabels.
    """

    vertex_indel: float = 1.0
    edge_indel: float = 1.0
    vertex_relabel: float = 1.0
    edge_relabel: float = 1.0
    label_costs: LabelCostTable | None = None

    def __post_init__(self):
        for name in ("vertex_indel", "edge_indel", "vertex_relabel", "edge_relabel"):
            value = float(getattr(self, name))
            if not math.isfinite(value) or value < 0:
                raise ValueError(f"{name} must be a finite non-negative number")
            object.__setattr__(self, name, value)

    @property
    def uniform(self) -> bool:
        return self.label_costs is None

    def relabel(self, a: int, b: int, symbols: SymbolTable | None = None) -> float:
        """Cost of relabelling a vertex from label id ``a`` to ``b``."""
        if a == b:
            return 0.0
        if self.label_costs is None:
            return self.vertex_relabel
        if symbols is None:
            raise ValueError("a symbol table is required with non-uniform label costs")
        return self.label_costs(symbols.symbol(a), symbols.symbol(b))

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.vertex_indel, self.edge_indel, self.vertex_relabel, self.edge_relabel)

    @classmethod
    def parse(cls, text: str, label_costs: LabelCostTable | None = None) -> "CostModel":
        """Parse ``"cv,ce,cvl,cel"``."""
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 4:
            raise ValueError("costs must be given as cv,ce,cvl,cel")
        cv, ce, cvl, cel = (float(p) for p in parts)
        return cls(cv, ce, cvl, cel, label_costs)


UNIFORM = CostModel()


def validate_cost_model(c: CostModel) -> CostModel:
    """Check that the label ground cost is a tree metric.

    With a uniform relabel cost this holds iff ``c_vl <= 2 c_v``; with a label
    cost table the corresponding check happens when the ultrametric tree is
    built (see :func:`gedindex.treemetric.build_ultrametric_tree`).
    """
    if c.label_costs is None and c.vertex_relabel > 2 * c.vertex_indel:
        raise RelabelTooExpensive(
            f"vertex relabel cost {c.vertex_relabel:g} exceeds twice the vertex "
            f"insertion/deletion cost {c.vertex_indel:g}; the label ground cost "
            "violates the triangle inequality through the dummy vertex"
        )
    return c


@dataclass(frozen=True)
class DegreeProfile:
    degrees: tuple[int, ...]
    max_degree: int
    dataset_max_degree: int | None = None

    @property
    def multiset(self) -> Counter:
        return Counter(self.degrees)


def degree_profile(g: Graph, dataset_max_degree: int | None = None) -> DegreeProfile:
    degs = tuple(sorted(g.degrees()))
    return DegreeProfile(degs, degs[-1] if degs else 0, dataset_max_degree)


def label_multiset(g: Graph) -> Counter:
    return Counter(g.labels)


def canonical_key(g: Graph) -> Hashable:
    """Structural key that is equal for identical (not merely isomorphic) graphs."""
    return (g.labels, g.edges, g.edge_labels)
