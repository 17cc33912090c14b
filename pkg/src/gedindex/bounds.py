"""Lower and upper bounds on the graph edit distance.

The label, degree and combined bounds are optimal assignment costs under
tree-metric ground costs and are evaluated as ℓ1 distances of embeddings.
The Branch bounds solve the assignment under the summed (non-tree) ground
cost with the Hungarian method.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from .assignment import MAX_DENSE, hungarian
from .embedding import CompositeEmbedding, compute_vector
from .errors import InstanceTooLarge
from .graph import UNIFORM, CostModel, Graph, SymbolTable, validate_cost_model
from .treemetric import (
    MetricTree,
    build_degree_tree,
    build_label_tree,
    build_ultrametric_tree,
)

__all__ = [
    "BOUND_KINDS",
    "GraphEmbedder",
    "BoundReport",
    "slf",
    "llb",
    "dlb",
    "clb",
    "branch_lb",
    "branch_matching",
    "branch_ub",
    "bound_report",
    "relabel_matrix",
    "branch_cost_matrix",
]

BOUND_KINDS = ("llb", "dlb", "clb")


class GraphEmbedder:
    """Label and degree trees for one cost model, plus graph embedding.

    The degree tree is built for ``max_degree`` but extends logically to any
    larger degree; the uniform label tree likewise extends to unseen label
    ids. Trees built from a label cost table cover exactly its labels.
    """

    def __init__(self, costs: CostModel, n_labels: int, max_degree: int,
                 symbols: SymbolTable | None = None):
        self.costs = costs
        self.symbols = symbols
        if costs.label_costs is None:
            validate_cost_model(costs)
            self.label_tree = build_label_tree(range(n_labels), costs)
        else:
            if symbols is None:
                raise ValueError("a symbol table is required with a label cost table")
            self.label_tree = build_ultrametric_tree(costs.label_costs, costs, symbols)
        self.degree_tree = build_degree_tree(max_degree, costs)

    @classmethod
    def for_graphs(cls, graphs: Sequence[Graph], costs: CostModel = UNIFORM,
                   symbols: SymbolTable | None = None) -> "GraphEmbedder":
        n_labels = max((max(g.labels, default=-1) for g in graphs), default=-1) + 1
        max_deg = max((max(g.degrees(), default=0) for g in graphs), default=0)
        return cls(costs, n_labels, max_deg, symbols)

    @classmethod
    def from_trees(cls, costs, label_tree, degree_tree, symbols=None) -> "GraphEmbedder":
        self = cls.__new__(cls)
        self.costs = costs
        self.symbols = symbols
        self.label_tree = label_tree
        self.degree_tree = degree_tree
        return self

    @property
    def trees(self) -> tuple[MetricTree, MetricTree]:
        return self.label_tree, self.degree_tree

    def label_vector(self, g: Graph):
        return compute_vector(g.labels, self.label_tree)

    def degree_vector(self, g: Graph):
        return compute_vector(g.degrees(), self.degree_tree)

    def embed(self, g: Graph, kind: str = "clb") -> CompositeEmbedding:
        if kind == "llb":
            return CompositeEmbedding((self.label_vector(g),))
        if kind == "dlb":
            return CompositeEmbedding((self.degree_vector(g),))
        if kind == "clb":
            return CompositeEmbedding((self.label_vector(g), self.degree_vector(g)))
        raise ValueError(f"unknown bound kind {kind!r}")

    def bound(self, g: Graph, h: Graph, kind: str = "clb") -> float:
        return self.embed(g, kind).l1(self.embed(h, kind))


@dataclass
class BoundReport:
    slf: float
    llb: float
    dlb: float
    clb: float
    branch_lb: float
    branch_ub: float | None = None
    exact: float | None = None

    def chain_holds(self, tol: float = 1e-9) -> bool:
        seq = [self.slf, self.clb, self.branch_lb]
        if self.exact is not None:
            seq.append(self.exact)
        if self.branch_ub is not None:
            seq.append(self.branch_ub)
        return all(a <= b + tol for a, b in zip(seq, seq[1:]))

    def to_json(self) -> str:
        return json.dumps(asdict(self))


def slf(g: Graph, h: Graph) -> float:
    """Simple label filter under unit costs.

    Counts the vertices that cannot be matched to an equally labelled vertex
    plus the difference in edge counts.
    """
    common = sum((g.label_counts() & h.label_counts()).values())
    return float(max(g.n_vertices, h.n_vertices) - common + abs(g.n_edges - h.n_edges))


def _pair_embedder(g, h, c, symbols):
    return GraphEmbedder.for_graphs([g, h], c, symbols)


def llb(g: Graph, h: Graph, c: CostModel = UNIFORM, symbols: SymbolTable | None = None) -> float:
    return _pair_embedder(g, h, c, symbols).bound(g, h, "llb")


def dlb(g: Graph, h: Graph, c: CostModel = UNIFORM, symbols: SymbolTable | None = None) -> float:
    return _pair_embedder(g, h, c, symbols).bound(g, h, "dlb")


def clb(g: Graph, h: Graph, c: CostModel = UNIFORM, symbols: SymbolTable | None = None) -> float:
    return _pair_embedder(g, h, c, symbols).bound(g, h, "clb")


def relabel_matrix(la: Sequence[int], lb: Sequence[int], c: CostModel,
                   symbols: SymbolTable | None = None) -> np.ndarray:
    """Vertex relabel costs between two label sequences."""
    a = np.asarray(la, dtype=np.intp)
    b = np.asarray(lb, dtype=np.intp)
    if c.label_costs is None:
        return np.where(a[:, None] == b[None, :], 0.0, c.vertex_relabel)
    if symbols is None:
        raise ValueError("a symbol table is required with a label cost table")
    table = c.label_costs
    ids = sorted(set(la) | set(lb))
    pos = {lab: table.index(symbols.symbol(lab)) for lab in ids}
    full = np.asarray(table.cost)
    ia = np.array([pos[x] for x in la], dtype=np.intp)
    ib = np.array([pos[x] for x in lb], dtype=np.intp)
    return full[np.ix_(ia, ib)] if len(ia) and len(ib) else np.zeros((len(ia), len(ib)))


def branch_cost_matrix(g: Graph, h: Graph, c: CostModel = UNIFORM,
                       symbols: SymbolTable | None = None) -> np.ndarray:
    """Padded ``(n+m)`` square matrix of label plus half-degree-difference costs."""
    n, m = g.n_vertices, h.n_vertices
    size = n + m
    if size > MAX_DENSE:
        raise InstanceTooLarge(f"padded instance of size {size} exceeds {MAX_DENSE}")
    half = c.edge_indel / 2
    dg = np.asarray(g.degrees(), dtype=float)
    dh = np.asarray(h.degrees(), dtype=float)
    out = np.zeros((size, size))
    out[:n, :m] = relabel_matrix(g.labels, h.labels, c, symbols) + half * np.abs(
        dg[:, None] - dh[None, :]
    )
    out[:n, m:] = (c.vertex_indel + half * dg)[:, None]
    out[n:, :m] = (c.vertex_indel + half * dh)[None, :]
    return out


def branch_matching(g: Graph, h: Graph, c: CostModel = UNIFORM,
                    symbols: SymbolTable | None = None) -> tuple[float, list]:
    """BranchLB value and the vertex map induced by its optimal assignment.

    The map sends each vertex of ``g`` to a vertex of ``h`` or to ``None``.
    """
    cost, cols = hungarian(branch_cost_matrix(g, h, c, symbols))
    m = h.n_vertices
    mapping = [j if j < m else None for j in cols[: g.n_vertices]]
    return cost, mapping


def branch_lb(g: Graph, h: Graph, c: CostModel = UNIFORM,
              symbols: SymbolTable | None = None) -> float:
    return branch_matching(g, h, c, symbols)[0]


def branch_ub(g: Graph, h: Graph, c: CostModel = UNIFORM,
              symbols: SymbolTable | None = None, mapping=None) -> float:
    """Cost of the edit path induced by the Branch assignment."""
    from .exact import induced_cost

    if mapping is None:
        mapping = branch_matching(g, h, c, symbols)[1]
    return induced_cost(g, h, mapping, c, symbols)


def bound_report(g: Graph, h: Graph, c: CostModel = UNIFORM,
                 symbols: SymbolTable | None = None, exact: bool = False) -> BoundReport:
    emb = _pair_embedder(g, h, c, symbols)
    lo = emb.bound(g, h, "llb")
    do = emb.bound(g, h, "dlb")
    blb, mapping = branch_matching(g, h, c, symbols)
    report = BoundReport(
        slf=slf(g, h), llb=lo, dlb=do, clb=lo + do, branch_lb=blb,
        branch_ub=branch_ub(g, h, c, symbols, mapping),
    )
    if exact:
        from .exact import exact_ged

        report.exact = exact_ged(g, h, c, symbols=symbols).distance
    return report

