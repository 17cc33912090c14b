"""Exact graph edit distance for verification.

``exact_ged`` is a depth-first branch and bound over vertex maps with an
admissible remainder heuristic. ``brute_force_ged`` enumerates every vertex
map of tiny graphs and serves as ground truth in tests.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

from .errors import SizeCapExceeded
from .graph import UNIFORM, CostModel, Graph, SymbolTable

__all__ = [
    "EditOp",
    "EditPath",
    "GedResult",
    "induced_cost",
    "edit_path",
    "apply_edit_path",
    "exact_ged",
    "brute_force_ged",
]

BRUTE_FORCE_CAP = 7
DEFAULT_SIZE_CAP = 40
_EPS = 1e-9


def _relabel_fn(c: CostModel, symbols: SymbolTable | None):
    if c.label_costs is None:
        cvl = c.vertex_relabel
        return lambda a, b: 0.0 if a == b else cvl
    if symbols is None:
        raise ValueError("a symbol table is required with a label cost table")
    cache: dict = {}

    def relabel(a, b):
        if a == b:
            return 0.0
        key = (a, b)
        v = cache.get(key)
        if v is None:
            v = cache[key] = c.label_costs(symbols.symbol(a), symbols.symbol(b))
        return v

    return relabel


def _edge_label(g: Graph, elabels: dict, u: int, v: int):
    return elabels.get((u, v) if u < v else (v, u))


@dataclass(frozen=True)
class EditOp:
    """One edit operation.

    Vertices are named ``("g", i)`` for vertices of the source graph and
    ``("h", j)`` for inserted vertices, which take the id they have in the
    target graph.
    """

    kind: str
    target: tuple
    label: int | None
    cost: float


@dataclass(frozen=True)
class EditPath:
    ops: tuple[EditOp, ...]
    mapping: tuple  # vertex of g -> vertex of h or None
    total_cost: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "total_cost", math.fsum(op.cost for op in self.ops))

    def __len__(self):
        return len(self.ops)


@dataclass(frozen=True)
class GedResult:
    distance: float
    path: EditPath | None

    @property
    def exceeded(self) -> bool:
        return math.isinf(self.distance)


def induced_cost(g: Graph, h: Graph, mapping: Sequence, c: CostModel = UNIFORM,
                 symbols: SymbolTable | None = None) -> float:
    """Cost of the edit path induced by a vertex map from ``g`` to ``h``."""
    return edit_path(g, h, mapping, c, symbols).total_cost


def edit_path(g: Graph, h: Graph, mapping: Sequence, c: CostModel = UNIFORM,
              symbols: SymbolTable | None = None) -> EditPath:
    """Edit path realizing ``mapping``; ``mapping[i]`` is a vertex of ``h`` or None."""
    mapping = tuple(mapping)
    if len(mapping) != g.n_vertices:
        raise ValueError("mapping must cover every vertex of g")
    images = [j for j in mapping if j is not None]
    if len(set(images)) != len(images):
        raise ValueError("mapping is not injective")
    relabel = _relabel_fn(c, symbols)
    gl, hl = g.edge_label_map(), h.edge_label_map()
    inverse = {j: i for i, j in enumerate(mapping) if j is not None}
    ops = []
    for (u, v) in g.edges:
        a, b = mapping[u], mapping[v]
        if a is None or b is None or not h.has_edge(a, b):
            ops.append(EditOp("delete_edge", (("g", u), ("g", v)), None, c.edge_indel))
        else:
            la, lb = gl.get((u, v)), _edge_label(h, hl, a, b)
            if la != lb:
                ops.append(EditOp("relabel_edge", (("g", u), ("g", v)), lb, c.edge_relabel))
    for i, j in enumerate(mapping):
        if j is None:
            ops.append(EditOp("delete_vertex", (("g", i),), None, c.vertex_indel))
        elif g.labels[i] != h.labels[j]:
            ops.append(EditOp("relabel_vertex", (("g", i),), h.labels[j],
                              relabel(g.labels[i], h.labels[j])))
    for j in range(h.n_vertices):
        if j not in inverse:
            ops.append(EditOp("insert_vertex", (("h", j),), h.labels[j], c.vertex_indel))

    def name(j):
        return ("g", inverse[j]) if j in inverse else ("h", j)

    for (a, b), lab in zip(h.edges, h.edge_labels or (None,) * h.n_edges):
        ia, ib = inverse.get(a), inverse.get(b)
        if ia is None or ib is None or not g.has_edge(ia, ib):
            ops.append(EditOp("insert_edge", (name(a), name(b)), lab, c.edge_indel))
    return EditPath(tuple(ops), mapping)


def apply_edit_path(g: Graph, path: EditPath) -> tuple[dict, dict]:
    """Apply ``path`` to ``g``.

    Returns ``(vertex labels, edge labels)`` of the result, keyed by vertex
    names and by frozensets of two names.
    """
    vertices = {("g", i): lab for i, lab in enumerate(g.labels)}
    elabels = g.edge_labels or (None,) * g.n_edges
    edges = {frozenset((("g", u), ("g", v))): lab for (u, v), lab in zip(g.edges, elabels)}
    for op in path.ops:
        if op.kind == "delete_edge":
            del edges[frozenset(op.target)]
        elif op.kind == "relabel_edge":
            key = frozenset(op.target)
            if key not in edges:
                raise ValueError(f"relabel of a missing edge {op.target}")
            edges[key] = op.label
        elif op.kind == "delete_vertex":
            (v,) = op.target
            if any(v in e for e in edges):
                raise ValueError(f"deleting non-isolated vertex {v}")
            del vertices[v]
        elif op.kind == "relabel_vertex":
            vertices[op.target[0]] = op.label
        elif op.kind == "insert_vertex":
            if op.target[0] in vertices:
                raise ValueError(f"vertex {op.target[0]} already present")
            vertices[op.target[0]] = op.label
        elif op.kind == "insert_edge":
            key = frozenset(op.target)
            if key in edges or not all(v in vertices for v in op.target):
                raise ValueError(f"invalid edge insertion {op.target}")
            edges[key] = op.label
        else:
            raise ValueError(f"unknown edit operation {op.kind!r}")
    return vertices, edges


def brute_force_ged(g: Graph, h: Graph, c: CostModel = UNIFORM,
                    symbols: SymbolTable | None = None, cap: int = BRUTE_FORCE_CAP) -> float:
    """Minimum induced edit cost over all injective partial vertex maps.

    Enumeration is exhaustive up to discarding partial maps whose accumulated
    cost already reaches the best complete map found.
    """
    n, m = g.n_vertices, h.n_vertices
    if n > cap or m > cap:
        raise SizeCapExceeded(f"brute force is limited to {cap} vertices per graph")
    relabel = _relabel_fn(c, symbols)
    cv, ce, cel = c.vertex_indel, c.edge_indel, c.edge_relabel
    gl, hl = g.edge_label_map(), h.edge_label_map()
    gadj = [[g.has_edge(a, b) for b in range(n)] for a in range(n)]
    hadj = [[h.has_edge(a, b) for b in range(m)] for a in range(m)]
    n_he = h.n_edges
    phi: list = [None] * n
    used = [False] * m
    best = [(n + m) * cv + (g.n_edges + n_he) * ce]

    def rec(i, cost, mapped, covered):
        if cost >= best[0]:
            return
        if i == n:
            total = cost + (m - mapped) * cv + (n_he - covered) * ce
            if total < best[0]:
                best[0] = total
            return
        for j in list(range(m)) + [None]:
            if j is not None and used[j]:
                continue
            add = cv if j is None else relabel(g.labels[i], h.labels[j])
            cov = 0
            for k in range(i):
                ge = gadj[k][i]
                pk = phi[k]
                if j is None or pk is None:
                    if ge:
                        add += ce
                    continue
                he = hadj[pk][j]
                cov += he
                if ge and he:
                    if _edge_label(g, gl, k, i) != _edge_label(h, hl, pk, j):
                        add += cel
                elif ge or he:
                    add += ce
            phi[i] = j
            if j is not None:
                used[j] = True
            rec(i + 1, cost + add, mapped + (j is not None), covered + cov)
            if j is not None:
                used[j] = False
            phi[i] = None

    rec(0, 0.0, 0, 0)
    return best[0]


class _Search:
    """State of one branch-and-bound run."""

    def __init__(self, g, h, c, symbols, limit):
        self.g, self.h, self.c = g, h, c
        self.relabel = _relabel_fn(c, symbols)
        self.gl, self.hl = g.edge_label_map(), h.edge_label_map()
        n, m = g.n_vertices, h.n_vertices
        freq = Counter(g.labels)
        degs = g.degrees()
        self.order = sorted(range(n), key=lambda v: (-degs[v], freq[g.labels[v]], v))
        self.pos = {v: k for k, v in enumerate(self.order)}
        self.gadj = [g.neighbors(v) for v in range(n)]
        self.hadj = [h.neighbors(v) for v in range(m)]
        # label part of the remainder bound: uniform star tree weights, with the
        # relabel cost capped at 2 c_v (a smaller ground cost keeps the bound valid)
        if c.label_costs is None:
            cvl = min(c.vertex_relabel, 2 * c.vertex_indel)
            self.w_root, self.w_leaf = c.vertex_indel - cvl / 2, cvl / 2
            self.label_tree = None
        else:
            self.label_tree = _ultrametric_or_none(c, symbols)
        self.limit = limit
        self.best = math.inf
        self.best_map = None
        self.phi = [None] * n
        self.used = [False] * m

    def label_bound(self, rest_g, rest_h) -> float:
        g, h = self.g, self.h
        if self.label_tree is None and self.c.label_costs is not None:
            return abs(len(rest_g) - len(rest_h)) * self.c.vertex_indel
        if self.label_tree is not None:
            from .embedding import compute_vector, l1_distance

            t = self.label_tree
            return l1_distance(
                compute_vector((g.labels[v] for v in rest_g), t),
                compute_vector((h.labels[v] for v in rest_h), t),
            )
        cg = Counter(g.labels[v] for v in rest_g)
        ch = Counter(h.labels[v] for v in rest_h)
        diff = sum(abs(cg[k] - ch[k]) for k in cg.keys() | ch.keys())
        return self.w_root * abs(len(rest_g) - len(rest_h)) + self.w_leaf * diff

    def remainder_bound(self, i: int) -> float:
        rest_g = self.order[i:]
        rest_g_set = set(rest_g)
        rest_h = [v for v in range(len(self.used)) if not self.used[v]]
        rest_h_set = set(rest_h)
        ce = self.c.edge_indel
        # edges between processed and unprocessed vertices, per processed vertex
        cross = 0
        for p in self.order[:i]:
            a = len(self.gadj[p] & rest_g_set)
            q = self.phi[p]
            b = 0 if q is None else len(self.hadj[q] & rest_h_set)
            cross += abs(a - b)
        # degree bound on the subgraphs induced by the unprocessed vertices
        dg = Counter(len(self.gadj[v] & rest_g_set) for v in rest_g)
        dh = Counter(len(self.hadj[v] & rest_h_set) for v in rest_h)
        top = max(max(dg, default=0), max(dh, default=0))
        at_least_g = at_least_h = 0
        deg_diff = 0
        for d in range(top, 0, -1):
            at_least_g += dg.get(d, 0)
            at_least_h += dh.get(d, 0)
            deg_diff += abs(at_least_g - at_least_h)
        return self.label_bound(rest_g, rest_h) + ce * cross + ce / 2 * deg_diff

    def step_cost(self, u: int, j):
        """Cost of mapping ``u`` to ``j`` given the processed vertices."""
        c = self.c
        add = c.vertex_indel if j is None else self.relabel(self.g.labels[u], self.h.labels[j])
        covered = 0
        for k in self.order[: self.pos[u]]:
            ge = k in self.gadj[u]
            pk = self.phi[k]
            if j is None or pk is None:
                if ge:
                    add += c.edge_indel
                continue
            he = pk in self.hadj[j]
            covered += he
            if ge and he:
                if _edge_label(self.g, self.gl, k, u) != _edge_label(self.h, self.hl, pk, j):
                    add += c.edge_relabel
            elif ge or he:
                add += c.edge_indel
        return add, covered

    def run(self, i: int, cost: float, mapped: int, covered: int):
        n = len(self.order)
        m = len(self.used)
        if i == n:
            total = cost + (m - mapped) * self.c.vertex_indel + (
                self.h.n_edges - covered) * self.c.edge_indel
            if total < self.best - _EPS and total <= self.limit + _EPS:
                self.best = total
                self.best_map = list(self.phi)
            return
        bound = cost + self.remainder_bound(i)
        if bound >= self.best - _EPS or bound > self.limit + _EPS:
            return
        u = self.order[i]
        options = []
        for j in range(m):
            if not self.used[j]:
                add, cov = self.step_cost(u, j)
                options.append((add, 0, j, cov))
        add, cov = self.step_cost(u, None)
        options.append((add, 1, None, cov))
        options.sort(key=lambda o: (o[0], o[1], -1 if o[2] is None else o[2]))
        for add, _, j, cov in options:
            if cost + add >= self.best - _EPS or cost + add > self.limit + _EPS:
                continue
            self.phi[u] = j
            if j is not None:
                self.used[j] = True
            self.run(i + 1, cost + add, mapped + (j is not None), covered + cov)
            if j is not None:
                self.used[j] = False
            self.phi[u] = None


def _ultrametric_or_none(c: CostModel, symbols):
    from .errors import CostModelError
    from .treemetric import build_ultrametric_tree

    try:
        return build_ultrametric_tree(c.label_costs, c, symbols.copy())
    except CostModelError:
        return None


def exact_ged(g: Graph, h: Graph, c: CostModel = UNIFORM, threshold: float | None = None,
              symbols: SymbolTable | None = None,
              size_cap: int = DEFAULT_SIZE_CAP) -> GedResult:
    """Exact edit distance, or ``inf`` once every map provably exceeds ``threshold``.

    Without a threshold the combined vertex count is limited to ``size_cap``.
    The returned path achieves the distance.
    """
    from .bounds import branch_matching

    n, m = g.n_vertices, h.n_vertices
    if threshold is None and n + m > size_cap:
        raise SizeCapExceeded(f"{n + m} vertices exceed the exact-GED cap of {size_cap}")
    limit = math.inf if threshold is None else float(threshold)
    search = _Search(g, h, c, symbols, limit)
    _, start = branch_matching(g, h, c, symbols)
    ub = induced_cost(g, h, start, c, symbols)
    if ub <= limit + _EPS:
        search.best, search.best_map = ub, list(start)
    search.run(0, 0.0, 0, 0)
    if search.best_map is None:
        return GedResult(math.inf, None)
    path = edit_path(g, h, search.best_map, c, symbols)
    return GedResult(path.total_cost, path)
