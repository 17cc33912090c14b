"""Filter-verification similarity search over a graph database.

Database graphs are embedded once; the embeddings are indexed by a cover tree
under the ℓ1 distance, which equals the chosen lower bound on the edit
distance. Range queries filter with the index and verify survivors with the
exact edit distance; k-nearest-neighbour queries interleave an incremental
ranking by lower bound with exact refinement and stop as soon as no unseen
graph can improve the answer.
"""

from __future__ import annotations

import json
import math
import struct
import time
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from .bounds import BOUND_KINDS, GraphEmbedder, branch_matching
from .covertree import CoverTree
from .embedding import CompositeEmbedding, Embedding
from .errors import CorruptIndex, IndexVersionError, TreeMismatch
from .exact import exact_ged, induced_cost
from .graph import UNIFORM, CostModel, Graph, LabelCostTable, SymbolTable
from .treemetric import DUMMY, MetricTree, build_tree

__all__ = [
    "SearchIndex",
    "QueryResult",
    "build_index",
    "range_query",
    "knn_query",
    "incremental_ranking",
    "save_index",
    "load_index",
]

MAGIC = b"EMBA"
FORMAT_VERSION = 1
SCHEMA_VERSION = 1  # JSON output schema of the command-line tools


@dataclass
class QueryResult:
    """Answers sorted by (distance, id).

    With ``verified=False`` the answers are the filter candidates paired with
    their lower bounds. Ids in ``upper_bounded`` were accepted because an
    upper bound was within the radius; their distance is that upper bound.
    """

    answers: list[tuple[int, float]]
    candidates: int
    exact_computations: int
    filter_time: float = 0.0
    verify_time: float = 0.0
    verified: bool = True
    upper_bounded: set = field(default_factory=set)

    @property
    def ids(self) -> list[int]:
        return [i for i, _ in self.answers]


class SearchIndex:
    """Embeddings of a graph database indexed for ℓ1 range and ranking queries."""

    def __init__(self, graphs: Sequence[Graph], embedder: GraphEmbedder, bound: str,
                 symbols: SymbolTable, embeddings: Sequence[CompositeEmbedding] | None = None,
                 base: float = 2.0, threads: int = 1):
        if bound not in BOUND_KINDS:
            raise ValueError(f"bound must be one of {BOUND_KINDS}")
        self.graphs = [g if g.id == i else g.with_id(i) for i, g in enumerate(graphs)]
        self.embedder = embedder
        self.costs: CostModel = embedder.costs
        self.bound = bound
        self.symbols = symbols
        self.base = base
        self.threads = threads
        if embeddings is None:
            embeddings = [embedder.embed(g, bound) for g in self.graphs]
        self.embeddings = list(embeddings)
        self._versions = tuple(p.tree_version for p in self._parts_template())
        keys = sorted({(p, k) for e in self.embeddings for p, part in enumerate(e.parts)
                       for k in part.entries})
        self.columns = {key: c for c, key in enumerate(keys)}
        X = np.zeros((len(self.embeddings), len(keys)))
        cols = self.columns
        for row, e in enumerate(self.embeddings):
            for p, part in enumerate(e.parts):
                for k, v in part.entries.items():
                    X[row, cols[(p, k)]] = v
        self.X = X
        self.tree = CoverTree(X, base)

    def _parts_template(self):
        empty = Graph(())
        return self.embedder.embed(empty, self.bound).parts

    def __len__(self):
        return len(self.graphs)

    @property
    def metric_trees(self) -> tuple[MetricTree, ...]:
        return {"llb": (self.embedder.label_tree,), "dlb": (self.embedder.degree_tree,),
                "clb": self.embedder.trees}[self.bound]

    def embed(self, g: Graph) -> CompositeEmbedding:
        return self.embedder.embed(g, self.bound)

    def dense(self, e: CompositeEmbedding) -> tuple[np.ndarray, float]:
        """Dense query row plus the ℓ1 mass on coordinates no stored point uses."""
        if tuple(p.tree_version for p in e.parts) != self._versions:
            raise TreeMismatch("query embedding was built with different trees")
        q = np.zeros(self.X.shape[1])
        extra = 0.0
        for p, part in enumerate(e.parts):
            for k, v in part.entries.items():
                c = self.columns.get((p, k))
                if c is None:
                    extra += v
                else:
                    q[c] = v
        return q, extra

    def lower_bound(self, i: int, q: Graph) -> float:
        return self.embeddings[i].l1(self.embed(q))

    def candidates(self, q: Graph | CompositeEmbedding, r: float) -> tuple[np.ndarray, np.ndarray]:
        """Ids and lower bounds of all stored graphs whose bound is within ``r``."""
        e = q if isinstance(q, CompositeEmbedding) else self.embed(q)
        row, extra = self.dense(e)
        ids, d = self.tree.range_search(row, r - extra)
        return ids, d + extra

    def linear_candidates(self, q: Graph | CompositeEmbedding, r: float):
        e = q if isinstance(q, CompositeEmbedding) else self.embed(q)
        row, extra = self.dense(e)
        ids, d = self.tree.linear_range(row, r - extra)
        return ids, d + extra

    def exact(self, i: int, q: Graph, threshold: float | None = None) -> float:
        return exact_ged(self.graphs[i], q, self.costs, threshold, self.symbols).distance


def build_index(db: Sequence[Graph], c: CostModel = UNIFORM, bound: str = "clb",
                symbols: SymbolTable | None = None, base: float = 2.0,
                threads: int = 1) -> SearchIndex:
    """Build trees from the database alphabet and maximum degree, embed, index."""
    if symbols is None:
        symbols = getattr(db, "labels", None)
    if symbols is None:
        symbols = SymbolTable(str(i) for i in range(
            max((max(g.labels, default=-1) for g in db), default=-1) + 1))
    embedder = GraphEmbedder.for_graphs(list(db), c, symbols)
    return SearchIndex(list(db), embedder, bound, symbols, base=base, threads=threads)


def incremental_ranking(idx: SearchIndex, q: Graph | CompositeEmbedding) -> Iterator[tuple[int, float]]:
    """Stored graphs in ascending lower-bound order (ties by id), lazily."""
    e = q if isinstance(q, CompositeEmbedding) else idx.embed(q)
    row, extra = idx.dense(e)
    for d, i in idx.tree.ranked(row):
        yield i, d + extra


def _verify_many(idx: SearchIndex, ids: Sequence[int], q: Graph, r: float):
    if idx.threads > 1 and len(ids) > 1:
        with ThreadPoolExecutor(idx.threads) as pool:
            return list(pool.map(lambda i: idx.exact(i, q, r), ids))
    return [idx.exact(i, q, r) for i in ids]


def range_query(idx: SearchIndex, q: Graph, r: float, verify: str = "exact",
                extra_filter: str | None = None) -> QueryResult:
    """All stored graphs within edit distance ``r`` of ``q``.

    ``verify="none"`` returns the filter candidates (a superset of the answer).
    ``extra_filter="branch"`` drops candidates whose BranchLB exceeds ``r`` and
    accepts those whose BranchUB is within ``r`` without exact verification.
    """
    if r < 0:
        raise ValueError("radius must be non-negative")
    if verify not in ("none", "exact"):
        raise ValueError("verify must be 'none' or 'exact'")
    t0 = time.perf_counter()
    ids, bounds = idx.candidates(q, r)
    t1 = time.perf_counter()
    if verify == "none":
        answers = sorted(zip(ids.tolist(), bounds.tolist()), key=lambda a: (a[1], a[0]))
        return QueryResult(answers, len(ids), 0, t1 - t0, 0.0, verified=False)
    answers, todo, upper = [], [], set()
    for i in ids.tolist():
        if extra_filter == "branch":
            g = idx.graphs[i]
            blb, mapping = branch_matching(g, q, idx.costs, idx.symbols)
            if blb > r + 1e-9:
                continue
            ub = induced_cost(g, q, mapping, idx.costs, idx.symbols)
            if ub <= r + 1e-9:
                answers.append((i, ub))
                upper.add(i)
                continue
        elif extra_filter is not None:
            raise ValueError(f"unknown extra filter {extra_filter!r}")
        todo.append(i)
    for i, d in zip(todo, _verify_many(idx, todo, q, r)):
        if d <= r + 1e-9:
            answers.append((i, d))
    t2 = time.perf_counter()
    answers.sort(key=lambda a: (a[1], a[0]))
    return QueryResult(answers, len(ids), len(todo), t1 - t0, t2 - t1, True, upper)


def knn_query(idx: SearchIndex, q: Graph, k: int, verify: str = "exact") -> QueryResult:
    """The ``k`` nearest stored graphs by exact edit distance, with all ties.

    Candidates are drawn in ascending lower-bound order and refined with the
    current k-th distance as threshold; the scan stops at the first candidate
    whose lower bound exceeds that distance.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    if verify != "exact":
        raise ValueError("kNN queries always verify exactly")
    t0 = time.perf_counter()
    filter_time = 0.0
    found: list[tuple[float, int]] = []
    kth = math.inf
    n_exact = 0
    ranking = incremental_ranking(idx, q)
    while True:
        ts = time.perf_counter()
        nxt = next(ranking, None)
        filter_time += time.perf_counter() - ts
        if nxt is None:
            break
        i, lb = nxt
        if lb > kth + 1e-9:
            break
        d = idx.exact(i, q, None if math.isinf(kth) else kth)
        n_exact += 1
        if math.isinf(d):
            continue
        found.append((d, i))
        if len(found) >= k:
            found.sort()
            kth = found[k - 1][0]
    found.sort()
    answers = [(i, d) for d, i in found if d <= kth + 1e-9]
    total = time.perf_counter() - t0
    return QueryResult(answers, n_exact, n_exact, filter_time, total - filter_time)


# -- persistence -----------------------------------------------------------------


def _pack_str(s: str) -> bytes:
    b = s.encode("utf-8")
    return struct.pack("<I", len(b)) + b


class _Reader:
    def __init__(self, buf: bytes):
        self.buf = buf
        self.pos = 0

    def take(self, fmt: str):
        vals = struct.unpack_from(fmt, self.buf, self.pos)
        self.pos += struct.calcsize(fmt)
        return vals

    def one(self, fmt: str):
        return self.take(fmt)[0]

    def string(self) -> str:
        n = self.one("<I")
        s = self.buf[self.pos : self.pos + n].decode("utf-8")
        self.pos += n
        return s

    def array(self, dtype, count: int) -> np.ndarray:
        a = np.frombuffer(self.buf, dtype=dtype, count=count, offset=self.pos)
        self.pos += a.nbytes
        return a


def _pack_tree(t: MetricTree) -> bytes:
    out = [_pack_str(t.kind), struct.pack("<I", t.n_nodes)]
    out.append(np.asarray(t.parent, dtype="<i4").tobytes())
    out.append(np.asarray(t.weight, dtype="<f8").tobytes())
    out.append(struct.pack("<dI", t.extend_weight, len(t.anchors)))
    for key, node in sorted(t.anchors.items(), key=lambda kv: -1 if kv[0] is DUMMY else kv[0]):
        out.append(struct.pack("<qi", -1 if key is DUMMY else key, node))
    return b"".join(out)


def _unpack_tree(r: _Reader) -> MetricTree:
    kind = r.string()
    n = r.one("<I")
    parent = r.array("<i4", n).tolist()
    weight = r.array("<f8", n).tolist()
    ext, n_anchor = r.take("<dI")
    anchors = {}
    for _ in range(n_anchor):
        key, node = r.take("<qi")
        anchors[DUMMY if key == -1 else key] = node
    return build_tree(kind, parent=parent, weight=weight, anchors=anchors, extend_weight=ext)


def _pack_graph(g: Graph) -> bytes:
    out = [struct.pack("<I", g.n_vertices), np.asarray(g.labels, dtype="<i4").tobytes(),
           struct.pack("<I", g.n_edges), np.asarray(g.edges, dtype="<i4").reshape(-1).tobytes(),
           struct.pack("<B", g.edge_labels is not None)]
    if g.edge_labels is not None:
        out.append(np.asarray(g.edge_labels, dtype="<i4").tobytes())
    return b"".join(out)


def _unpack_graph(r: _Reader, gid: int) -> Graph:
    nv = r.one("<I")
    labels = tuple(r.array("<i4", nv).tolist())
    ne = r.one("<I")
    flat = r.array("<i4", 2 * ne).tolist()
    edges = tuple(zip(flat[0::2], flat[1::2]))
    elabels = tuple(r.array("<i4", ne).tolist()) if r.one("<B") else None
    return Graph(labels, edges, elabels, id=gid)


def save_index(idx: SearchIndex, path) -> None:
    c = idx.costs
    meta = {
        "bound": idx.bound,
        "costs": list(c.as_tuple()),
        "label_costs": None if c.label_costs is None else {
            "labels": list(c.label_costs.labels), "cost": [list(r) for r in c.label_costs.cost]},
        "symbols": idx.symbols.symbols,
        "base": idx.base,
    }
    body = [MAGIC, struct.pack("<H", FORMAT_VERSION), _pack_str(json.dumps(meta))]
    trees = idx.embedder.trees
    body.append(struct.pack("<I", len(trees)))
    body.extend(_pack_tree(t) for t in trees)
    body.append(struct.pack("<I", len(idx.graphs)))
    for g, e in zip(idx.graphs, idx.embeddings):
        body.append(struct.pack("<q", g.id))
        body.append(_pack_graph(g))
        body.append(struct.pack("<B", len(e.parts)))
        body.extend(part.to_bytes() for part in e.parts)
    blob = b"".join(body)
    Path(path).write_bytes(blob + struct.pack("<I", zlib.crc32(blob)))


def load_index(path, threads: int = 1) -> SearchIndex:
    data = Path(path).read_bytes()
    if len(data) < 10 or data[:4] != MAGIC:
        raise CorruptIndex(f"{path}: not an index file (bad magic)")
    blob, (crc,) = data[:-4], struct.unpack("<I", data[-4:])
    if zlib.crc32(blob) != crc:
        raise CorruptIndex(f"{path}: checksum mismatch")
    r = _Reader(blob)
    r.pos = 4
    version = r.one("<H")
    if version != FORMAT_VERSION:
        raise IndexVersionError(f"{path}: format version {version}, expected {FORMAT_VERSION}")
    try:
        meta = json.loads(r.string())
        table = None
        if meta["label_costs"] is not None:
            lc = meta["label_costs"]
            table = LabelCostTable(tuple(lc["labels"]), tuple(tuple(x) for x in lc["cost"]))
        costs = CostModel(*meta["costs"], label_costs=table)
        symbols = SymbolTable(meta["symbols"])
        trees = [_unpack_tree(r) for _ in range(r.one("<I"))]
        embedder = GraphEmbedder.from_trees(costs, trees[0], trees[1], symbols)
        versions = {"llb": [trees[0].version], "dlb": [trees[1].version],
                    "clb": [t.version for t in trees]}[meta["bound"]]
        graphs, embeddings = [], []
        for _ in range(r.one("<I")):
            gid = r.one("<q")
            graphs.append(_unpack_graph(r, gid))
            parts = []
            for p in range(r.one("<B")):
                emb, r.pos = Embedding.from_bytes(blob, versions[p], r.pos)
                parts.append(emb)
            embeddings.append(CompositeEmbedding(tuple(parts)))
    except (struct.error, KeyError, ValueError, IndexError) as exc:
        raise CorruptIndex(f"{path}: {exc}") from None
    if r.pos != len(blob):
        raise CorruptIndex(f"{path}: trailing bytes")
    return SearchIndex(graphs, embedder, meta["bound"], symbols, embeddings,
                       base=meta["base"], threads=threads)
