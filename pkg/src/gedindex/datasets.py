"""Reading and writing graph datasets.

Two layouts are supported:

``tud``
    The TUDataset text layout: ``<name>_A.txt`` (1-based endpoint pairs, each
    undirected edge listed in both directions), ``<name>_graph_indicator.txt``,
    ``<name>_node_labels.txt`` and optionally ``<name>_edge_labels.txt``.

``edgelist``
    One block per graph, blocks separated by blank lines::

        g <id> <n>
        v <idx> <label>
        e <u> <v> [label]
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Sequence

from .errors import ParseError
from .graph import Graph, SymbolTable

__all__ = ["Dataset", "load_dataset", "write_dataset", "read_edgelist", "write_edgelist"]


@dataclass
class Dataset(Sequence):
    graphs: list[Graph] = field(default_factory=list)
    labels: SymbolTable = field(default_factory=SymbolTable)
    edge_labels: SymbolTable = field(default_factory=SymbolTable)
    name: str = ""

    def __getitem__(self, i):
        return self.graphs[i]

    def __len__(self):
        return len(self.graphs)

    def __iter__(self) -> Iterator[Graph]:
        return iter(self.graphs)

    @property
    def max_degree(self) -> int:
        return max((max(g.degrees(), default=0) for g in self.graphs), default=0)

    def stats(self) -> dict:
        import statistics

        n = len(self.graphs)
        degs = [d for g in self.graphs for d in g.degrees()]
        used = {lab for g in self.graphs for lab in g.labels}
        return {
            "graphs": n,
            "avg_vertices": sum(g.n_vertices for g in self.graphs) / n if n else 0.0,
            "avg_edges": sum(g.n_edges for g in self.graphs) / n if n else 0.0,
            "avg_degree": statistics.fmean(degs) if degs else 0.0,
            "std_degree": statistics.pstdev(degs) if degs else 0.0,
            "labels": len(used),
        }


def load_dataset(path, format: str = "tud") -> Dataset:
    """Load all graphs of a dataset; graph ids are 0-based file positions."""
    if format == "tud":
        return read_tud(path)
    if format == "edgelist":
        return read_edgelist(path)
    raise ValueError(f"unknown dataset format {format!r}")


def write_dataset(ds: Dataset, path, format: str = "edgelist") -> None:
    if format == "edgelist":
        write_edgelist(ds, path)
    elif format == "tud":
        write_tud(ds, path)
    else:
        raise ValueError(f"unknown dataset format {format!r}")


# -- TUDataset ---------------------------------------------------------------


def _tud_prefix(path) -> Path:
    p = Path(path)
    if p.is_dir():
        found = sorted(p.glob("*_A.txt"))
        if len(found) != 1:
            raise ParseError(f"expected exactly one *_A.txt file, found {len(found)}", p)
        return p / found[0].name[: -len("_A.txt")]
    return p


def _read_lines(path: Path) -> list[tuple[int, str]]:
    with open(path, encoding="utf-8") as fh:
        return [(i, ln.strip()) for i, ln in enumerate(fh, start=1) if ln.strip()]


def _ints(path, lineno, text, count=None):
    try:
        vals = [int(x) for x in text.replace(",", " ").split()]
    except ValueError:
        raise ParseError(f"expected integers, got {text!r}", path, lineno) from None
    if count is not None and len(vals) != count:
        raise ParseError(f"expected {count} values, got {len(vals)}", path, lineno)
    return vals


def read_tud(path) -> Dataset:
    prefix = _tud_prefix(path)
    name = prefix.name
    f_a = Path(f"{prefix}_A.txt")
    f_ind = Path(f"{prefix}_graph_indicator.txt")
    f_nl = Path(f"{prefix}_node_labels.txt")
    f_el = Path(f"{prefix}_edge_labels.txt")
    for f in (f_a, f_ind, f_nl):
        if not f.exists():
            raise FileNotFoundError(f)

    indicator = []
    for lineno, text in _read_lines(f_ind):
        (gid,) = _ints(f_ind, lineno, text, 1)
        if indicator:
            if gid < indicator[-1] or gid > indicator[-1] + 1:
                raise ParseError("inconsistent graph-indicator sequence", f_ind, lineno)
        elif gid != 1:
            raise ParseError("graph ids must start at 1", f_ind, lineno)
        indicator.append(gid)

    labels = SymbolTable()
    node_labels = []
    for lineno, text in _read_lines(f_nl):
        # benchmark files use integer codes, but any token is accepted as a symbol
        node_labels.append(labels.intern(text.split(",")[0].strip()))
    if len(node_labels) != len(indicator):
        raise ParseError(
            f"{len(node_labels)} node labels for {len(indicator)} vertices", f_nl
        )

    n_graphs = indicator[-1] if indicator else 0
    first = [0] * (n_graphs + 1)
    for v in range(len(indicator) - 1, -1, -1):
        first[indicator[v] - 1] = v
    first[n_graphs] = len(indicator)

    edge_lines = _read_lines(f_a)
    edge_label_lines = _read_lines(f_el) if f_el.exists() else None
    if edge_label_lines is not None and len(edge_label_lines) != len(edge_lines):
        raise ParseError(
            f"{len(edge_label_lines)} edge labels for {len(edge_lines)} edge lines", f_el
        )
    edge_symbols = SymbolTable()
    per_graph: list[dict] = [dict() for _ in range(n_graphs)]
    for k, (lineno, text) in enumerate(edge_lines):
        u, v = _ints(f_a, lineno, text, 2)
        if not (1 <= u <= len(indicator) and 1 <= v <= len(indicator)):
            raise ParseError(f"dangling edge endpoint in ({u}, {v})", f_a, lineno)
        gu, gv = indicator[u - 1], indicator[v - 1]
        if gu != gv:
            raise ParseError(f"edge ({u}, {v}) joins graphs {gu} and {gv}", f_a, lineno)
        if u == v:
            raise ParseError(f"self-loop at vertex {u}", f_a, lineno)
        base = first[gu - 1]
        key = (min(u, v) - 1 - base, max(u, v) - 1 - base)
        lab = None
        if edge_label_lines is not None:
            lab = edge_symbols.intern(edge_label_lines[k][1].split(",")[0].strip())
        per_graph[gu - 1].setdefault(key, lab)

    graphs = []
    for gi in range(n_graphs):
        lab = tuple(node_labels[first[gi] : first[gi + 1]])
        edges = list(per_graph[gi])
        elabels = [per_graph[gi][e] for e in edges] if edge_label_lines is not None else None
        graphs.append(Graph(lab, tuple(edges), elabels and tuple(elabels), id=gi))
    return Dataset(graphs, labels, edge_symbols, name)


def write_tud(ds: Dataset, path) -> None:
    prefix = Path(path)
    if prefix.is_dir():
        prefix = prefix / (ds.name or "dataset")
    has_el = any(g.edge_labels is not None for g in ds.graphs)
    with open(f"{prefix}_A.txt", "w", encoding="utf-8") as fa, open(
        f"{prefix}_graph_indicator.txt", "w", encoding="utf-8"
    ) as fi, open(f"{prefix}_node_labels.txt", "w", encoding="utf-8") as fn:
        fe = open(f"{prefix}_edge_labels.txt", "w", encoding="utf-8") if has_el else None
        offset = 0
        try:
            for gi, g in enumerate(ds.graphs):
                for lab in g.labels:
                    fi.write(f"{gi + 1}\n")
                    fn.write(f"{ds.labels.symbol(lab)}\n")
                elabels = g.edge_labels or (0,) * g.n_edges
                for (u, v), el in zip(g.edges, elabels):
                    for a, b in ((u, v), (v, u)):
                        fa.write(f"{a + 1 + offset}, {b + 1 + offset}\n")
                        if fe is not None:
                            sym = ds.edge_labels.symbol(el) if g.edge_labels else "0"
                            fe.write(f"{sym}\n")
                offset += g.n_vertices
        finally:
            if fe is not None:
                fe.close()


# -- edgelist ----------------------------------------------------------------


def parse_edgelist(lines, path="<string>", labels=None, edge_labels=None) -> Dataset:
    labels = labels if labels is not None else SymbolTable()
    edge_labels = edge_labels if edge_labels is not None else SymbolTable()
    graphs: list[Graph] = []
    current = None  # [lineno, n, vertex labels, edges, edge labels]

    def finish():
        nonlocal current
        if current is None:
            return
        start, n, vlabels, edges, elabels = current
        missing = [i for i in range(n) if vlabels[i] is None]
        if missing:
            raise ParseError(f"vertex {missing[0]} has no label", path, start)
        has_el = any(x is not None for x in elabels)
        if has_el and any(x is None for x in elabels):
            raise ParseError("edge labels must be given for all edges or none", path, start)
        try:
            graphs.append(
                Graph(tuple(vlabels), tuple(edges), tuple(elabels) if has_el else None,
                      id=len(graphs))
            )
        except ValueError as exc:
            raise ParseError(str(exc), path, start) from None
        current = None

    for lineno, raw in enumerate(lines, start=1):
        text = raw.strip()
        if not text or text.startswith("#"):
            if not text:
                finish()
            continue
        tok = text.split()
        kind = tok[0]
        try:
            if kind == "g":
                finish()
                if len(tok) != 3:
                    raise ParseError("expected 'g <id> <n>'", path, lineno)
                n = int(tok[2])
                if n < 0:
                    raise ParseError("negative vertex count", path, lineno)
                current = [lineno, n, [None] * n, [], []]
            elif current is None:
                raise ParseError(f"'{kind}' line outside of a graph block", path, lineno)
            elif kind == "v":
                if len(tok) != 3:
                    raise ParseError("expected 'v <idx> <label>'", path, lineno)
                idx = int(tok[1])
                if not 0 <= idx < current[1]:
                    raise ParseError(f"vertex index {idx} out of range", path, lineno)
                current[2][idx] = labels.intern(tok[2])
            elif kind == "e":
                if len(tok) not in (3, 4):
                    raise ParseError("expected 'e <u> <v> [label]'", path, lineno)
                u, v = int(tok[1]), int(tok[2])
                if not (0 <= u < current[1] and 0 <= v < current[1]):
                    raise ParseError(f"dangling edge endpoint in ({u}, {v})", path, lineno)
                current[3].append((u, v))
                current[4].append(edge_labels.intern(tok[3]) if len(tok) == 4 else None)
            else:
                raise ParseError(f"unknown record type {kind!r}", path, lineno)
        except ValueError:
            raise ParseError(f"malformed line {text!r}", path, lineno) from None
    finish()
    return Dataset(graphs, labels, edge_labels)


def read_edgelist(path, labels=None, edge_labels=None) -> Dataset:
    p = Path(path)
    if p.is_dir():
        files = sorted(p.glob("*.txt")) + sorted(p.glob("*.edgelist"))
        if not files:
            return Dataset(name=p.name)
        if len(files) != 1:
            raise ParseError("directory holds more than one edgelist file", p)
        p = files[0]
    with open(p, encoding="utf-8") as fh:
        ds = parse_edgelist(fh, str(p), labels, edge_labels)
    ds.name = p.stem
    return ds


def format_graph(g: Graph, labels: SymbolTable, edge_labels: SymbolTable | None = None,
                 gid: int | None = None) -> str:
    out = [f"g {g.id if gid is None else gid} {g.n_vertices}"]
    out.extend(f"v {i} {labels.symbol(lab)}" for i, lab in enumerate(g.labels))
    if g.edge_labels is not None:
        out.extend(
            f"e {u} {v} {edge_labels.symbol(el) if edge_labels else el}"
            for (u, v), el in zip(g.edges, g.edge_labels)
        )
    else:
        out.extend(f"e {u} {v}" for u, v in g.edges)
    return "\n".join(out) + "\n"


def write_edgelist(ds: Dataset, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(
            format_graph(g, ds.labels, ds.edge_labels, gid=i) for i, g in enumerate(ds.graphs)
        ))


def dataset_from_graphs(graphs, labels: SymbolTable | None = None, name="") -> Dataset:
    graphs = [g.with_id(i) for i, g in enumerate(graphs)]
    if labels is None:
        labels = SymbolTable()
        for lab in sorted({x for g in graphs for x in g.labels}):
            while len(labels) <= lab:
                labels.intern(str(len(labels)))
    return Dataset(graphs, labels, SymbolTable(), name)

