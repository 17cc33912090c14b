import os

import pytest

from gedindex.datasets import (
    dataset_from_graphs,
    load_dataset,
    parse_edgelist,
    read_edgelist,
    read_tud,
    write_dataset,
)
from gedindex.errors import ParseError
from gedindex.graph import Graph

TWO_GRAPHS = """\
# two small molecules
g 0 3
v 0 C
v 1 O
v 2 C
e 0 1
e 1 2

g 1 2
v 0 C
v 1 N
e 0 1 double
"""


def write_tud_files(d, name, A, indicator, labels, edge_labels=None):
    d.mkdir(exist_ok=True)
    (d / f"{name}_A.txt").write_text(A)
    (d / f"{name}_graph_indicator.txt").write_text(indicator)
    (d / f"{name}_node_labels.txt").write_text(labels)
    if edge_labels is not None:
        (d / f"{name}_edge_labels.txt").write_text(edge_labels)
    return d


def test_parse_edgelist_two_graphs():
    ds = parse_edgelist(TWO_GRAPHS.splitlines())
    assert len(ds) == 2
    g, h = ds
    assert g.id == 0 and h.id == 1
    assert [ds.labels.symbol(x) for x in g.labels] == ["C", "O", "C"]
    assert g.edges == ((0, 1), (1, 2)) and g.edge_labels is None
    assert ds.edge_labels.symbol(h.edge_labels[0]) == "double"


def test_edgelist_roundtrip(tmp_path):
    ds = parse_edgelist(TWO_GRAPHS.splitlines())
    p = tmp_path / "out.txt"
    write_dataset(ds, p, "edgelist")
    back = read_edgelist(p)
    assert len(back) == 2
    for a, b in zip(ds, back):
        assert a.same_structure(b)
    assert back.labels == ds.labels


@pytest.mark.parametrize("text, line", [
    ("g 0 2\nv 0 A\nv 1 B\ne 0 5\n", 4),
    ("v 0 A\n", 1),
    ("g 0 2\nv 0 A\n", 1),
    ("g 0 1\nv 0 A\nx 1\n", 3),
    ("g 0 x\n", 1),
    ("g 0 2\nv 0 A\nv 1 A\ne 0 1\ne 1 0\n", 1),
    ("g 0 2\nv 0 A\nv 3 A\n", 3),
])
def test_edgelist_errors_carry_line(text, line):
    with pytest.raises(ParseError) as exc:
        parse_edgelist(text.splitlines(), "f.txt")
    assert exc.value.line == line
    assert "f.txt" in str(exc.value)


def test_empty_edgelist_directory(tmp_path):
    ds = load_dataset(tmp_path, "edgelist")
    assert len(ds) == 0
    assert ds.stats()["graphs"] == 0 and ds.stats()["avg_vertices"] == 0.0


def test_read_tud(tmp_path):
    d = write_tud_files(
        tmp_path / "TOY", "TOY",
        "1, 2\n2, 1\n2, 3\n3, 2\n4, 5\n5, 4\n",
        "1\n1\n1\n2\n2\n",
        "0\n1\n0\n2\n2\n",
        "1\n1\n2\n2\n1\n1\n",
    )
    ds = read_tud(d)
    assert ds.name == "TOY" and len(ds) == 2
    g, h = ds
    assert g.edges == ((0, 1), (1, 2)) and h.edges == ((0, 1),)
    assert [ds.labels.symbol(x) for x in h.labels] == ["2", "2"]
    assert g.edge_labels is not None and len(g.edge_labels) == 2
    s = ds.stats()
    assert s["graphs"] == 2 and s["avg_vertices"] == 2.5 and s["labels"] == 3


def test_tud_roundtrip(tmp_path):
    ds = parse_edgelist(TWO_GRAPHS.splitlines())
    ds.name = "RT"
    out = tmp_path / "rt"
    out.mkdir()
    write_dataset(ds, out, "tud")
    back = load_dataset(out, "tud")
    assert [g.edges for g in back] == [g.edges for g in ds]
    assert [[back.labels.symbol(x) for x in g.labels] for g in back] == \
        [[ds.labels.symbol(x) for x in g.labels] for g in ds]


@pytest.mark.parametrize("A, indicator, labels, message", [
    ("1, 9\n", "1\n1\n", "0\n0\n", "dangling"),
    ("1, 2\n", "1\n2\n", "0\n0\n", "joins graphs"),
    ("1, 2\n", "1\n3\n", "0\n0\n", "indicator"),
    ("1, 2\n", "1\n1\n", "0\n", "node labels"),
])
def test_tud_errors(tmp_path, A, indicator, labels, message):
    d = write_tud_files(tmp_path / "BAD", "BAD", A, indicator, labels)
    with pytest.raises(ParseError, match=message):
        read_tud(d)


def test_tud_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        read_tud(tmp_path / "NOPE")


def test_dataset_from_graphs_reindexes():
    ds = dataset_from_graphs([Graph((2,), id=9), Graph((0, 1), [(0, 1)], id=4)])
    assert [g.id for g in ds] == [0, 1]
    assert ds.labels.symbols == ["0", "1", "2"]
    assert ds.max_degree == 1


def _tud_path(name):
    root = os.environ.get("GEDINDEX_TUD_ROOT")
    if not root or not os.path.isdir(os.path.join(root, name)):
        pytest.skip(f"{name} not available (set GEDINDEX_TUD_ROOT)")
    return os.path.join(root, name)


def test_mutag_stats():
    s = load_dataset(_tud_path("MUTAG")).stats()
    assert s["graphs"] == 188 and s["labels"] == 7


def test_ptc_fm_stats():
    s = load_dataset(_tud_path("PTC_FM")).stats()
    assert s["graphs"] == 349 and abs(s["avg_vertices"] - 14.11) < 0.005
