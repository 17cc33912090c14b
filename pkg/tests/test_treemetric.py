import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gedindex.errors import DeletionTooCheap, RelabelTooExpensive, UnanchoredVertex
from gedindex.graph import CostModel, LabelCostTable, SymbolTable
from gedindex.treemetric import (
    DUMMY,
    MetricTree,
    build_degree_tree,
    build_label_tree,
    build_ultrametric_tree,
    single_linkage,
    subdominant_ultrametric,
    tree_distance,
)


def c_llb(a, b, c):
    if a is DUMMY and b is DUMMY:
        return 0.0
    if a is DUMMY or b is DUMMY:
        return c.vertex_indel
    return 0.0 if a == b else c.vertex_relabel


def test_label_tree_three_labels():
    t = build_label_tree([0, 1, 2], CostModel())
    assert t.n_nodes == 5
    assert tree_distance(t, 0, 1) == 1
    assert tree_distance(t, 0, DUMMY) == 1
    assert tree_distance(t, 0, 0) == 0


def test_label_tree_weights_two_labels():
    t = build_label_tree([0, 1], CostModel())
    assert t.weight == (0.0, 0.5, 0.5, 0.5)


def test_label_tree_single_label():
    c = CostModel(vertex_indel=3, vertex_relabel=2)
    t = build_label_tree([0], c)
    assert tree_distance(t, 0, 0) == 0 and tree_distance(t, 0, DUMMY) == 3


@pytest.mark.parametrize("cv, cvl", [(1, 1), (1, 2), (2, 0.5), (1, 0), (0.5, 1)])
def test_label_tree_realizes_llb_cost(cv, cvl):
    c = CostModel(vertex_indel=cv, vertex_relabel=cvl)
    t = build_label_tree(range(4), c)
    keys = [DUMMY, 0, 1, 2, 3]
    for a, b in itertools.product(keys, keys):
        assert t.distance(a, b) == pytest.approx(c_llb(a, b, c), abs=1e-12)


def test_label_tree_boundary_and_rejection():
    t = build_label_tree([0, 1], CostModel(vertex_relabel=2))
    assert t.weight[1] == 0.0
    with pytest.raises(RelabelTooExpensive):
        build_label_tree([0, 1], CostModel(vertex_relabel=3))


def test_label_tree_extends_to_unseen_labels():
    small = build_label_tree([0, 1], CostModel())
    big = build_label_tree(range(6), CostModel())
    assert small.version == big.version
    assert small.distance(5, 0) == 1 and small.distance(5, DUMMY) == 1
    assert small.node_of(5) == big.node_of(5)


def test_degree_tree_examples():
    assert build_degree_tree(0, CostModel()).n_nodes == 1
    t0 = build_degree_tree(0, CostModel())
    assert t0.distance(0, DUMMY) == 0
    t = build_degree_tree(3, CostModel())
    assert t.distance(1, 3) == 1 and t.distance(2, DUMMY) == 1
    assert build_degree_tree(2, CostModel(edge_indel=2)).distance(2, 0) == 2
    assert tree_distance(build_degree_tree(5, CostModel()), 1, 4) == 1.5
    # logical extension past the built maximum degree
    assert t.distance(7, 1) == 3 and build_degree_tree(7, CostModel()).version == t.version
    with pytest.raises(ValueError):
        build_degree_tree(-1, CostModel())


def test_unanchored_key():
    t = build_label_tree([0], CostModel())
    with pytest.raises(UnanchoredVertex):
        t.node_of("x")
    with pytest.raises(KeyError):
        t.node_of(-3)


def test_metric_tree_validation():
    with pytest.raises(ValueError):
        MetricTree((-1, -1), (0, 1), {})
    with pytest.raises(ValueError):
        MetricTree((-1, 0), (0, -1), {})
    with pytest.raises(ValueError):
        MetricTree((-1, 0), (0, 1), {"a": 5})
    with pytest.raises(ValueError):
        MetricTree((1, 2, 1), (0, 1, 1), {})


def _table(labels, cost):
    return LabelCostTable(tuple(labels), tuple(tuple(float(x) for x in r) for r in cost))


def test_ultrametric_hand_example():
    table = _table("abc", [[0, 1, 3], [1, 0, 3], [3, 3, 0]])
    st = SymbolTable("abc")
    t = build_ultrametric_tree(table, CostModel(vertex_indel=2), st)
    a, b, c = (st.lookup(x) for x in "abc")
    assert t.distance(a, b) == 1 and t.distance(a, c) == 3 and t.distance(b, c) == 3
    for x in (a, b, c):
        assert t.distance(x, DUMMY) == 2
    root_child = t.parent.index(0)
    assert t.weight[root_child] == 0.5


def test_ultrametric_collapses_gap():
    table = _table("abc", [[0, 1, 5], [1, 0, 1], [5, 1, 0]])
    u = subdominant_ultrametric(table.cost)
    assert u[0][2] == 1 and u[0][1] == 1 and u[1][2] == 1


def test_ultrametric_deletion_too_cheap():
    table = _table("ab", [[0, 4], [4, 0]])
    with pytest.raises(DeletionTooCheap):
        build_ultrametric_tree(table, CostModel(vertex_indel=1))


def test_single_linkage_merge_ids():
    merges = single_linkage([[0, 2, 9], [2, 0, 4], [9, 4, 0]])
    assert merges == [(0, 1, 2), (2, 3, 4)]
    assert single_linkage([]) == []


def test_subdominant_matches_scipy():
    from scipy.cluster.hierarchy import cophenet, linkage
    from scipy.spatial.distance import squareform

    rng = np.random.default_rng(3)
    for _ in range(30):
        k = int(rng.integers(2, 9))
        m = rng.uniform(0.1, 5, (k, k))
        m = np.triu(m, 1)
        m = m + m.T
        ours = np.array(subdominant_ultrametric(m.tolist()))
        ref = squareform(cophenet(linkage(squareform(m), "single")))
        assert np.allclose(ours, ref)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(0, 4, allow_nan=False), min_size=1, max_size=28), st.integers(2, 8))
def test_ultrametric_tree_distances(values, k):
    m = np.zeros((k, k))
    iu = np.triu_indices(k, 1)
    m[iu] = np.resize(values, len(iu[0]))
    m = m + m.T
    labels = [f"l{i}" for i in range(k)]
    table = _table(labels, m)
    u = np.array(subdominant_ultrametric(table.cost))
    t = build_ultrametric_tree(table, CostModel(vertex_indel=float(u.max()) / 2 + 1))
    for i in range(k):
        for j in range(k):
            assert t.distance(i, j) == pytest.approx(u[i, j], abs=1e-12)
            assert u[i, j] <= m[i, j] + 1e-12
            for z in range(k):
                assert u[i, j] <= max(u[i, z], u[z, j]) + 1e-12
