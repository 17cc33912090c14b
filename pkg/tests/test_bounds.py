import json

import numpy as np
import pytest
from conftest import path_graph, random_graph

from gedindex.bounds import (
    GraphEmbedder,
    bound_report,
    branch_cost_matrix,
    branch_lb,
    branch_matching,
    branch_ub,
    clb,
    dlb,
    llb,
    slf,
)
from gedindex.errors import InstanceTooLarge, UnanchoredVertex
from gedindex.exact import brute_force_ged
from gedindex.graph import CostModel, Graph, LabelCostTable, SymbolTable

A, B, C = 0, 1, 2


def figure_graphs():
    # G: triangle 1-2-3 with pendant 0 on vertex 3; H: four-cycle
    g = Graph((A, B, C, C), [(0, 3), (1, 2), (1, 3), (2, 3)])
    h = Graph((A, B, B, C), [(0, 1), (1, 2), (2, 3), (0, 3)])
    return g, h


def test_figure_graph_degrees():
    g, h = figure_graphs()
    assert sorted(g.degrees()) == [1, 2, 2, 3]
    assert h.degrees() == [2, 2, 2, 2]


@pytest.mark.parametrize("cv, ce, cvl", [(1, 1, 1), (2, 3, 1.5), (1, 0.5, 2)])
def test_figure_bounds(cv, ce, cvl):
    g, h = figure_graphs()
    c = CostModel(cv, ce, cvl)
    emb = GraphEmbedder.for_graphs([g, h], c)
    w1, w2 = cv - cvl / 2, cvl / 2
    lg, lh = emb.label_vector(g), emb.label_vector(h)
    assert lg.entries.get(1, 0.0) == 4 * w1 and lh.entries.get(1, 0.0) == 4 * w1
    assert [lg.entries[k] for k in (2, 3, 4)] == [w2, w2, 2 * w2]
    assert [lh.entries[k] for k in (2, 3, 4)] == [w2, 2 * w2, w2]
    wd = ce / 2
    dg, dh = emb.degree_vector(g), emb.degree_vector(h)
    assert [dg.entries.get(k, 0.0) for k in (1, 2, 3)] == [4 * wd, 3 * wd, wd]
    assert [dh.entries.get(k, 0.0) for k in (1, 2, 3)] == [4 * wd, 4 * wd, 0.0]
    assert llb(g, h, c) == cvl
    assert dlb(g, h, c) == ce
    assert clb(g, h, c) == cvl + ce


def test_slf_examples():
    g = path_graph([A, B, A])
    h = path_graph([A, B])
    assert slf(g, h) == 2
    assert slf(g, g) == 0
    k4 = Graph((A,) * 4, [(i, j) for i in range(4) for j in range(i + 1, 4)])
    p4 = path_graph([A] * 4)
    assert slf(k4, p4) == 3


def test_dlb_path_vs_edge():
    assert dlb(path_graph([A, A, A]), path_graph([A, A])) == 1


def test_p3_p2_report():
    g, h = path_graph([A, B, A]), path_graph([A, B])
    rep = bound_report(g, h, exact=True)
    assert rep.exact == 2 and brute_force_ged(g, h) == 2
    assert rep.slf <= rep.clb <= rep.branch_lb <= 2 <= rep.branch_ub
    assert rep.chain_holds()
    assert json.loads(rep.to_json())["exact"] == 2


def test_identical_graphs_are_zero(rng):
    for _ in range(20):
        g = random_graph(rng)
        assert clb(g, g) == 0 and branch_lb(g, g) == 0 and branch_ub(g, g) == 0


def test_random_chain(rng):
    for _ in range(150):
        g, h = random_graph(rng, 6), random_graph(rng, 6)
        rep = bound_report(g, h)
        d = brute_force_ged(g, h)
        assert rep.slf <= rep.clb + 1e-9
        assert rep.clb <= rep.branch_lb + 1e-9
        assert rep.branch_lb <= d + 1e-9 <= rep.branch_ub + 2e-9


def test_branch_strictly_beats_clb(rng):
    # the summed ground cost is not a tree metric, so a gap must show up
    for _ in range(500):
        g, h = random_graph(rng, 6), random_graph(rng, 6)
        if branch_lb(g, h) > clb(g, h) + 1e-9:
            return
    pytest.fail("no pair with branch_lb > clb found")


def test_branch_matrix_shape_and_limit():
    g, h = path_graph([A, B, A]), path_graph([A, B])
    m = branch_cost_matrix(g, h)
    assert m.shape == (5, 5)
    assert np.all(m[3:, 2:] == 0)
    assert m[1, 2] == 1 + 0.5 * 2  # deletion of the middle vertex
    big = Graph((0,) * 2100)
    with pytest.raises(InstanceTooLarge):
        branch_cost_matrix(big, big)


def test_branch_matching_mapping():
    g, h = path_graph([A, B, A]), path_graph([A, B])
    cost, mapping = branch_matching(g, h)
    assert len(mapping) == 3 and mapping.count(None) == 1
    assert sorted(j for j in mapping if j is not None) == [0, 1]
    assert cost == branch_lb(g, h)


def test_non_uniform_llb_sound(rng):
    labels = ["x", "y", "z"]
    st = SymbolTable(labels)
    for _ in range(40):
        m = np.triu(rng.uniform(0, 2, (3, 3)), 1)
        table = LabelCostTable(tuple(labels), tuple(map(tuple, m + m.T)))
        c = CostModel(vertex_indel=1.5, label_costs=table)
        g, h = random_graph(rng, 5), random_graph(rng, 5)
        assert llb(g, h, c, st) <= brute_force_ged(g, h, c, st) + 1e-9
        assert branch_lb(g, h, c, st) <= brute_force_ged(g, h, c, st) + 1e-9


def test_unknown_label_with_table():
    table = LabelCostTable(("x", "y"), ((0, 1), (1, 0)))
    st = SymbolTable(["x", "y", "w"])
    c = CostModel(label_costs=table)
    with pytest.raises(UnanchoredVertex):
        llb(Graph((2,)), Graph((0,)), c, st)


def test_embedder_kinds():
    g, h = figure_graphs()
    emb = GraphEmbedder.for_graphs([g, h])
    assert len(emb.embed(g, "clb").parts) == 2
    with pytest.raises(ValueError):
        emb.embed(g, "xlb")


def test_clb_much_faster_than_branch():
    import timeit

    from gedindex.synth import random_graph as synth_graph

    rng = np.random.default_rng(8)
    pairs = [(synth_graph(rng, 30, 10), synth_graph(rng, 30, 10)) for _ in range(20)]
    emb = GraphEmbedder.for_graphs([x for p in pairs for x in p])

    def run_clb():
        for g, h in pairs:
            emb.bound(g, h, "clb")

    def run_branch():
        for g, h in pairs:
            branch_lb(g, h)

    fast = min(timeit.repeat(run_clb, number=3, repeat=3))
    slow = min(timeit.repeat(run_branch, number=1, repeat=3)) * 3
    assert slow / fast >= 50, f"speedup only {slow / fast:.1f}x"
