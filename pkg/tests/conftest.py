import numpy as np
import pytest
from hypothesis import strategies as st

from gedindex.graph import Graph
from gedindex.treemetric import DUMMY, MetricTree

ACCEPTANCE = {}


def random_graph(rng, max_vertices=7, n_labels=3, p_edge=0.4, min_vertices=0):
    n = int(rng.integers(min_vertices, max_vertices + 1))
    labels = tuple(int(x) for x in rng.integers(0, n_labels, n))
    edges = tuple((u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p_edge)
    return Graph(labels, edges)


@st.composite
def graphs(draw, max_vertices=5, n_labels=3):
    n = draw(st.integers(0, max_vertices))
    labels = tuple(draw(st.lists(st.integers(0, n_labels - 1), min_size=n, max_size=n)))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Graph(labels, tuple(p for p, keep in zip(pairs, mask) if keep))


def random_tree_instance(rng, max_nodes=10, max_elements=12, integer=True, equal=True):
    """Random tree (root 0) with elements anchored at nodes, plus two multisets."""
    n = int(rng.integers(1, max_nodes + 1))
    parent = [-1] + [int(rng.integers(0, v)) for v in range(1, n)]
    if integer:
        weight = [0.0] + [float(x) for x in rng.integers(0, 3, n - 1)]
    else:
        weight = [0.0] + [float(x) for x in rng.uniform(0, 2, n - 1)]
    anchors = {i: i for i in range(n)}
    anchors[DUMMY] = 0
    t = MetricTree(tuple(parent), tuple(weight), anchors)
    k = int(rng.integers(0, max_elements + 1))
    A = [int(x) for x in rng.integers(0, n, k)]
    B = [int(x) for x in rng.integers(0, n, k if equal else int(rng.integers(0, max_elements + 1)))]
    return t, A, B


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def path_graph(labels):
    return Graph(tuple(labels), tuple((i, i + 1) for i in range(len(labels) - 1)))


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): acceptance criterion")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    number = getattr(report, "acceptance", None)
    if number is not None:
        ACCEPTANCE[number] = (report.outcome, report.acceptance_title)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is not None:
        rep.acceptance, rep.acceptance_title = mark.args


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        outcome, title = ACCEPTANCE[number]
        status = {"passed": "PASS", "failed": "FAIL"}.get(outcome, outcome.upper())
        terminalreporter.write_line(f"criterion {number:>2}: {status}  {title}")
