"""Random labelled graphs for tests and benchmarks."""

from __future__ import annotations

import numpy as np

from .datasets import Dataset, dataset_from_graphs
from .graph import Graph

__all__ = ["random_graph", "perturb", "random_database", "clustered_database"]


def random_graph(rng: np.random.Generator, n: int, n_labels: int = 4,
                 extra_edges: float = 0.2, label_skew: float = 0.0) -> Graph:
    """Connected graph: a random recursive tree plus a fraction of extra edges.

    ``label_skew`` > 0 draws labels from a Zipf-like distribution.
    """
    if n <= 0:
        return Graph(())
    w = 1.0 / np.arange(1, n_labels + 1) ** label_skew
    labels = rng.choice(n_labels, size=n, p=w / w.sum())
    edges = set(zip(rng.integers(0, np.arange(1, n)).tolist(), range(1, n)))
    want = min(int(round(extra_edges * n)), n * (n - 1) // 2 - len(edges))
    for _ in range(20):
        if want <= 0:
            break
        a = rng.integers(0, n, 2 * want + 4)
        b = rng.integers(0, n, 2 * want + 4)
        for u, v in zip(np.minimum(a, b).tolist(), np.maximum(a, b).tolist()):
            if u != v and (u, v) not in edges:
                edges.add((u, v))
                want -= 1
                if not want:
                    break
    return Graph(tuple(int(x) for x in labels), tuple(sorted(edges)))


def perturb(rng: np.random.Generator, g: Graph, n_ops: int, n_labels: int = 4) -> Graph:
    """Apply ``n_ops`` random unit edit operations; the result is within ``n_ops`` of ``g``."""
    labels = list(g.labels)
    edges = set(g.edges)
    for _ in range(n_ops):
        op = rng.integers(0, 5)
        n = len(labels)
        if op == 0 and n:
            v = int(rng.integers(0, n))
            labels[v] = int((labels[v] + 1 + rng.integers(0, max(1, n_labels - 1))) % n_labels)
        elif op == 1 and n >= 2:
            a, b = sorted(int(x) for x in rng.choice(n, 2, replace=False))
            edges.symmetric_difference_update({(a, b)})
        elif op == 2 and edges:
            edges.discard(sorted(edges)[int(rng.integers(0, len(edges)))])
        elif op == 3:
            labels.append(int(rng.integers(0, n_labels)))
        elif n:
            # isolated vertices only, so a single deletion suffices
            iso = [v for v in range(n) if not any(v in e for e in edges)]
            if iso:
                v = iso[int(rng.integers(0, len(iso)))]
                labels.pop(v)
                edges = {(a - (a > v), b - (b > v)) for a, b in edges}
            else:
                labels.append(int(rng.integers(0, n_labels)))
    return Graph(tuple(labels), tuple(sorted(edges)))


def random_database(n_graphs: int, min_vertices: int = 1, max_vertices: int = 7,
                    n_labels: int = 4, extra_edges: float = 0.2, seed: int = 0,
                    label_skew: float = 0.0) -> Dataset:
    rng = np.random.default_rng(seed)
    sizes = rng.integers(min_vertices, max_vertices + 1, size=n_graphs)
    graphs = [random_graph(rng, int(s), n_labels, extra_edges, label_skew) for s in sizes]
    return dataset_from_graphs(graphs, name=f"random-{seed}")


def clustered_database(n_graphs: int, n_clusters: int = 10, vertices: int = 12,
                       max_ops: int = 4, n_labels: int = 6, seed: int = 0) -> Dataset:
    """Perturbed copies of a few seed graphs; gives queries near neighbours."""
    rng = np.random.default_rng(seed)
    seeds = [random_graph(rng, int(rng.integers(max(1, vertices // 2), vertices + 1)), n_labels)
             for _ in range(n_clusters)]
    graphs = [perturb(rng, seeds[i % n_clusters], int(rng.integers(0, max_ops + 1)), n_labels)
              for i in range(n_graphs)]
    return dataset_from_graphs(graphs, name=f"clustered-{seed}")
