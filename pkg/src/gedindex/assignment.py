"""Assignment problem solvers.

``hungarian`` is a general O(n^3) solver used as a reference oracle and to
compute the Branch bounds. ``solve_tree_metric`` answers the same question in
linear time when the ground cost is a tree metric.
"""

from __future__ import annotations

from typing import Hashable, Iterable

import numpy as np

from .embedding import compute_vector, l1_distance
from .treemetric import MetricTree

__all__ = ["hungarian", "assignment_cost", "padded_instance", "solve_tree_metric"]

MAX_DENSE = 4096


def hungarian(cost) -> tuple[float, list[int]]:
    """Minimum-cost perfect matching on a square cost matrix.

    Returns ``(cost, col_of_row)``. Shortest augmenting paths with row/column
    potentials; rows are inserted in index order and ``argmin`` picks the
    lowest column on ties, which makes the result deterministic.
    """
    c = np.asarray(cost, dtype=float)
    if c.ndim != 2 or c.shape[0] != c.shape[1]:
        raise ValueError("cost matrix must be square")
    n = c.shape[0]
    if n == 0:
        return 0.0, []
    if not np.isfinite(c).all():
        raise ValueError("cost matrix must be finite")
    INF = np.inf
    u = np.zeros(n + 1)
    v = np.zeros(n + 1)
    p = np.zeros(n + 1, dtype=np.intp)  # p[j]: row matched to column j (1-based, 0 = free)
    way = np.zeros(n + 1, dtype=np.intp)
    # 1-based padded copy avoids index arithmetic in the inner loop
    a = np.zeros((n + 1, n + 1))
    a[1:, 1:] = c
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = np.full(n + 1, INF)
        used = np.zeros(n + 1, dtype=bool)
        while True:
            used[j0] = True
            i0 = p[j0]
            free = ~used
            free[0] = False
            cur = a[i0] - u[i0] - v
            better = free & (cur < minv)
            minv[better] = cur[better]
            way[better] = j0
            masked = np.where(free, minv, INF)
            j1 = int(np.argmin(masked))
            delta = masked[j1]
            u[p[used]] += delta
            v[used] -= delta
            minv[free] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
    col_of_row = [0] * n
    for j in range(1, n + 1):
        col_of_row[p[j] - 1] = j - 1
    total = float(sum(c[i, col_of_row[i]] for i in range(n)))
    return total, col_of_row


def assignment_cost(cost, matching) -> float:
    c = np.asarray(cost, dtype=float)
    return float(sum(c[i, j] for i, j in enumerate(matching)))


def padded_instance(left: list, right: list, ground, dummy=None) -> np.ndarray:
    """Dense ``(n+m) x (n+m)`` matrix with ``m`` dummies added left and ``n`` right.

    ``ground(x, y)`` is evaluated with ``dummy`` standing for padding elements.
    """
    n, m = len(left), len(right)
    size = n + m
    if size > MAX_DENSE:
        raise ValueError(f"padded instance of size {size} exceeds {MAX_DENSE}")
    rows = list(left) + [dummy] * m
    cols = list(right) + [dummy] * n
    out = np.empty((size, size))
    for i, x in enumerate(rows):
        for j, y in enumerate(cols):
            out[i, j] = ground(x, y)
    return out


def solve_tree_metric(left: Iterable[Hashable], right: Iterable[Hashable], t: MetricTree) -> float:
    """Optimal assignment cost under the tree metric of ``t``.

    Padding is implicit: dummies sit at the root and never enter a vector.
    """
    return l1_distance(compute_vector(left, t), compute_vector(right, t))
