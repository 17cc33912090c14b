"""Cover tree over dense rows under the ℓ1 distance.

Every stored point is exactly one node. A node at level ``i`` has all of its
children within ``base**i`` and its children are pairwise farther apart than
``base**(i-1)``. Points at distance zero from their parent are attached as
leaves directly below it. Each node also records the largest distance to any
of its descendants, which is what queries prune with.

The tree is stored in flat arrays (parent, level, max descendant distance and
a CSR child list) that reference rows of the point matrix by index.
"""

from __future__ import annotations

import heapq
import math
from typing import Iterator

import numpy as np

__all__ = ["CoverTree", "l1_rows"]

_LEAF_LEVEL = -(2**31)


def l1_rows(X: np.ndarray, rows, q: np.ndarray) -> np.ndarray:
    """ℓ1 distance from ``q`` to ``X[rows]``."""
    return np.abs(X[rows] - q).sum(axis=1)


class CoverTree:
    """Batch-built cover tree.

    Parameters
    ----------
    X : ndarray, shape (n, d)
        Points, one per row. Not copied.
    base : float
        Expansion base (> 1).
    """

    def __init__(self, X: np.ndarray, base: float = 2.0):
        if base <= 1:
            raise ValueError("base must be greater than 1")
        X = np.asarray(X, dtype=float)
        if X.ndim != 2:
            raise ValueError("X must be two-dimensional")
        self.X = X
        self.base = float(base)
        n = X.shape[0]
        self.n = n
        self.parent = np.full(n, -1, dtype=np.intp)
        self.level = np.full(n, _LEAF_LEVEL, dtype=np.int64)
        self.maxdist = np.zeros(n)
        self.root = 0 if n else -1
        if n:
            self._build()
        counts = np.bincount(self.parent[self.parent >= 0], minlength=n)
        self.child_ptr = np.zeros(n + 1, dtype=np.intp)
        np.cumsum(counts, out=self.child_ptr[1:])
        order = np.argsort(self.parent, kind="stable")
        self.child_idx = order[n - int(counts.sum()):] if n else order
        self.child_idx = np.ascontiguousarray(self.child_idx)

    def _level_for(self, dist: float) -> int:
        i = math.ceil(math.log(dist, self.base))
        while self.base**i < dist:
            i += 1
        while self.base ** (i - 1) >= dist:
            i -= 1
        return i

    def _build(self):
        X = self.X
        stack = [(0, np.arange(1, self.n, dtype=np.intp), None)]
        stack[0] = (0, stack[0][1], l1_rows(X, stack[0][1], X[0]))
        while stack:
            p, S, D = stack.pop()
            if len(S) == 0:
                continue
            far = float(D.max())
            self.maxdist[p] = far
            if far == 0.0:
                self.parent[S] = p
                continue
            i = self._level_for(far)
            self.level[p] = i
            sep = self.base ** (i - 1)
            R = S
            while len(R):
                c = R[0]
                dc = l1_rows(X, R, X[c])
                near = dc <= sep
                near[0] = False
                self.parent[c] = p
                stack.append((c, R[near], dc[near]))
                near[0] = True
                R = R[~near]

    # -- queries ---------------------------------------------------------------

    def children(self, node: int) -> np.ndarray:
        return self.child_idx[self.child_ptr[node] : self.child_ptr[node + 1]]

    def _gather_children(self, nodes: np.ndarray) -> np.ndarray:
        starts = self.child_ptr[nodes]
        counts = self.child_ptr[nodes + 1] - starts
        total = int(counts.sum())
        if total == 0:
            return np.empty(0, dtype=np.intp)
        offsets = np.repeat(starts - np.cumsum(counts) + counts, counts)
        return self.child_idx[offsets + np.arange(total)]

    def range_search(self, q: np.ndarray, r: float) -> tuple[np.ndarray, np.ndarray]:
        """Indices (ascending) and distances of all points within ``r`` of ``q``."""
        if self.n == 0 or r < 0:
            return np.empty(0, dtype=np.intp), np.empty(0)
        q = np.asarray(q, dtype=float)
        slack = 1e-9 * (1.0 + abs(r))
        frontier = np.array([self.root], dtype=np.intp)
        hits, hit_d = [], []
        while len(frontier):
            d = l1_rows(self.X, frontier, q)
            inside = d <= r
            hits.append(frontier[inside])
            hit_d.append(d[inside])
            open_ = d <= r + self.maxdist[frontier] + slack
            frontier = self._gather_children(frontier[open_])
        idx = np.concatenate(hits)
        dist = np.concatenate(hit_d)
        order = np.argsort(idx, kind="stable")
        return idx[order], dist[order]

    def ranked(self, q: np.ndarray) -> Iterator[tuple[float, int]]:
        """Yield ``(distance, index)`` for every point in ascending order.

        Best-first traversal; ties come out by ascending index. Subtrees are
        keyed by a lower bound on their members' distances, and are expanded
        before points with an equal key so no smaller index is overtaken.
        """
        if self.n == 0:
            return
        q = np.asarray(q, dtype=float)
        X, maxdist = self.X, self.maxdist
        d0 = float(l1_rows(X, [self.root], q)[0])
        # entries: (key, 0, node, distance of node point) for subtrees,
        #          (key, 1, point, 0.0) for points ready to be emitted
        heap = [(max(0.0, d0 - maxdist[self.root]) - 1e-9, 0, self.root, d0)]
        while heap:
            key, kind, idx, d = heapq.heappop(heap)
            if kind == 1:
                yield key, idx
                continue
            heapq.heappush(heap, (d, 1, idx, 0.0))
            kids = self.children(idx)
            if len(kids) == 0:
                continue
            dk = l1_rows(X, kids, q)
            lb = dk - maxdist[kids]
            leaf = self.child_ptr[kids + 1] == self.child_ptr[kids]
            for child, dc, b, is_leaf in zip(kids.tolist(), dk.tolist(), lb.tolist(),
                                             leaf.tolist()):
                if is_leaf:
                    heapq.heappush(heap, (dc, 1, child, 0.0))
                else:
                    heapq.heappush(heap, (max(0.0, b) - 1e-9, 0, child, dc))

    def linear_range(self, q: np.ndarray, r: float) -> tuple[np.ndarray, np.ndarray]:
        d = l1_rows(self.X, np.arange(self.n), np.asarray(q, dtype=float))
        idx = np.flatnonzero(d <= r)
        return idx, d[idx]

    # -- diagnostics -------------------------------------------------------------

    def check_invariants(self) -> None:
        """Raise ``AssertionError`` if covering, separation or bookkeeping fails."""
        X = self.X
        seen = np.zeros(self.n, dtype=int)
        stack = [self.root] if self.n else []
        while stack:
            p = stack.pop()
            seen[p] += 1
            kids = self.children(p)
            stack.extend(kids.tolist())
            if len(kids) == 0:
                continue
            d = l1_rows(X, kids, X[p])
            if self.level[p] == _LEAF_LEVEL:
                assert np.all(d == 0), "zero-level children must coincide with parent"
                continue
            cover = self.base ** int(self.level[p])
            assert np.all(d <= cover), f"covering violated below node {p}"
            sep = self.base ** (int(self.level[p]) - 1)
            for a in range(len(kids)):
                da = l1_rows(X, kids[a + 1 :], X[kids[a]])
                assert np.all(da > sep), f"separation violated below node {p}"
            desc = self._descendants(p)
            far = l1_rows(X, desc, X[p]).max()
            assert abs(far - self.maxdist[p]) <= 1e-9 * (1 + far), "stale maxdist"
        assert np.all(seen == 1), "every point must appear exactly once"

    def _descendants(self, p: int) -> np.ndarray:
        out, stack = [], list(self.children(p).tolist())
        while stack:
            v = stack.pop()
            out.append(v)
            stack.extend(self.children(v).tolist())
        return np.asarray(out, dtype=np.intp)
