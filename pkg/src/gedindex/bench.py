"""Benchmark harness: average candidates, answers and timings per radius."""

from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .bounds import slf
from .graph import CostModel, Graph
from .search import SCHEMA_VERSION, SearchIndex, build_index, range_query

__all__ = ["BenchRow", "BenchReport", "run_bench", "sample_queries"]

FILTERS = ("llb", "dlb", "clb", "slf")


@dataclass
class BenchRow:
    radius: float
    mean_candidates: float
    mean_filter_time: float
    mean_verify_time: float
    mean_answers: float | None


@dataclass
class BenchReport:
    dataset: str
    bound: str
    costs: tuple
    seed: int
    queries: list[int]
    build_time: float
    verify: str
    rows: list[BenchRow] = field(default_factory=list)

    TSV_COLUMNS = ("radius", "mean_candidates", "mean_filter_ms", "mean_verify_ms", "mean_answers")

    def to_tsv(self) -> str:
        head = (f"# dataset={self.dataset} bound={self.bound} costs={','.join(map(str, self.costs))} "
                f"seed={self.seed} queries={len(self.queries)} build_s={self.build_time:.3f}")
        lines = [head, "\t".join(self.TSV_COLUMNS)]
        for r in self.rows:
            ans = "-" if r.mean_answers is None else f"{r.mean_answers:.3f}"
            lines.append(f"{r.radius:g}\t{r.mean_candidates:.3f}\t{1e3 * r.mean_filter_time:.4f}"
                         f"\t{1e3 * r.mean_verify_time:.4f}\t{ans}")
        return "\n".join(lines)

    def to_json(self) -> str:
        d = asdict(self)
        d["schema"] = SCHEMA_VERSION
        d["command"] = "bench"
        return json.dumps(d)


def sample_queries(n: int, count: int, seed: int) -> list[int]:
    """Query ids drawn from the database without replacement, sorted."""
    rng = np.random.default_rng(seed)
    count = min(count, n)
    return sorted(int(i) for i in rng.choice(n, size=count, replace=False)) if count else []


def _slf_filter(idx: SearchIndex, q: Graph, r: float):
    t0 = time.perf_counter()
    ids = [i for i, g in enumerate(idx.graphs) if slf(g, q) <= r + 1e-9]
    return ids, time.perf_counter() - t0


def run_bench(graphs: Sequence[Graph], costs: CostModel, bound: str, radii: Sequence[float],
              n_queries: int = 50, verify: str = "none", seed: int = 0, symbols=None,
              dataset_name: str = "", threads: int = 1) -> BenchReport:
    """Range queries from sampled database graphs, averaged per radius.

    ``bound="slf"`` filters by a linear scan with the simple label filter and
    needs unit costs; the other bounds use the cover-tree index.
    """
    if bound not in FILTERS:
        raise ValueError(f"bound must be one of {FILTERS}")
    if bound == "slf" and costs.as_tuple() != (1.0, 1.0, 1.0, 1.0):
        raise ValueError("the simple label filter is defined for unit costs only")
    t0 = time.perf_counter()
    idx = build_index(graphs, costs, "clb" if bound == "slf" else bound, symbols, threads=threads)
    build_time = time.perf_counter() - t0
    qids = sample_queries(len(idx), n_queries, seed)
    report = BenchReport(dataset_name, bound, costs.as_tuple(), seed, qids, build_time, verify)
    for r in radii:
        cand = filt = ver = 0.0
        answers = 0
        for qi in qids:
            q = idx.graphs[qi]
            if bound == "slf":
                ids, ft = _slf_filter(idx, q, r)
                cand += len(ids)
                filt += ft
                if verify == "exact":
                    t1 = time.perf_counter()
                    answers += sum(idx.exact(i, q, r) <= r + 1e-9 for i in ids)
                    ver += time.perf_counter() - t1
            else:
                res = range_query(idx, q, r, verify)
                cand += res.candidates
                filt += res.filter_time
                ver += res.verify_time
                answers += len(res.answers)
        m = max(len(qids), 1)
        report.rows.append(BenchRow(float(r), cand / m, filt / m, ver / m,
                                    answers / m if verify == "exact" else None))
    return report
