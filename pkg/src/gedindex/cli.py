"""Command-line interface.

Output is tab-separated with a header row, or one JSON object per line with
``--json``. Every JSON object carries ``"schema"`` and ``"command"`` keys.

TSV columns
-----------
stats   dataset graphs avg_vertices avg_edges avg_degree std_degree labels
build   index graphs bound columns build_s
range   query radius id distance
knn     query k rank id distance
bounds  g h slf llb dlb clb branch_lb branch_ub exact
bench   radius mean_candidates mean_filter_ms mean_verify_ms mean_answers

Exit status: 0 success, 1 usage, 2 I/O, 3 invalid data, 4 cost model.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time

from . import __version__
from .bench import FILTERS, run_bench
from .bounds import BOUND_KINDS, bound_report
from .datasets import Dataset, load_dataset, read_edgelist
from .errors import CostModelError, GedIndexError
from .graph import CostModel, LabelCostTable
from .search import (
    SCHEMA_VERSION,
    build_index,
    knn_query,
    load_index,
    range_query,
    save_index,
)

EXIT_USAGE, EXIT_IO, EXIT_DATA, EXIT_COST = 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _radii(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError("radii must be comma-separated numbers") from None


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--dataset", help="dataset file or directory")
    shared.add_argument("--format", choices=("tud", "edgelist"), default="tud")
    shared.add_argument("--costs", default="1,1,1,1", help="cv,ce,cvl,cel (default 1,1,1,1)")
    shared.add_argument("--label-costs", help="CSV table of vertex relabel costs")
    shared.add_argument("--bound", choices=BOUND_KINDS, default="clb")
    shared.add_argument("--index", help="index file to write (build) or read")
    shared.add_argument("--json", action="store_true", help="emit JSON lines")
    shared.add_argument("--seed", type=int, default=0)
    shared.add_argument("--threads", type=int, default=os.cpu_count() or 1)

    p = _Parser(prog="gedindex", description=__doc__,
                formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("stats", parents=[shared], help="dataset statistics")
    sub.add_parser("build", parents=[shared], help="embed a dataset and write an index")

    def add_query(sp):
        sp.add_argument("--query", type=int, help="id of a database graph to use as query")
        sp.add_argument("--query-file", help="edge-list file; its first graph is the query")

    r = sub.add_parser("range", parents=[shared], help="range query")
    add_query(r)
    r.add_argument("--radius", type=float, required=True)
    r.add_argument("--verify", choices=("none", "exact"), default="exact")
    r.add_argument("--extra-filter", choices=("branch",))

    k = sub.add_parser("knn", parents=[shared], help="k-nearest-neighbour query")
    add_query(k)
    k.add_argument("--k", type=int, default=1)

    b = sub.add_parser("bounds", parents=[shared], help="all bounds for one pair")
    b.add_argument("--pair", type=int, nargs=2, required=True, metavar=("G", "H"))
    b.add_argument("--exact", action="store_true", help="also compute the exact distance")

    bb = sub.add_parser("bench", parents=[shared], help="range-query benchmark",
                        conflict_handler="resolve")
    bb.add_argument("--bound", choices=FILTERS, default="clb")
    bb.add_argument("--queries", type=int, default=50)
    bb.add_argument("--radii", type=_radii, default=[1, 2, 3, 4, 5])
    bb.add_argument("--verify", choices=("none", "exact"), default="none")
    return p


# -- helpers ------------------------------------------------------------------------


def _emit(args, command: str, tsv_header: tuple, rows: list[tuple], obj: dict | None = None):
    if args.json:
        payload = {"schema": SCHEMA_VERSION, "command": command}
        payload.update(obj if obj is not None else {})
        print(json.dumps(payload))
        return
    print("\t".join(tsv_header))
    for row in rows:
        print("\t".join(_fmt(x) for x in row))


def _fmt(x) -> str:
    if x is None:
        return "-"
    if isinstance(x, float):
        return "inf" if math.isinf(x) else f"{x:.6g}"
    return str(x)


def _costs(args) -> CostModel:
    table = LabelCostTable.read_csv(args.label_costs) if args.label_costs else None
    try:
        return CostModel.parse(args.costs, table)
    except ValueError as exc:
        raise CostModelError(str(exc)) from None


def _dataset(args) -> Dataset:
    if not args.dataset:
        raise UsageError("--dataset is required")
    return load_dataset(args.dataset, args.format)


def _index(args):
    """Load ``--index`` when given, otherwise build from ``--dataset``."""
    if args.index and os.path.exists(args.index) and args.command != "build":
        return load_index(args.index, threads=args.threads)
    if args.index and not args.dataset:
        raise FileNotFoundError(args.index)
    ds = _dataset(args)
    return build_index(ds, _costs(args), args.bound, ds.labels, threads=args.threads)


def _query(args, idx):
    if (args.query is None) == (args.query_file is None):
        raise UsageError("give exactly one of --query and --query-file")
    if args.query is not None:
        if not 0 <= args.query < len(idx):
            raise UsageError(f"--query {args.query} is not a database id (0..{len(idx) - 1})")
        return args.query, idx.graphs[args.query]
    ds = read_edgelist(args.query_file, labels=idx.symbols.copy())
    if not len(ds):
        raise UsageError(f"{args.query_file} contains no graph")
    return args.query_file, ds[0]


# -- commands -----------------------------------------------------------------------


def cmd_stats(args):
    ds = _dataset(args)
    s = ds.stats()
    cols = ("graphs", "avg_vertices", "avg_edges", "avg_degree", "std_degree", "labels")
    _emit(args, "stats", ("dataset",) + cols, [(ds.name,) + tuple(s[c] for c in cols)],
          {"dataset": ds.name, **s})


def cmd_build(args):
    if not args.index:
        raise UsageError("--index is required")
    t0 = time.perf_counter()
    idx = _index(args)
    elapsed = time.perf_counter() - t0
    save_index(idx, args.index)
    row = (args.index, len(idx), idx.bound, idx.X.shape[1], elapsed)
    _emit(args, "build", ("index", "graphs", "bound", "columns", "build_s"), [row],
          dict(zip(("index", "graphs", "bound", "columns", "build_s"), row)))


def cmd_range(args):
    if args.radius < 0:
        raise UsageError("--radius must be non-negative")
    idx = _index(args)
    qid, q = _query(args, idx)
    res = range_query(idx, q, args.radius, args.verify, args.extra_filter)
    rows = [(qid, args.radius, i, d) for i, d in res.answers]
    _emit(args, "range", ("query", "radius", "id", "distance"), rows, {
        "query": qid, "radius": args.radius, "verified": res.verified,
        "answers": [[i, d] for i, d in res.answers], "upper_bounded": sorted(res.upper_bounded),
        "candidates": res.candidates, "exact_computations": res.exact_computations,
        "filter_time": res.filter_time, "verify_time": res.verify_time,
    })


def cmd_knn(args):
    if args.k < 1:
        raise UsageError("--k must be at least 1")
    idx = _index(args)
    qid, q = _query(args, idx)
    res = knn_query(idx, q, args.k)
    rows = [(qid, args.k, rank, i, d) for rank, (i, d) in enumerate(res.answers, 1)]
    _emit(args, "knn", ("query", "k", "rank", "id", "distance"), rows, {
        "query": qid, "k": args.k, "answers": [[i, d] for i, d in res.answers],
        "exact_computations": res.exact_computations,
        "filter_time": res.filter_time, "verify_time": res.verify_time,
    })


def cmd_bounds(args):
    ds = _dataset(args)
    gi, hi = args.pair
    for i in (gi, hi):
        if not 0 <= i < len(ds):
            raise UsageError(f"graph id {i} out of range (0..{len(ds) - 1})")
    rep = bound_report(ds[gi], ds[hi], _costs(args), ds.labels, exact=args.exact)
    cols = ("slf", "llb", "dlb", "clb", "branch_lb", "branch_ub", "exact")
    _emit(args, "bounds", ("g", "h") + cols, [(gi, hi) + tuple(getattr(rep, c) for c in cols)],
          {"g": gi, "h": hi, **{c: getattr(rep, c) for c in cols}})


def cmd_bench(args):
    ds = _dataset(args)
    rep = run_bench(ds, _costs(args), args.bound, args.radii, args.queries, args.verify,
                    args.seed, ds.labels, ds.name, args.threads)
    print(rep.to_json() if args.json else rep.to_tsv())


COMMANDS = {"stats": cmd_stats, "build": cmd_build, "range": cmd_range, "knn": cmd_knn,
            "bounds": cmd_bounds, "bench": cmd_bench}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.threads < 1:
        print("gedindex: error: --threads must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"gedindex: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CostModelError as exc:
        print(f"gedindex: cost model error: {exc}", file=sys.stderr)
        return EXIT_COST
    except (GedIndexError, ValueError) as exc:
        print(f"gedindex: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        detail = str(exc) if exc.strerror else f"cannot read {exc}"
        print(f"gedindex: I/O error: {detail}", file=sys.stderr)
        return EXIT_IO
    return 0


if __name__ == "__main__":
    sys.exit(main())
