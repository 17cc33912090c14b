"""Exact graph similarity search under the graph edit distance.

Graphs are filtered with assignment-based lower bounds whose ground costs are
tree metrics, so each bound is an ℓ1 distance between per-graph embeddings and
can be indexed. Survivors are verified with an exact edit distance solver.
"""

__version__ = "0.1.0"

from .bounds import (
    BOUND_KINDS,
    BoundReport,
    GraphEmbedder,
    bound_report,
    branch_lb,
    branch_ub,
    clb,
    dlb,
    llb,
    slf,
)
from .datasets import Dataset, load_dataset, read_edgelist, write_dataset
from .errors import (
    CorruptIndex,
    CostModelError,
    DeletionTooCheap,
    GedIndexError,
    IndexVersionError,
    InstanceTooLarge,
    ParseError,
    RelabelTooExpensive,
    SizeCapExceeded,
    TreeMismatch,
    UnanchoredVertex,
)
from .exact import GedResult, apply_edit_path, brute_force_ged, edit_path, exact_ged
from .graph import UNIFORM, CostModel, Graph, LabelCostTable, SymbolTable
from .search import (
    QueryResult,
    SearchIndex,
    build_index,
    incremental_ranking,
    knn_query,
    load_index,
    range_query,
    save_index,
)

__all__ = [
    "BOUND_KINDS", "BoundReport", "GraphEmbedder", "bound_report", "branch_lb", "branch_ub",
    "clb", "dlb", "llb", "slf",
    "Dataset", "load_dataset", "read_edgelist", "write_dataset",
    "CorruptIndex", "CostModelError", "DeletionTooCheap", "GedIndexError", "IndexVersionError",
    "InstanceTooLarge", "ParseError", "RelabelTooExpensive", "SizeCapExceeded", "TreeMismatch",
    "UnanchoredVertex",
    "GedResult", "apply_edit_path", "brute_force_ged", "edit_path", "exact_ged",
    "UNIFORM", "CostModel", "Graph", "LabelCostTable", "SymbolTable",
    "QueryResult", "SearchIndex", "build_index", "incremental_ranking", "knn_query",
    "load_index", "range_query", "save_index",
]
