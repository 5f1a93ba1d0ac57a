"""Heuristic search for long simple paths in weighted digraphs."""

from .dfs import DepthFirstSearch, Path, SearchBudget, choose_starts, dfs_search, next_path
from .generate import generate_planted, random_digraph
from .graph import (
    Digraph,
    GraphFormatError,
    SccInfo,
    analyze,
    compute_ranks,
    format_edge_list,
    parse_edge_list,
    read_edge_list,
    strongly_connected_components,
    weakly_connected_components,
    write_edge_list,
)
from .opening import (
    OpenedOrder,
    PathImprover,
    heuristic_refine,
    improve_path,
    open_edge,
    open_end,
    reverse_block,
)
from .oracle import brute_force_lsp
from .pto import PseudoTopoOrder, impose, is_strong_pto, lsp_dag, random_pto, recompute_from
from .scoring import ScoreTable, order_neighbors, path_weight_sums, vertex_scores
from .solver import Instance, SolveReport, SolverConfig, preprocess, solve

__version__ = "0.1.0"
