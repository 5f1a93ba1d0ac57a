"""Vertex scores from short-walk weight sums, and neighbor exploration order."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .graph import Digraph, SccInfo


@dataclass(frozen=True, eq=False)
class ScoreTable:
    k: int
    coeffs: tuple[float, ...]
    a_out: np.ndarray  # shape (k + 1, n); row i sums the weights of all length-i walks
    a_in: np.ndarray
    score_out: np.ndarray
    score_in: np.ndarray


def _walk_sums(n: int, src: np.ndarray, dst: np.ndarray, wts: np.ndarray, k: int) -> np.ndarray:
    # a[i][v]: total weight of length-i walks leaving v; cnt[i][v]: their number.
    a = np.zeros((k + 1, n))
    cnt = np.ones(n)
    for i in range(1, k + 1):
        a[i] = np.bincount(src, weights=wts * cnt[dst] + a[i - 1][dst], minlength=n)
        cnt = np.bincount(src, weights=cnt[dst], minlength=n)
    return a


def path_weight_sums(graph: Digraph, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Tables ``A_out[i][v]`` and ``A_in[i][v]`` for ``i = 0..k``.

    ``A_out[i][v]`` is the summed weight of every length-``i`` walk starting
    at ``v`` (row 0 is all zeros); ``A_in`` is the same over walks ending at
    ``v``.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    src, dst, wts = graph.edge_arrays
    return _walk_sums(graph.n, src, dst, wts, k), _walk_sums(graph.n, dst, src, wts, k)


def vertex_scores(
    tables: tuple[np.ndarray, np.ndarray], coeffs: Sequence[float]
) -> ScoreTable:
    a_out, a_in = tables
    k = a_out.shape[0] - 1
    coeffs = tuple(float(c) for c in coeffs)
    if len(coeffs) != k:
        raise ValueError(f"need {k} coefficients, got {len(coeffs)}")
    if any(c <= 0 for c in coeffs):
        raise ValueError("score coefficients must be positive")
    c = np.asarray(coeffs)
    return ScoreTable(k, coeffs, a_out, a_in, c @ a_out[1:], c @ a_in[1:])


def exploration_priority(
    out_deg: np.ndarray,
    in_deg: np.ndarray,
    rank: np.ndarray,
    score: np.ndarray,
    low_indegree_threshold: int,
) -> np.ndarray:
    """Priority position of every vertex when it appears as a forward neighbor.

    Sinks go last, vertices with at most ``low_indegree_threshold`` incoming
    edges go first, the rest by descending rank then ascending score; vertex
    id breaks remaining ties.
    """
    n = len(out_deg)
    ids = np.arange(n)
    order = np.lexsort(
        (ids, score, -rank, in_deg > low_indegree_threshold, out_deg == 0)
    )
    prio = np.empty(n, dtype=np.int64)
    prio[order] = ids
    return prio


def _sorted_adjacency(
    n: int, src: np.ndarray, dst: np.ndarray, wts: np.ndarray, prio: np.ndarray
):
    # one integer key (src, priority) sorts faster than a two-key lexsort
    perm = np.argsort(src * n + prio[dst], kind="stable")
    d, w = dst[perm], wts[perm]
    indptr = np.zeros(n + 1, dtype=np.int64)
    indptr[1:] = np.cumsum(np.bincount(src, minlength=n))
    pairs = list(zip(d.tolist(), w.tolist()))
    cuts = indptr.tolist()
    adj = tuple(tuple(pairs[a:b]) for a, b in zip(cuts[:-1], cuts[1:]))
    return adj, (indptr, d, w)


def order_neighbors(
    graph: Digraph,
    scores: ScoreTable,
    info: SccInfo,
    low_indegree_threshold: int = 1,
) -> Digraph:
    """Return ``graph`` with both adjacency directions sorted for heuristic DFS."""
    n = graph.n
    src, dst, wts = graph.edge_arrays
    out_deg = np.bincount(src, minlength=n)
    in_deg = np.bincount(dst, minlength=n)
    out_rank = np.asarray(info.out_rank, dtype=np.int64)
    in_rank = np.asarray(info.in_rank, dtype=np.int64)
    fwd = exploration_priority(out_deg, in_deg, out_rank, scores.score_out, low_indegree_threshold)
    bwd = exploration_priority(in_deg, out_deg, in_rank, scores.score_in, low_indegree_threshold)
    out_adj, out_csr = _sorted_adjacency(n, src, dst, wts, fwd)
    in_adj, in_csr = _sorted_adjacency(n, dst, src, wts, bwd)
    sorted_graph = graph.with_adjacency(out_adj, in_adj)
    # seed the cached CSR views; they are exactly the sorted arrays
    sorted_graph.__dict__["out_csr"] = out_csr
    sorted_graph.__dict__["in_csr"] = in_csr
    return sorted_graph
