import itertools
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings

from conftest import digraphs
from longpath import Digraph, analyze, order_neighbors, path_weight_sums, preprocess, vertex_scores
from longpath.scoring import exploration_priority


def walk_sum_oracle(graph: Digraph, k: int) -> list[float]:
    """Sum of weights of all length-k walks from each vertex, by enumeration."""
    out = []
    for s in range(graph.n):
        total = 0.0
        stack = [(s, 0, 0.0)]
        while stack:
            v, depth, w = stack.pop()
            if depth == k:
                total += w
                continue
            for u, x in graph.out_adj[v]:
                stack.append((u, depth + 1, w + x))
        out.append(total)
    return out


def test_g1_depth_one(g1):
    a_out, a_in = path_weight_sums(g1, 1)
    assert a_out[1].tolist() == [1, 1, 2, 0]
    assert a_in[1].tolist() == [1, 1, 1, 1]


def test_g1_depth_two(g1):
    a_out, _ = path_weight_sums(g1, 2)
    assert a_out[2][0] == 2.0


def test_single_edge_deeper_walks_vanish():
    a_out, a_in = path_weight_sums(Digraph.from_edges(2, [(0, 1, 5.0)]), 3)
    assert a_out[1][0] == 5.0
    assert a_out[2][0] == a_out[3][0] == 0.0
    assert a_in[1][1] == 5.0


def test_scores_g1(g1):
    assert vertex_scores(path_weight_sums(g1, 1), (1,)).score_out.tolist() == [1, 1, 2, 0]
    assert vertex_scores(path_weight_sums(g1, 2), (1, 1)).score_out[0] == 3.0


def test_scores_validate_coefficients(g1):
    tables = path_weight_sums(g1, 2)
    with pytest.raises(ValueError):
        vertex_scores(tables, (1,))
    with pytest.raises(ValueError):
        vertex_scores(tables, (1, 0))
    with pytest.raises(ValueError):
        path_weight_sums(g1, 0)


def test_priority_low_score_first_sink_last():
    # vertices: s (sink), a (score 5), b (score 2); in-degree 3 each, equal ranks
    out_deg = np.array([0, 2, 2])
    in_deg = np.array([3, 3, 3])
    prio = exploration_priority(out_deg, in_deg, np.zeros(3, int), np.array([0.0, 5.0, 2.0]), 1)
    assert sorted(range(3), key=prio.__getitem__) == [2, 1, 0]


def test_priority_low_indegree_beats_score():
    out_deg = np.array([1, 1])
    in_deg = np.array([1, 4])
    prio = exploration_priority(out_deg, in_deg, np.zeros(2, int), np.array([9.0, 2.0]), 1)
    assert prio[0] < prio[1]


def test_priority_rank_beats_score():
    out_deg = np.array([1, 1])
    in_deg = np.array([3, 3])
    prio = exploration_priority(out_deg, in_deg, np.array([2, 0]), np.array([9.0, 1.0]), 1)
    assert prio[0] < prio[1]


def test_priority_sink_last_even_with_low_indegree():
    out_deg = np.array([0, 3])
    in_deg = np.array([1, 5])
    prio = exploration_priority(out_deg, in_deg, np.zeros(2, int), np.array([0.0, 8.0]), 1)
    assert prio[1] < prio[0]


def test_order_neighbors_on_a_graph():
    # 0 -> {1 (sink), 2, 3}; 2 has the larger score; in-degrees of 2 and 3 are 2
    edges = [(0, 1, 1), (0, 2, 1), (0, 3, 1), (4, 2, 1), (4, 3, 1), (2, 5, 1), (2, 6, 1), (3, 5, 1),
             (5, 7, 1), (6, 7, 1), (7, 4, 1)]
    g = Digraph.from_edges(8, edges)
    info = analyze(g)
    scores = vertex_scores(path_weight_sums(g, 1), (1,))
    sorted_g = order_neighbors(g, scores, info)
    assert [v for v, _ in sorted_g.out_adj[0]] == [3, 2, 1]


@settings(max_examples=200, deadline=None)
@given(digraphs(max_n=8))
def test_walk_sums_match_enumeration(graph):
    a_out, a_in = path_weight_sums(graph, 3)
    rev = graph.reversed()
    for i in range(1, 4):
        assert np.allclose(a_out[i], walk_sum_oracle(graph, i))
        assert np.allclose(a_in[i], walk_sum_oracle(rev, i))
    assert (a_out >= 0).all()


@settings(max_examples=200, deadline=None)
@given(digraphs(max_n=8, unit=True))
def test_score_zero_iff_sink(graph):
    scores = vertex_scores(path_weight_sums(graph, 3), (1.0, 0.5, 0.25))
    for v in range(graph.n):
        assert (scores.score_out[v] == 0) == (not graph.out_adj[v])
        assert (scores.score_in[v] == 0) == (not graph.in_adj[v])


@settings(max_examples=200, deadline=None)
@given(digraphs())
def test_order_neighbors_permutes_and_is_deterministic(graph):
    info = analyze(graph)
    scores = vertex_scores(path_weight_sums(graph, 3), (1, 1, 1))
    a = order_neighbors(graph, scores, info)
    b = order_neighbors(graph, scores, info)
    for v in range(graph.n):
        assert Counter(a.out_adj[v]) == Counter(graph.out_adj[v])
        assert Counter(a.in_adj[v]) == Counter(graph.in_adj[v])
    assert a.out_adj == b.out_adj and a.in_adj == b.in_adj


@settings(max_examples=150, deadline=None)
@given(digraphs())
def test_order_neighbors_respects_keys(graph):
    info = analyze(graph)
    scores = vertex_scores(path_weight_sums(graph, 2), (1, 1))
    g = order_neighbors(graph, scores, info)
    in_deg = [len(a) for a in graph.in_adj]

    def key(u):
        return (not graph.out_adj[u], in_deg[u] > 1, -info.out_rank[u], scores.score_out[u], u)

    for v in range(graph.n):
        keys = [key(u) for u, _ in g.out_adj[v]]
        assert keys == sorted(keys)
        assert all(a != b for a, b in itertools.pairwise(keys))


@settings(max_examples=100, deadline=None)
@given(digraphs())
def test_sorted_graph_csr_matches_adjacency(graph):
    inst = preprocess(graph)
    for adj, (indptr, heads, weights) in ((inst.graph.out_adj, inst.graph.out_csr), (inst.graph.in_adj, inst.graph.in_csr)):
        flat = [p for a in adj for p in a]
        assert indptr.tolist() == [0] + list(itertools.accumulate(map(len, adj)))
        assert heads.tolist() == [v for v, _ in flat]
        assert weights.tolist() == [w for _, w in flat]
