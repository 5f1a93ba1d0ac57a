import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import digraphs, random_walk_path
from longpath import (
    Digraph,
    OpenedOrder,
    PathImprover,
    PseudoTopoOrder,
    SearchBudget,
    choose_starts,
    dfs_search,
    generate_planted,
    heuristic_refine,
    impose,
    improve_path,
    is_strong_pto,
    lsp_dag,
    open_edge,
    open_end,
    preprocess,
    random_pto,
    recompute_from,
    reverse_block,
)
from longpath.graph import analyze
from longpath.opening import _Frame, _GapScore, _path_flags, best_rotation
from longpath.oracle import best_near_path, brute_force_lsp, count_bad_pairs


def three_components() -> Digraph:
    # {0,3} -> {1,4} -> {2,5}, each a 2-cycle, plus the chord 0 -> 2
    cycles = [(0, 3), (3, 0), (1, 4), (4, 1), (2, 5), (5, 2)]
    return Digraph.from_edges(6, [(u, v, 1.0) for u, v in cycles] + [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)])


def test_open_edge_g1(g1):
    info = analyze(g1)
    base = impose(PseudoTopoOrder([1, 0, 2, 3]), [0, 3])
    opened = open_edge(g1, info, base, [0, 3], 0, random.Random(0))
    order = opened.pto.order
    assert order[0] == 0 and order[-1] == 3
    assert sorted(opened.block) == [1, 2]
    p = lsp_dag(g1, opened.pto) if opened.block == [1, 2] else lsp_dag(g1, reverse_block(opened).pto)
    assert p.vertices() == [0, 1, 2, 3] and p.weight == 3.0


def test_open_edge_full_component_gives_empty_block(g1):
    info = analyze(g1)
    base = PseudoTopoOrder([0, 1, 2, 3])
    opened = open_edge(g1, info, base, [0, 1, 2, 3], 1, random.Random(0))
    assert opened.block == []
    assert opened.pto.order == [0, 1, 2, 3]


def test_open_edge_spans_middle_component():
    g = three_components()
    info = analyze(g)
    base = impose(random_pto(g, info, random.Random(3)), [0, 2])
    opened = open_edge(g, info, base, [0, 2], 0, random.Random(1))
    assert sorted(opened.block) == [1, 3, 4, 5]
    assert [len(range(*span)) for span in opened.groups] == [1, 2, 1]
    order = opened.pto.order
    assert order.index(0) < opened.lo and order.index(2) >= opened.hi
    assert is_strong_pto(g, info, order)


def test_open_edge_rejects_bad_index(g1):
    with pytest.raises(ValueError):
        open_edge(g1, analyze(g1), PseudoTopoOrder([0, 1, 2, 3]), [0, 1], 1, random.Random(0))


def test_open_ends(g1):
    info = analyze(g1)
    base = PseudoTopoOrder([0, 1, 2, 3])
    head = open_end(g1, info, base, [1, 2], True, random.Random(0))
    assert head.index == -1 and sorted(head.block) == [0] and head.lo == 0
    tail = open_end(g1, info, base, [0, 1], False, random.Random(0))
    assert tail.index == 1 and sorted(tail.block) == [2, 3]
    assert tail.block[-1] == 3


def test_heuristic_refine_single_swap():
    g = Digraph.from_edges(2, [(1, 0, 1.0)])
    opened = OpenedOrder(PseudoTopoOrder([0, 1]), 0, 0, 2, [(0, 2)])
    heuristic_refine(g, opened, 20, random.Random(0))
    assert opened.pto.order == [1, 0]
    assert opened.pto.check_inverse()


def test_heuristic_refine_keeps_topological_block():
    g = Digraph.from_edges(4, [(0, 1, 1), (1, 2, 1), (0, 3, 1)])
    opened = OpenedOrder(PseudoTopoOrder([0, 1, 3, 2]), 0, 0, 4, [(0, 4)])
    succ = g.out_lists[0]
    assert count_bad_pairs(succ, opened.block) == 0
    heuristic_refine(g, opened, 50, random.Random(1))
    assert count_bad_pairs(succ, opened.block) == 0


def test_heuristic_refine_stays_inside_block():
    g = Digraph.from_edges(4, [(3, 0, 1), (2, 1, 1)])
    opened = OpenedOrder(PseudoTopoOrder([0, 1, 2, 3]), 0, 1, 3, [(1, 3)])
    heuristic_refine(g, opened, 30, random.Random(2))
    assert opened.pto.order == [0, 2, 1, 3]


def test_reverse_block_single_group():
    opened = OpenedOrder(PseudoTopoOrder([0, 1, 2, 3, 4]), 0, 1, 4, [(1, 4)])
    assert reverse_block(opened).pto.order == [0, 3, 2, 1, 4]


def test_reverse_block_empty():
    opened = OpenedOrder(PseudoTopoOrder([0, 1]), 0, 1, 1, [])
    assert reverse_block(opened).pto.order == [0, 1]


def test_reverse_block_two_groups():
    opened = OpenedOrder(PseudoTopoOrder([9, 0, 1, 2] + list(range(3, 9))), 0, 1, 4, [(1, 3), (3, 4)])
    assert reverse_block(opened).pto.order[:4] == [9, 1, 0, 2]


@pytest.mark.parametrize("seed", range(10))
def test_improve_trivial_path_g1(g1, seed):
    p = improve_path(g1, analyze(g1), [0], random.Random(seed), plateau=20)
    assert p.weight == 3.0
    assert p.vertices() == [0, 1, 2, 3]


def test_strict_moves_can_stall_on_g1(g1):
    # 2 -> 0 -> 1 keeps 3 out of reach: openings preserve path order and
    # every rotation is flat, so only an equal-weight move escapes
    info = analyze(g1)
    improver = PathImprover(g1, info, random.Random(0))
    assert improver.run([2, 0, 1]).vertices() == [2, 0, 1]
    assert improver.converged
    assert PathImprover(g1, info, random.Random(0), plateau=5).run([2, 0, 1]).weight == 3.0


def test_improve_keeps_optimal_dag_path():
    g = Digraph.from_edges(5, [(0, 1, 2), (1, 2, 2), (0, 2, 1), (2, 3, 1), (3, 4, 5), (1, 4, 1)])
    best = [0, 1, 2, 3, 4]
    assert brute_force_lsp(g).weight == g.path_weight(best)
    assert improve_path(g, analyze(g), best, random.Random(4)).vertices() == best


def test_improve_on_empty_graph():
    assert improve_path(Digraph.from_edges(0, []), analyze(Digraph.from_edges(0, [])), [], random.Random(0)).vertices() == []


def test_improve_rejects_unknown_strategy(g1):
    with pytest.raises(ValueError):
        PathImprover(g1, analyze(g1), random.Random(0), strategy="powerful")


def test_improve_beats_dfs_on_planted_graphs():
    better = 0
    for s in range(20):
        graph, _ = generate_planted(100, 500, 7 + s)
        inst = preprocess(graph)
        start = choose_starts(inst.info, 1, inst.scores.score_out)[0]
        p = dfs_search(inst.graph, start, SearchBudget(stagnation_iters=2000))
        q = improve_path(inst.graph, inst.info, p, random.Random(s), time_ms=2000)
        q.check()
        assert q.weight >= p.weight
        better += q.weight > p.weight
    assert better >= 10


def test_rotation_uses_back_chord():
    # 0->1->2->3 with chord 3->0 and a light middle edge
    g = Digraph.from_edges(4, [(0, 1, 1), (1, 2, 0.1), (2, 3, 1), (3, 0, 1)])
    w, verts = best_rotation(g, [0, 1, 2, 3])
    assert verts == [2, 3, 0, 1] and w == 3.0
    assert best_rotation(g, [0]) is None


@st.composite
def cases(draw, max_n=10):
    graph = draw(digraphs(max_n=max_n))
    return graph, random.Random(draw(st.integers(0, 2**32 - 1)))


@settings(max_examples=250, deadline=None)
@given(cases())
def test_openings_keep_strong_order(case):
    graph, rng = case
    info = analyze(graph)
    verts = random_walk_path(graph, rng)
    base = impose(random_pto(graph, info, rng), verts)
    for i in range(-1, len(verts)):
        if i == -1 or i == len(verts) - 1:
            opened = open_end(graph, info, base, verts, i == -1, rng)
        else:
            opened = open_edge(graph, info, base, verts, i, rng)
        order = opened.pto.order
        assert opened.pto.check_inverse()
        assert is_strong_pto(graph, info, order)
        assert [v for v in order if v in set(verts)] == verts
        assert not set(opened.block) & set(verts)
        reverse_block(opened)
        assert is_strong_pto(graph, info, opened.pto.order)
        heuristic_refine(graph, opened, 4 * len(opened.block), rng)
        assert is_strong_pto(graph, info, opened.pto.order)
        assert [v for v in opened.pto.order if v in set(verts)] == verts


@settings(max_examples=300, deadline=None)
@given(cases(max_n=9), st.integers(1, 40))
def test_refine_never_adds_bad_pairs(case, steps):
    graph, rng = case
    order = list(range(graph.n))
    rng.shuffle(order)
    lo = rng.randrange(graph.n)
    hi = rng.randint(lo, graph.n)
    opened = OpenedOrder(PseudoTopoOrder(order), 0, lo, hi, [(lo, hi)])
    succ = graph.out_lists[0]
    before = count_bad_pairs(succ, opened.block)
    for _ in range(steps):
        heuristic_refine(graph, opened, 1, rng)
        now = count_bad_pairs(succ, opened.block)
        assert now <= before
        before = now


def through_block(graph: Digraph, opened: OpenedOrder) -> float:
    """Heaviest forward path of the opened order that touches its block, by full DP."""
    x = recompute_from(graph, opened.pto, 0)
    order, inv = opened.pto.order, opened.pto.inv
    y = [0.0] * graph.n
    for p in range(graph.n - 1, -1, -1):
        v = order[p]
        y[v] = max([w + y[u] for u, w in graph.out_adj[v] if inv[u] > p], default=0.0)
    return max(x[b] + y[b] for b in opened.block)


@settings(max_examples=300, deadline=None)
@given(cases(max_n=9))
def test_gap_score_matches_materialized_order(case):
    graph, rng = case
    info = analyze(graph)
    verts = random_walk_path(graph, rng)
    base = impose(random_pto(graph, info, rng), verts)
    frame = _Frame(graph, info, base, verts)
    on_path = _path_flags(graph.n, verts)
    slot = [-1] * graph.n
    for i in range(-1, len(verts)):
        ia, ib, bj, groups = frame.gap(i)
        if i == -1 or i == len(verts) - 1:
            opened = open_end(graph, info, frame.pto, verts, i == -1, rng, on_path)
        else:
            opened = open_edge(graph, info, frame.pto, verts, i, rng, on_path)
        block = [v for g in groups for v in g]
        assert sorted(block) == sorted(opened.block)
        if not block:
            continue
        for k, v in enumerate(block, opened.lo):
            opened.pto.place(k, v)
        score = _GapScore(graph, frame, ia, ib, bj, block, slot)
        assert score.best == pytest.approx(through_block(graph, opened), rel=1e-9, abs=1e-12)
        path = score.trace(graph, rng)
        assert graph.path_weight(path) == pytest.approx(score.best, rel=1e-9, abs=1e-12)
        assert set(path) & set(block)


@settings(max_examples=150, deadline=None)
@given(cases(max_n=8))
def test_improvement_is_monotone_and_valid(case):
    graph, rng = case
    info = analyze(graph)
    verts = random_walk_path(graph, rng)
    improver = PathImprover(graph, info, rng, plateau=rng.choice([0, 5]))
    out = improver.run(verts)
    out.check()
    assert out.weight >= graph.path_weight(verts) - 1e-12
    weights = [w for _, w in improver.events]
    assert weights == sorted(weights)
    assert improver.converged


@settings(max_examples=60, deadline=None)
@given(cases(max_n=8))
def test_converged_path_has_no_heavier_one_edge_neighbor(case):
    graph, rng = case
    out = PathImprover(graph, analyze(graph), rng, strategy="reverse").run([rng.randrange(graph.n)])
    best, _ = best_near_path(graph, out.vertices())
    assert best <= out.weight + 1e-9
