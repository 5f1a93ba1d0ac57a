"""Exhaustive reference answers for small graphs. Slow on purpose; used to check the heuristics."""

from __future__ import annotations

from functools import lru_cache
from typing import Iterator, Sequence

from .dfs import Path
from .graph import Digraph

DEFAULT_CAP = 12


class OracleRefused(ValueError):
    pass


def brute_force_lsp(graph: Digraph, cap: int = DEFAULT_CAP) -> Path:
    """Exact longest simple path, ties broken by the lexicographically smallest sequence.

    Memoized search over (visited set, current vertex); refuses graphs with
    more than ``cap`` vertices.
    """
    n = graph.n
    if n > cap:
        raise OracleRefused(f"graph has {n} vertices, oracle cap is {cap}")
    if n == 0:
        return Path(graph, [])
    adj = [sorted(a) for a in graph.out_adj]

    @lru_cache(maxsize=None)
    def ext(v: int, mask: int) -> float:
        best = 0.0
        for u, w in adj[v]:
            if not mask >> u & 1:
                c = w + ext(u, mask | 1 << u)
                if c > best:
                    best = c
        return best

    values = [ext(v, 1 << v) for v in range(n)]
    opt = max(values)
    v = values.index(opt)
    verts = [v]
    mask = 1 << v
    rest = opt
    while rest != 0:
        for u, w in adj[v]:
            if not mask >> u & 1 and w + ext(u, mask | 1 << u) == rest:
                rest = ext(u, mask | 1 << u)
                v = u
                mask |= 1 << u
                verts.append(u)
                break
        else:
            break
    ext.cache_clear()
    return Path(graph, verts)


def enumerate_simple_paths(graph: Digraph, start: int) -> Iterator[tuple[int, ...]]:
    """Every simple path with at least one edge that starts at ``start``."""
    on = [False] * graph.n
    stack = [start]
    on[start] = True

    def rec(v: int) -> Iterator[tuple[int, ...]]:
        for u, _ in graph.out_adj[v]:
            if not on[u]:
                on[u] = True
                stack.append(u)
                yield tuple(stack)
                yield from rec(u)
                stack.pop()
                on[u] = False

    yield from rec(start)


def reachability(succ: Sequence[Sequence[int]]) -> list[set[int]]:
    """``reach[v]``: vertices reachable from ``v`` (including ``v``)."""
    out = []
    for s in range(len(succ)):
        seen = {s}
        todo = [s]
        while todo:
            v = todo.pop()
            for u in succ[v]:
                if u not in seen:
                    seen.add(u)
                    todo.append(u)
        out.append(seen)
    return out


def brute_force_scc(graph: Digraph) -> list[frozenset[int]]:
    reach = reachability([[v for v, _ in a] for a in graph.out_adj])
    comps = {frozenset(u for u in reach[v] if v in reach[u]) for v in range(graph.n)}
    return sorted(comps, key=min)


def count_bad_pairs(succ: Sequence[Sequence[int]], order: Sequence[int]) -> int:
    """Pairs ``(a, b)`` with ``a`` before ``b`` where ``b`` reaches ``a`` but not vice versa.

    ``succ`` is indexed by the vertices in ``order``; edges to vertices
    outside ``order`` are ignored.
    """
    inside = set(order)
    local = {v: [u for u in succ[v] if u in inside] for v in order}
    reach: dict[int, set[int]] = {}
    for s in order:
        seen = {s}
        todo = [s]
        while todo:
            v = todo.pop()
            for u in local[v]:
                if u not in seen:
                    seen.add(u)
                    todo.append(u)
        reach[s] = seen
    bad = 0
    for i, a in enumerate(order):
        for b in order[i + 1 :]:
            if a in reach[b] and b not in reach[a]:
                bad += 1
    return bad


def best_near_path(graph: Digraph, verts: Sequence[int]) -> tuple[float, tuple[int, ...]]:
    """Heaviest simple path using at most one edge outside the given path.

    Plain enumeration from every start vertex, pruned once a second foreign
    edge would be needed.
    """
    path_edges = set(zip(verts, verts[1:]))
    best_w = 0.0
    best: tuple[int, ...] = (verts[0],) if verts else ()
    on = [False] * graph.n
    stack: list[int] = []

    def rec(v: int, weight: float, foreign: int) -> None:
        nonlocal best_w, best
        if weight > best_w:
            best_w, best = weight, tuple(stack)
        for u, w in graph.out_adj[v]:
            if on[u]:
                continue
            f = foreign + ((v, u) not in path_edges)
            if f > 1:
                continue
            on[u] = True
            stack.append(u)
            rec(u, weight + w, f)
            stack.pop()
            on[u] = False

    for s in range(graph.n):
        on[s] = True
        stack.append(s)
        rec(s, 0.0, 0)
        stack.pop()
        on[s] = False
    return best_w, best
