"""Pseudo-topological orders and the longest-path DP over their subjacent DAG."""

from __future__ import annotations

import random
from typing import Sequence

from .dfs import Path
from .graph import Digraph, SccInfo


class PseudoTopoOrder:
    """A vertex order with its inverse and cached DP values.

    ``x[v]`` is the weight of the heaviest path ending at ``v`` that only
    uses edges going forward in the order. Entries at positions
    ``>= first_dirty`` may be stale.
    """

    __slots__ = ("order", "inv", "x", "first_dirty")

    def __init__(self, order: Sequence[int], x: list[float] | None = None, first_dirty: int = 0):
        self.order = list(order)
        n = len(self.order)
        self.inv = [0] * n
        for i, v in enumerate(self.order):
            self.inv[v] = i
        self.x = x if x is not None else [0.0] * n
        self.first_dirty = first_dirty if x is not None else 0

    @property
    def n(self) -> int:
        return len(self.order)

    def __repr__(self) -> str:
        return f"PseudoTopoOrder({self.order}, first_dirty={self.first_dirty})"

    def copy(self) -> PseudoTopoOrder:
        new = PseudoTopoOrder.__new__(PseudoTopoOrder)
        new.order = self.order[:]
        new.inv = self.inv[:]
        new.x = self.x[:]
        new.first_dirty = self.first_dirty
        return new

    def place(self, pos: int, v: int) -> None:
        self.order[pos] = v
        self.inv[v] = pos
        if pos < self.first_dirty:
            self.first_dirty = pos

    def swap(self, i: int, j: int) -> None:
        order, inv = self.order, self.inv
        a, b = order[i], order[j]
        order[i], order[j] = b, a
        inv[a], inv[b] = j, i
        lo = i if i < j else j
        if lo < self.first_dirty:
            self.first_dirty = lo

    def impose(self, verts: Sequence[int]) -> None:
        """Rewrite the slots held by ``verts`` so they appear in path order."""
        inv = self.inv
        slots = sorted(inv[v] for v in verts)
        order = self.order
        for pos, v in zip(slots, verts):
            if order[pos] != v:
                self.place(pos, v)

    def check_inverse(self) -> bool:
        return sorted(self.order) == list(range(self.n)) and all(
            self.inv[v] == i for i, v in enumerate(self.order)
        )


def is_strong_pto(graph: Digraph, info: SccInfo, order: Sequence[int]) -> bool:
    """Every backward edge spans an interval lying inside a single component."""
    scc = info.scc_id
    run = [0] * len(order)
    inv = [0] * len(order)
    r = 0
    for i, v in enumerate(order):
        if i and scc[v] != scc[order[i - 1]]:
            r += 1
        run[i] = r
        inv[v] = i
    for y, adj in enumerate(graph.out_adj):
        iy = inv[y]
        for x, _ in adj:
            ix = inv[x]
            if ix < iy and run[ix] != run[iy]:
                return False
    return True


def is_weak_pto(graph: Digraph, info: SccInfo, order: Sequence[int]) -> bool:
    """Backward edges only join vertices of the same component."""
    scc = info.scc_id
    inv = [0] * len(order)
    for i, v in enumerate(order):
        inv[v] = i
    return all(
        inv[x] > inv[y] or scc[x] == scc[y] for y, x, _ in graph.edges()
    )


def random_topological_order(succ: Sequence[Sequence[int]], rng: random.Random) -> list[int]:
    """Kahn's algorithm choosing uniformly among the currently available nodes."""
    k = len(succ)
    indeg = [0] * k
    for s in succ:
        for d in s:
            indeg[d] += 1
    ready = [c for c in range(k) if indeg[c] == 0]
    out = []
    while ready:
        i = rng.randrange(len(ready))
        ready[i], ready[-1] = ready[-1], ready[i]
        c = ready.pop()
        out.append(c)
        for d in succ[c]:
            indeg[d] -= 1
            if indeg[d] == 0:
                ready.append(d)
    if len(out) != k:
        raise ValueError("graph has a cycle")
    return out


def random_pto(graph: Digraph, info: SccInfo, rng: random.Random) -> PseudoTopoOrder:
    """Random skeleton order with each component expanded into a random permutation."""
    order: list[int] = []
    for c in random_topological_order(info.skeleton, rng):
        block = info.members[c][:]
        rng.shuffle(block)
        order.extend(block)
    return PseudoTopoOrder(order)


def recompute_from(graph: Digraph, pto: PseudoTopoOrder, pos: int | None = None) -> list[float]:
    """Refresh ``pto.x`` at positions ``>= pos`` (default: the dirty watermark)."""
    if pos is None:
        pos = pto.first_dirty
    order, inv, x = pto.order, pto.inv, pto.x
    in_adj = graph.in_adj
    for p in range(pos, len(order)):
        v = order[p]
        best = 0.0
        for u, w in in_adj[v]:
            if inv[u] < p:
                c = x[u] + w
                if c > best:
                    best = c
        x[v] = best
    pto.first_dirty = len(order)
    return x


def backtrack(graph: Digraph, pto: PseudoTopoOrder) -> list[int]:
    """Heaviest subjacent-DAG path from clean DP values; ties go to the smallest id."""
    x, inv = pto.x, pto.inv
    if not x:
        return []
    v = x.index(max(x))
    path = [v]
    while x[v] != 0:
        iv = inv[v]
        target = x[v]
        pred = -1
        for u, w in graph.in_adj[v]:
            if inv[u] < iv and x[u] + w == target and (pred < 0 or u < pred):
                pred = u
        if pred < 0:
            break
        path.append(pred)
        v = pred
    path.reverse()
    return path


def lsp_dag(graph: Digraph, pto: PseudoTopoOrder) -> Path:
    """Longest path of the subjacent DAG of ``pto``, reusing clean DP values."""
    if pto.first_dirty < pto.n:
        recompute_from(graph, pto, pto.first_dirty)
    return Path(graph, backtrack(graph, pto))


def impose(pto: PseudoTopoOrder, path: Path | Sequence[int], graph: Digraph | None = None) -> PseudoTopoOrder:
    """Copy of ``pto`` with the path's vertices permuted into path order.

    Vertices off the path keep their positions. Pass ``graph`` to have a raw
    vertex sequence validated as a simple path.
    """
    verts = path.vertices() if isinstance(path, Path) else list(path)
    if len(set(verts)) != len(verts):
        raise ValueError("impose needs a simple path")
    if graph is not None and not isinstance(path, Path):
        graph.path_weight(verts)
    out = pto.copy()
    out.impose(verts)
    return out
