"""Heuristic depth-first search over simple paths, mutating one path in place."""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .graph import Digraph, SccInfo


class Path:
    """A simple path built edge by edge along a fixed adjacency order.

    With ``backward=True`` the path grows along in-edges, so ``verts`` lists
    the vertices in reverse of the direction of travel in the graph.
    ``cursor[j]`` is the adjacency index of the edge ``verts[j] -> verts[j+1]``.
    The search never pops below ``floor`` vertices.
    """

    __slots__ = ("graph", "backward", "nbrs", "wts", "verts", "in_path", "cursor", "prefix", "floor")

    def __init__(self, graph: Digraph, verts: Iterable[int] = (), backward: bool = False):
        self.graph = graph
        self.backward = backward
        self.nbrs, self.wts = graph.in_lists if backward else graph.out_lists
        self.verts: list[int] = []
        self.in_path = bytearray(graph.n)
        self.cursor: list[int] = []
        self.prefix: list[float] = []
        for v in verts:
            self.append(v)
        self.floor = 1

    def __len__(self) -> int:
        return len(self.verts)

    def __repr__(self) -> str:
        return f"Path({self.vertices()}, weight={self.weight:g})"

    @property
    def weight(self) -> float:
        return self.prefix[-1] if self.prefix else 0.0

    @property
    def last(self) -> int:
        return self.verts[-1]

    def vertices(self) -> list[int]:
        """Vertices in the direction of travel in the graph."""
        return self.verts[::-1] if self.backward else list(self.verts)

    def append(self, v: int) -> None:
        if self.in_path[v]:
            raise ValueError(f"vertex {v} already on the path")
        if self.verts:
            try:
                idx = self.nbrs[self.verts[-1]].index(v)
            except ValueError:
                raise ValueError(f"no edge joining {self.verts[-1]} and {v}") from None
            self.push(idx)
        else:
            self.verts.append(v)
            self.in_path[v] = 1
            self.prefix.append(0.0)

    def push(self, idx: int) -> None:
        """Extend along adjacency entry ``idx`` of the last vertex."""
        u = self.verts[-1]
        v = self.nbrs[u][idx]
        self.verts.append(v)
        self.in_path[v] = 1
        self.cursor.append(idx)
        self.prefix.append(self.prefix[-1] + self.wts[u][idx])

    def pop(self) -> int:
        v = self.verts.pop()
        self.in_path[v] = 0
        self.prefix.pop()
        if self.cursor:
            self.cursor.pop()
        return v

    def edge(self, idx: int) -> tuple[int, int, float]:
        """The adjacency entry ``idx`` of the last vertex as ``(tail, head, weight)``."""
        u = self.verts[-1]
        v, w = self.nbrs[u][idx], self.wts[u][idx]
        return (v, u, w) if self.backward else (u, v, w)

    def next_unexplored_edge(self, after: int | None = None) -> int | None:
        """Adjacency index of the first edge out of the last vertex past ``after``
        whose head is not on the path, or None."""
        nbrs = self.nbrs[self.verts[-1]]
        in_path = self.in_path
        for i in range(0 if after is None else after + 1, len(nbrs)):
            if not in_path[nbrs[i]]:
                return i
        return None

    def check(self) -> None:
        """Assert the path invariants; used by tests."""
        assert len(set(self.verts)) == len(self.verts)
        assert sum(self.in_path) == len(self.verts)
        assert all(self.in_path[v] for v in self.verts)
        assert len(self.cursor) == max(len(self.verts) - 1, 0)
        total = 0.0
        for j, (u, v) in enumerate(zip(self.verts, self.verts[1:])):
            assert self.nbrs[u][self.cursor[j]] == v
            total += self.wts[u][self.cursor[j]]
        assert abs(total - self.weight) <= 1e-9 * max(1.0, abs(total))


def next_path(path: Path) -> bool:
    """Advance ``path`` to the next simple path in depth-first order.

    Returns False once every path extending the first ``path.floor``
    vertices has been produced; ``path`` is then back at its floor.
    """
    nbrs = path.nbrs
    in_path = path.in_path
    verts = path.verts
    cursor = path.cursor
    adj = nbrs[verts[-1]]
    t = None
    for i in range(len(adj)):
        if not in_path[adj[i]]:
            t = i
            break
    floor = path.floor
    while t is None and len(verts) > floor:
        v = verts.pop()
        in_path[v] = 0
        path.prefix.pop()
        start = cursor.pop() + 1
        adj = nbrs[verts[-1]]
        for i in range(start, len(adj)):
            if not in_path[adj[i]]:
                t = i
                break
    if t is None:
        return False
    path.push(t)
    return True


@dataclass
class SearchBudget:
    """Limits for one search run. ``None`` disables a limit."""

    time_ms: float | None = None
    stagnation_iters: int | None = None
    forward_fraction: float = 0.7
    back_erase: int = 3
    # skip the backward phase when the forward phase enumerated every path
    backward_after_exhaust: bool = True


class DepthFirstSearch:
    """Forward then backward depth-first search keeping a copy of the best path.

    After a run, ``iterations`` counts calls to :func:`next_path` and
    ``exhausted`` tells whether the forward phase enumerated every path from
    the start vertex.
    """

    check_every = 256
    chunk = 1 << 15

    def __init__(self, graph: Digraph, budget: SearchBudget, compiled: bool = True):
        self.graph = graph
        self.budget = budget
        self.compiled = compiled
        self.iterations = 0
        self.exhausted = False
        self.history: list[float] = []

    def _explore(
        self, path: Path, deadline: float, best: list[int], best_w: float
    ) -> tuple[list[int], float, bool]:
        stagnation = self.budget.stagnation_iters
        since = 0
        it = 0
        check = self.check_every
        clock = time.perf_counter
        while True:
            if not next_path(path):
                self.iterations += it
                return best, best_w, True
            it += 1
            w = path.prefix[-1]
            if w > best_w:
                best_w = w
                best = path.vertices()
                self.history.append(w)
                since = 0
            else:
                since += 1
                if stagnation is not None and since >= stagnation:
                    break
            if it % check == 0 and clock() >= deadline:
                break
        self.iterations += it
        return best, best_w, False

    def _explore_compiled(
        self, path: Path, deadline: float, best: list[int], best_w: float
    ) -> tuple[list[int], float, bool]:
        n = self.graph.n
        indptr, heads, weights = self.graph.in_csr if path.backward else self.graph.out_csr
        k = len(path.verts)
        verts = np.zeros(n, dtype=np.int64)
        verts[:k] = path.verts
        cursor = np.zeros(n, dtype=np.int64)
        for j, c in enumerate(path.cursor):
            cursor[j] = indptr[path.verts[j]] + c
        prefix = np.zeros(n)
        prefix[:k] = path.prefix
        in_path = np.frombuffer(bytes(path.in_path), dtype=np.uint8).copy()
        state = np.array([k, path.floor, 0, 0], dtype=np.int64)
        top = np.zeros(n, dtype=np.int64)
        top_w = np.array([best_w])
        stagnation = self.budget.stagnation_iters or 0
        while True:
            steps, status = _kernels.dfs_steps(
                indptr, heads, weights, verts, cursor, prefix, in_path,
                state, top, top_w, self.chunk, stagnation,
            )
            self.iterations += steps
            if state[2]:
                best = top[: state[2]].tolist()
                if path.backward:
                    best.reverse()
                best_w = float(top_w[0])
                self.history.append(best_w)
                state[2] = 0
            if status != _kernels.CHUNK_DONE or time.perf_counter() >= deadline:
                break
        # leave ``path`` in the state the search stopped in
        k = int(state[0])
        path.verts[:] = verts[:k].tolist()
        path.in_path[:] = in_path.tobytes()
        path.cursor[:] = [int(cursor[j] - indptr[path.verts[j]]) for j in range(k - 1)]
        path.prefix[:] = prefix[:k].tolist()
        return best, best_w, status == _kernels.EXHAUSTED

    def run(self, start: int) -> Path:
        budget = self.budget
        if budget.time_ms is not None and budget.time_ms <= 0:
            return Path(self.graph, [start])
        t0 = time.perf_counter()
        if budget.time_ms is None:
            deadline = fwd_deadline = float("inf")
        else:
            deadline = t0 + budget.time_ms / 1000.0
            fwd_deadline = t0 + budget.forward_fraction * budget.time_ms / 1000.0

        explore = self._explore_compiled if self.compiled else self._explore
        best, best_w, self.exhausted = explore(Path(self.graph, [start]), fwd_deadline, [start], 0.0)
        if self.exhausted and not budget.backward_after_exhaust:
            return Path(self.graph, best)
        erase = min(budget.back_erase, len(best) - 1)
        kept = best[erase:]
        back = Path(self.graph, reversed(kept), backward=True)
        back.floor = len(kept)
        best, best_w, _ = explore(back, deadline, best, best_w)
        return Path(self.graph, best)


def dfs_search(graph: Digraph, start: int, budget: SearchBudget, compiled: bool = True) -> Path:
    return DepthFirstSearch(graph, budget, compiled).run(start)


def choose_starts(
    info: SccInfo,
    count: int,
    score_out: Sequence[float] | np.ndarray | None = None,
    among: Iterable[int] | None = None,
) -> list[int]:
    """Up to ``count`` start vertices: highest out-rank, then highest out-score, then lowest id."""
    verts = range(len(info.scc_id)) if among is None else among
    rank = info.out_rank
    if score_out is None:
        key = lambda v: (-rank[v], v)  # noqa: E731
    else:
        key = lambda v: (-rank[v], -score_out[v], v)  # noqa: E731
    return sorted(verts, key=key)[:count]
