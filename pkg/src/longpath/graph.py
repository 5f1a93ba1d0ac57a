"""Weighted digraph storage, edge-list I/O and connectivity decomposition."""

from __future__ import annotations

import io
import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence, TextIO

import numpy as np

from . import _kernels

Adjacency = tuple[tuple[tuple[int, float], ...], ...]


class GraphFormatError(ValueError):
    """Raised for malformed or rejected edge-list input."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


def _csr(adj: Sequence[Sequence[tuple[int, float]]]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    indptr = np.zeros(len(adj) + 1, dtype=np.int64)
    indptr[1:] = np.cumsum(np.fromiter(map(len, adj), dtype=np.int64, count=len(adj)))
    m = int(indptr[-1])
    flat = itertools.chain.from_iterable(itertools.chain.from_iterable(adj))
    pairs = np.fromiter(flat, dtype=np.float64, count=2 * m).reshape(m, 2)
    return indptr, pairs[:, 0].astype(np.int64), pairs[:, 1].copy()


@dataclass(frozen=True, eq=False)
class Digraph:
    """Immutable weighted digraph on vertices ``0..n-1``.

    ``out_adj[u]`` holds ``(v, w)`` for every edge ``u -> v``; ``in_adj[v]``
    holds ``(u, w)`` for the same edge. ``labels`` maps dense ids back to the
    ids used in the input file when the input was compacted.
    """

    n: int
    out_adj: Adjacency
    in_adj: Adjacency
    labels: tuple[int, ...] | None = None
    dropped_self_loops: int = field(default=0, compare=False)

    @classmethod
    def from_edges(
        cls,
        n: int,
        edges: Iterable[tuple[int, int, float]],
        labels: Sequence[int] | None = None,
    ) -> Digraph:
        """Build a graph, collapsing parallel edges to their max weight and dropping self-loops."""
        best: dict[tuple[int, int], float] = {}
        loops = 0
        for u, v, w in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            w = float(w)
            if not math.isfinite(w) or w < 0:
                raise GraphFormatError(f"edge ({u}, {v}) has invalid weight {w!r}")
            if u == v:
                loops += 1
                continue
            old = best.get((u, v))
            if old is None or w > old:
                best[(u, v)] = w
        out: list[list[tuple[int, float]]] = [[] for _ in range(n)]
        inn: list[list[tuple[int, float]]] = [[] for _ in range(n)]
        for (u, v), w in sorted(best.items()):
            out[u].append((v, w))
            inn[v].append((u, w))
        return cls(
            n,
            tuple(map(tuple, out)),
            tuple(map(tuple, inn)),
            tuple(labels) if labels is not None else None,
            loops,
        )

    @cached_property
    def out_lists(self) -> tuple[list[list[int]], list[list[float]]]:
        """Out-adjacency split into parallel neighbor and weight lists."""
        return [[v for v, _ in a] for a in self.out_adj], [[w for _, w in a] for a in self.out_adj]

    @cached_property
    def in_lists(self) -> tuple[list[list[int]], list[list[float]]]:
        return [[u for u, _ in a] for a in self.in_adj], [[w for _, w in a] for a in self.in_adj]

    @cached_property
    def out_csr(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """``(indptr, heads, weights)`` arrays in adjacency order."""
        return _csr(self.out_adj)

    @cached_property
    def in_csr(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return _csr(self.in_adj)

    @cached_property
    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """``(src, dst, weight)`` arrays in out-adjacency order."""
        indptr, heads, weights = self.out_csr
        src = np.repeat(np.arange(self.n, dtype=np.int64), np.diff(indptr))
        return src, heads, weights

    @property
    def m(self) -> int:
        return sum(len(a) for a in self.out_adj)

    def edges(self) -> Iterable[tuple[int, int, float]]:
        for u, adj in enumerate(self.out_adj):
            for v, w in adj:
                yield u, v, w

    def weight(self, u: int, v: int) -> float | None:
        """Weight of ``u -> v`` or None if absent. Linear in the out-degree of ``u``."""
        for x, w in self.out_adj[u]:
            if x == v:
                return w
        return None

    def path_weight(self, verts: Sequence[int]) -> float:
        """Total weight of a vertex sequence; raises ValueError if it is not a simple path."""
        if len(set(verts)) != len(verts):
            raise ValueError("path repeats a vertex")
        total = 0.0
        for u, v in zip(verts, verts[1:]):
            w = self.weight(u, v)
            if w is None:
                raise ValueError(f"no edge {u} -> {v}")
            total += w
        return total

    def reversed(self) -> Digraph:
        """The same graph with every edge flipped; adjacency order is kept."""
        return Digraph(self.n, self.in_adj, self.out_adj, self.labels, self.dropped_self_loops)

    def with_adjacency(self, out_adj: Adjacency, in_adj: Adjacency) -> Digraph:
        return Digraph(self.n, out_adj, in_adj, self.labels, self.dropped_self_loops)

    def label(self, v: int) -> int:
        return self.labels[v] if self.labels is not None else v

    def same_edges(self, other: Digraph) -> bool:
        """Edge-set equality, ignoring adjacency order."""
        return (
            self.n == other.n
            and self.labels == other.labels
            and sorted(self.edges()) == sorted(other.edges())
        )


def parse_edge_list(text: str | TextIO, compact: bool = False) -> Digraph:
    """Parse ``u v w`` lines into a Digraph.

    Blank lines and lines starting with ``#`` or ``%`` are skipped. A first
    data line with exactly two integers is read as an ``n m`` header. With
    ``compact=True`` the distinct vertex ids are renumbered densely and the
    originals kept in ``Digraph.labels``.
    """
    stream = io.StringIO(text) if isinstance(text, str) else text
    header_n: int | None = None
    edges: list[tuple[int, int, float]] = []
    seen_data = False
    for lineno, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line or line[0] in "#%":
            continue
        parts = line.split()
        if not seen_data and len(parts) == 2:
            seen_data = True
            try:
                header_n, _ = int(parts[0]), int(parts[1])
            except ValueError:
                raise GraphFormatError(f"bad header {line!r}", lineno) from None
            if header_n < 0:
                raise GraphFormatError("negative vertex count", lineno)
            continue
        seen_data = True
        if len(parts) != 3:
            raise GraphFormatError(f"expected 'u v w', got {line!r}", lineno)
        try:
            u, v, w = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError:
            raise GraphFormatError(f"cannot parse {line!r}", lineno) from None
        if u < 0 or v < 0:
            raise GraphFormatError("negative vertex id", lineno)
        if not math.isfinite(w):
            raise GraphFormatError(f"non-finite weight {parts[2]!r}", lineno)
        if w < 0:
            raise GraphFormatError(f"negative weight {w!r} rejected", lineno)
        edges.append((u, v, w))

    if compact:
        ids = sorted({u for u, _, _ in edges} | {v for _, v, _ in edges})
        index = {x: i for i, x in enumerate(ids)}
        edges = [(index[u], index[v], w) for u, v, w in edges]
        return Digraph.from_edges(len(ids), edges, labels=ids)

    top = max((max(u, v) for u, v, _ in edges), default=-1) + 1
    if header_n is not None:
        if header_n < top:
            raise GraphFormatError(f"header declares {header_n} vertices but id {top - 1} appears")
        top = header_n
    return Digraph.from_edges(top, edges)


def read_edge_list(path: str, compact: bool = False) -> Digraph:
    with open(path, encoding="utf-8") as fh:
        return parse_edge_list(fh, compact=compact)


def format_edge_list(graph: Digraph, header: bool = True) -> str:
    """Serialize in the format read by :func:`parse_edge_list` (weights round-trip exactly)."""
    out = io.StringIO()
    if header and graph.labels is None:
        out.write(f"{graph.n} {graph.m}\n")
    for u, v, w in graph.edges():
        out.write(f"{graph.label(u)} {graph.label(v)} {w!r}\n")
    return out.getvalue()


def write_edge_list(graph: Digraph, path: str, header: bool = True) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_edge_list(graph, header=header))


# -- connectivity ------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SccInfo:
    """Strong/weak components, the skeleton DAG and per-vertex ranks.

    Component ids follow a topological order of the skeleton, so an edge
    between different components always goes from a smaller to a larger id.
    """

    scc_id: list[int]
    members: list[list[int]]
    skeleton: list[list[int]]
    wcc_id: list[int] | None = None
    out_rank: list[int] | None = None
    in_rank: list[int] | None = None

    @property
    def count(self) -> int:
        return len(self.members)

    def skeleton_in(self) -> list[list[int]]:
        preds: list[list[int]] = [[] for _ in range(self.count)]
        for c, succ in enumerate(self.skeleton):
            for d in succ:
                preds[d].append(c)
        return preds


def weakly_connected_components(graph: Digraph, compiled: bool = True) -> list[int]:
    """Per-vertex weak component index, numbered by smallest member."""
    if compiled:
        src, dst, _ = graph.edge_arrays
        return _kernels.weak_labels(graph.n, src, dst).tolist()
    parent = list(range(graph.n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, adj in enumerate(graph.out_adj):
        for v, _ in adj:
            ru, rv = find(u), find(v)
            if ru != rv:
                if ru < rv:
                    parent[rv] = ru
                else:
                    parent[ru] = rv
    ids: dict[int, int] = {}
    result = []
    for v in range(graph.n):
        r = find(v)
        if r not in ids:
            ids[r] = len(ids)
        result.append(ids[r])
    return result


def strongly_connected_components(graph: Digraph, compiled: bool = True) -> SccInfo:
    """Iterative Tarjan. Ranks and weak components are left unset.

    ``compiled=False`` runs the pure-Python reference, which yields the same result.
    """
    if compiled:
        return _scc_compiled(graph)
    n = graph.n
    succ = [[v for v, _ in adj] for adj in graph.out_adj]
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    comps: list[list[int]] = []
    counter = 0

    for root in range(n):
        if index[root] != -1:
            continue
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        work = [(root, 0)]
        while work:
            v, i = work[-1]
            nbrs = succ[v]
            pushed = False
            while i < len(nbrs):
                w = nbrs[i]
                i += 1
                if index[w] == -1:
                    work[-1] = (v, i)
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, 0))
                    pushed = True
                    break
                if on_stack[w] and index[w] < low[v]:
                    low[v] = index[w]
            if pushed:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                if low[v] < low[parent]:
                    low[parent] = low[v]
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                comp.sort()
                comps.append(comp)

    # Tarjan emits sink components first.
    comps.reverse()
    scc_id = [0] * n
    for c, comp in enumerate(comps):
        for v in comp:
            scc_id[v] = c
    skel: list[set[int]] = [set() for _ in comps]
    for u in range(n):
        cu = scc_id[u]
        for v in succ[u]:
            cv = scc_id[v]
            if cu != cv:
                skel[cu].add(cv)
    return SccInfo(scc_id, comps, [sorted(s) for s in skel])


def _scc_compiled(graph: Digraph) -> SccInfo:
    n = graph.n
    indptr, heads, _ = graph.out_csr
    finished, count = _kernels.tarjan(n, indptr, heads)
    scc = (count - 1) - finished  # Tarjan finishes sink components first
    order = np.argsort(scc, kind="stable")
    bounds = np.zeros(count + 1, dtype=np.int64)
    bounds[1:] = np.cumsum(np.bincount(scc, minlength=count))
    flat = order.tolist()
    members = [flat[a:b] for a, b in zip(bounds[:-1].tolist(), bounds[1:].tolist())]
    src, dst, _ = graph.edge_arrays
    cu, cv = scc[src], scc[dst]
    cross = cu != cv
    keys = np.unique(cu[cross] * count + cv[cross])
    heads_c = (keys % count).tolist()
    cuts = np.searchsorted(keys // count, np.arange(count + 1)).tolist()
    skeleton = [heads_c[a:b] for a, b in zip(cuts[:-1], cuts[1:])]
    return SccInfo(scc.tolist(), members, skeleton)


def compute_ranks(info: SccInfo) -> SccInfo:
    """Fill out/in-rank: longest skeleton path (in edges) starting/ending at each component."""
    k = info.count
    out_c = [0] * k
    in_c = [0] * k
    # Ids are a topological order, so one pass in each direction suffices.
    for c in range(k - 1, -1, -1):
        best = 0
        for d in info.skeleton[c]:
            if out_c[d] + 1 > best:
                best = out_c[d] + 1
        out_c[c] = best
    for c in range(k):
        for d in info.skeleton[c]:
            if in_c[c] + 1 > in_c[d]:
                in_c[d] = in_c[c] + 1
    return SccInfo(
        info.scc_id,
        info.members,
        info.skeleton,
        info.wcc_id,
        [out_c[c] for c in info.scc_id],
        [in_c[c] for c in info.scc_id],
    )


def analyze(graph: Digraph) -> SccInfo:
    """Strong and weak components plus ranks in one call."""
    info = compute_ranks(strongly_connected_components(graph))
    return SccInfo(
        info.scc_id,
        info.members,
        info.skeleton,
        weakly_connected_components(graph),
        info.out_rank,
        info.in_rank,
    )
