"""Path improvement by opening path edges inside pseudo-topological orders."""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from typing import Sequence

from .dfs import Path
from .graph import Digraph, SccInfo
from .pto import PseudoTopoOrder, backtrack, random_pto, recompute_from

STRATEGIES = ("basic", "reverse", "heuristic", "all")


@dataclass
class OpenedOrder:
    """An order in which the vertices at positions ``lo..hi-1`` (the block B)
    sit between two consecutive path vertices, or before/after the whole path.

    ``groups`` lists the ``(start, stop)`` position ranges of B that belong
    to one strongly connected component each. ``index`` is the opened edge,
    ``-1`` for the head of the path and ``len(path) - 1`` for its tail.
    """

    pto: PseudoTopoOrder
    index: int
    lo: int
    hi: int
    groups: list[tuple[int, int]] = field(default_factory=list)

    @property
    def block(self) -> list[int]:
        return self.pto.order[self.lo : self.hi]


def _path_flags(n: int, verts: Sequence[int]) -> bytearray:
    flags = bytearray(n)
    for v in verts:
        flags[v] = 1
    return flags


def _rewrite(
    pto: PseudoTopoOrder,
    info: SccInfo,
    seg_lo: int,
    seg_hi: int,
    left: list[int],
    right: list[int],
    on_path: bytearray,
    rng: random.Random,
) -> tuple[int, int, list[tuple[int, int]]]:
    """Lay out ``left + B + right`` over positions ``seg_lo..seg_hi-1``.

    B collects the off-path vertices of the segment grouped by component in
    their existing block order, each group shuffled.
    """
    scc = info.scc_id
    order = pto.order
    groups: list[list[int]] = []
    prev = -1
    for p in range(seg_lo, seg_hi):
        v = order[p]
        if on_path[v]:
            continue
        if scc[v] != prev:
            groups.append([])
            prev = scc[v]
        groups[-1].append(v)
    pos = seg_lo
    for v in left:
        if order[pos] != v:
            pto.place(pos, v)
        pos += 1
    lo = pos
    spans = []
    for g in groups:
        if len(g) > 1:
            rng.shuffle(g)
        spans.append((pos, pos + len(g)))
        for v in g:
            if order[pos] != v:
                pto.place(pos, v)
            pos += 1
    hi = pos
    for v in right:
        if order[pos] != v:
            pto.place(pos, v)
        pos += 1
    assert pos == seg_hi
    return lo, hi, spans


def _block_bounds(order: list[int], scc: list[int], p: int) -> tuple[int, int]:
    c = scc[order[p]]
    lo = p
    while lo > 0 and scc[order[lo - 1]] == c:
        lo -= 1
    hi = p + 1
    n = len(order)
    while hi < n and scc[order[hi]] == c:
        hi += 1
    return lo, hi


def open_edge(
    graph: Digraph,
    info: SccInfo,
    base: PseudoTopoOrder,
    path: Path | Sequence[int],
    i: int,
    rng: random.Random,
    on_path: bytearray | None = None,
) -> OpenedOrder:
    """Separate ``path[i]`` and ``path[i+1]`` as far as a strong order allows.

    ``base`` must already have the path imposed. Every off-path vertex of
    the components whose blocks lie between (and including) the blocks of
    the two endpoints is moved between them; the result is a new order.
    """
    verts = path.vertices() if isinstance(path, Path) else path
    if not 0 <= i < len(verts) - 1:
        raise ValueError(f"edge index {i} out of range for a path with {len(verts)} vertices")
    if on_path is None:
        on_path = _path_flags(graph.n, verts)
    pto = base.copy()
    order, inv, scc = pto.order, pto.inv, info.scc_id
    ia, ib = inv[verts[i]], inv[verts[i + 1]]
    if ia > ib:
        raise ValueError("path is not imposed on the order")
    seg_lo = _block_bounds(order, scc, ia)[0]
    seg_hi = _block_bounds(order, scc, ib)[1]
    left = [v for v in order[seg_lo : ia + 1] if on_path[v]]
    right = [v for v in order[ib:seg_hi] if on_path[v]]
    lo, hi, spans = _rewrite(pto, info, seg_lo, seg_hi, left, right, on_path, rng)
    return OpenedOrder(pto, i, lo, hi, spans)


def open_end(
    graph: Digraph,
    info: SccInfo,
    base: PseudoTopoOrder,
    path: Path | Sequence[int],
    head: bool,
    rng: random.Random,
    on_path: bytearray | None = None,
) -> OpenedOrder:
    """Open the virtual edge before the first (``head``) or after the last path vertex.

    All off-path vertices of the components up to the first vertex's block
    (or from the last vertex's block on) are gathered into B on that side.
    """
    verts = path.vertices() if isinstance(path, Path) else path
    if not verts:
        raise ValueError("empty path")
    if on_path is None:
        on_path = _path_flags(graph.n, verts)
    pto = base.copy()
    order, inv, scc = pto.order, pto.inv, info.scc_id
    if head:
        seg_lo, seg_hi = 0, _block_bounds(order, scc, inv[verts[0]])[1]
        left: list[int] = []
        right = [v for v in order[seg_lo:seg_hi] if on_path[v]]
        index = -1
    else:
        seg_lo, seg_hi = _block_bounds(order, scc, inv[verts[-1]])[0], len(order)
        left = [v for v in order[seg_lo:seg_hi] if on_path[v]]
        right = []
        index = len(verts) - 1
    lo, hi, spans = _rewrite(pto, info, seg_lo, seg_hi, left, right, on_path, rng)
    return OpenedOrder(pto, index, lo, hi, spans)


def reverse_block(opened: OpenedOrder) -> OpenedOrder:
    """Reverse B inside each component group, in place."""
    pto = opened.pto
    order = pto.order
    for start, stop in opened.groups:
        seg = order[start:stop]
        seg.reverse()
        for k, v in enumerate(seg, start):
            pto.place(k, v)
    return opened


def heuristic_refine(
    graph: Digraph, opened: OpenedOrder, steps: int, rng: random.Random
) -> OpenedOrder:
    """Random swaps pulling a B vertex ahead of an out-neighbor that precedes it.

    Each step draws ``u`` from B; if some out-neighbor of ``u`` lies in B
    before ``u``, one of them is exchanged with ``u``. A step that finds no
    such neighbor is spent without a swap.
    """
    lo, hi = opened.lo, opened.hi
    if hi - lo < 2:
        return opened
    pto = opened.pto
    order, inv = pto.order, pto.inv
    nbrs = graph.out_lists[0]
    for _ in range(steps):
        pu = rng.randrange(lo, hi)
        u = order[pu]
        behind = [v for v in nbrs[u] if lo <= inv[v] < pu]
        if behind:
            v = behind[rng.randrange(len(behind))] if len(behind) > 1 else behind[0]
            pto.swap(inv[v], pu)
    return opened


# -- rotation -----------------------------------------------------------------


def best_rotation(
    graph: Digraph, verts: Sequence[int], rng: random.Random | None = None
) -> tuple[float, list[int]] | None:
    """Heaviest path made of two path pieces joined by one backward chord.

    For a chord ``p_b -> p_c`` with ``c < b`` the candidate is
    ``p_a..p_b, p_c..p_{a-1}`` where ``p_{a-1} -> p_a`` is the lightest path
    edge between ``p_c`` and ``p_b``. Returns ``(weight, vertices)`` of the
    best candidate, or None when the path has no backward chord. With
    ``rng``, ties between equally heavy candidates are broken at random.
    """
    L = len(verts) - 1
    if L < 1:
        return None
    pos = {v: j for j, v in enumerate(verts)}
    out_adj = graph.out_adj
    ew = []
    pre = [0.0]
    for j in range(L):
        nxt = verts[j + 1]
        for v, w in out_adj[verts[j]]:
            if v == nxt:
                ew.append(w)
                pre.append(pre[-1] + w)
                break
    # Sparse table over edge indices for range-minimum (value, index).
    table = [[(w, j) for j, w in enumerate(ew)]]
    span = 1
    while 2 * span <= L:
        prev = table[-1]
        table.append([min(prev[j], prev[j + span]) for j in range(L - 2 * span + 1)])
        span *= 2

    def range_min(a: int, b: int) -> tuple[float, int]:
        k = (b - a + 1).bit_length() - 1
        return min(table[k][a], table[k][b - (1 << k) + 1])

    best: tuple[float, int, int, int] | None = None
    ties = 0
    for b in range(1, L + 1):
        for v, w in out_adj[verts[b]]:
            c = pos.get(v)
            if c is None or c >= b:
                continue
            low, j = range_min(c, b - 1)
            total = pre[b] - pre[c] - low + w
            if best is None or total > best[0]:
                best = (total, b, c, j + 1)
                ties = 1
            elif rng is not None and total == best[0]:
                ties += 1
                if rng.randrange(ties) == 0:
                    best = (total, b, c, j + 1)
    if best is None:
        return None
    _, b, c, a = best
    new = list(verts[a : b + 1]) + list(verts[c:a])
    return graph.path_weight(new), new


# -- improvement loop ---------------------------------------------------------


def _better(new: float, old: float) -> bool:
    return new > old + 1e-9 * max(1.0, abs(old))


def compact_blocks(pto: PseudoTopoOrder, info: SccInfo, on_path: bytearray) -> None:
    """Move off-path vertices to the end of their component block, keeping relative order."""
    order = pto.order
    scc = info.scc_id
    n = len(order)
    p = 0
    while p < n:
        q = p + 1
        c = scc[order[p]]
        while q < n and scc[order[q]] == c:
            q += 1
        seg = order[p:q]
        packed = [v for v in seg if on_path[v]] + [v for v in seg if not on_path[v]]
        if packed != seg:
            for k, v in enumerate(packed, p):
                if order[k] != v:
                    pto.place(k, v)
        p = q


class _Frame:
    """A base order prepared for scoring openings without rewriting it.

    The path is imposed and every block is packed path-first, so opening a
    path edge only moves the off-path tails of a run of blocks into the
    gap. ``x``/``y`` are the heaviest forward-edge paths ending/starting at
    each vertex; ``ypath`` is ``y`` with the off-path tail of the vertex's
    own block removed, which is what a path vertex to the right of a gap sees.
    """

    def __init__(self, graph: Digraph, info: SccInfo, pto: PseudoTopoOrder, verts: list[int]):
        n = graph.n
        self.pto = pto
        self.verts = verts
        self.on_path = on_path = _path_flags(n, verts)
        compact_blocks(pto, info, on_path)
        self.x = recompute_from(graph, pto, 0)
        order, inv, scc = pto.order, pto.inv, info.scc_id
        self.blk = blk = [0] * n
        self.off: list[list[int]] = []
        prev = -1
        for v in order:
            if scc[v] != prev:
                self.off.append([])
                prev = scc[v]
            blk[v] = len(self.off) - 1
            if not on_path[v]:
                self.off[-1].append(v)
        self.y = y = [0.0] * n
        self.ypath = ypath = [0.0] * n
        nbrs, wts = graph.out_lists
        for p in range(n - 1, -1, -1):
            v = order[p]
            best = 0.0
            bp = 0.0
            bv = blk[v]
            mine = on_path[v]
            for u, w in zip(nbrs[v], wts[v]):
                if inv[u] > p:
                    c = w + y[u]
                    if c > best:
                        best = c
                    if mine:
                        if blk[u] != bv:
                            if c > bp:
                                bp = c
                        elif on_path[u]:
                            c = w + ypath[u]
                            if c > bp:
                                bp = c
            y[v] = best
            ypath[v] = bp

    def gap(self, i: int) -> tuple[int, int, int, list[list[int]]]:
        """``(left_pos, right_pos, right_block, groups)`` for opening target ``i``.

        ``left_pos`` is the base position of the last vertex before the gap
        (-1 at the head), ``right_pos`` that of the first one after it
        (``n`` at the tail).
        """
        verts, inv, blk = self.verts, self.pto.inv, self.blk
        if i < 0:
            ia, ib = -1, inv[verts[0]]
            b0, b1 = 0, blk[verts[0]]
        elif i >= len(verts) - 1:
            ia, ib = inv[verts[-1]], self.pto.n
            b0, b1 = blk[verts[-1]], len(self.off) - 1
        else:
            ia, ib = inv[verts[i]], inv[verts[i + 1]]
            b0, b1 = blk[verts[i]], blk[verts[i + 1]]
        return ia, ib, b1, [g for g in self.off[b0 : b1 + 1] if g]


class _GapScore:
    """DP over an arrangement of B placed in one gap of a :class:`_Frame`."""

    def __init__(self, graph: Digraph, frame: _Frame, ia: int, ib: int, bj: int, block: list[int], slot: list[int]):
        self.frame = frame
        self.ia, self.ib, self.bj = ia, ib, bj
        self.block = block
        self.slot = slot
        inv, x, y, ypath, on_path, blk = frame.pto.inv, frame.x, frame.y, frame.ypath, frame.on_path, frame.blk
        for k, v in enumerate(block):
            slot[v] = k
        k_total = len(block)
        self.xb = xb = [0.0] * k_total
        self.yb = yb = [0.0] * k_total
        in_n, in_w = graph.in_lists
        out_n, out_w = graph.out_lists
        for k, v in enumerate(block):
            best = 0.0
            for u, w in zip(in_n[v], in_w[v]):
                s = slot[u]
                if s >= 0:
                    if s < k:
                        c = xb[s] + w
                        if c > best:
                            best = c
                elif inv[u] <= ia:
                    c = x[u] + w
                    if c > best:
                        best = c
            xb[k] = best
        for k in range(k_total - 1, -1, -1):
            v = block[k]
            best = 0.0
            for u, w in zip(out_n[v], out_w[v]):
                s = slot[u]
                if s >= 0:
                    if s > k:
                        c = w + yb[s]
                        if c > best:
                            best = c
                elif inv[u] >= ib:
                    c = w + (ypath[u] if on_path[u] and blk[u] == bj else y[u])
                    if c > best:
                        best = c
            yb[k] = best
        for v in block:
            slot[v] = -1
        self.best = max((a + b for a, b in zip(xb, yb)), default=0.0)

    def trace(self, graph: Digraph, rng: random.Random) -> list[int]:
        """A heaviest path through B, ties between equal choices broken at random."""
        fr, block, xb, yb = self.frame, self.block, self.xb, self.yb
        inv, x, y, ypath, on_path, blk = fr.pto.inv, fr.x, fr.y, fr.ypath, fr.on_path, fr.blk
        slot = self.slot
        for k, v in enumerate(block):
            slot[v] = k
        tops = [k for k in range(len(block)) if xb[k] + yb[k] == self.best]
        k0 = rng.choice(tops)
        in_n, in_w = graph.in_lists
        out_n, out_w = graph.out_lists

        back: list[int] = []
        v, val, inside = block[k0], xb[k0], True
        while val != 0:
            opts = []
            for u, w in zip(in_n[v], in_w[v]):
                s = slot[u]
                if inside and s >= 0:
                    if s < slot[v] and xb[s] + w == val:
                        opts.append(u)
                elif s < 0 and inv[u] < inv[v] and (not inside or inv[u] <= self.ia) and x[u] + w == val:
                    opts.append(u)
            if not opts:
                break
            v = rng.choice(opts)
            inside = slot[v] >= 0
            val = xb[slot[v]] if inside else x[v]
            back.append(v)

        fwd: list[int] = []
        v, val, mode = block[k0], yb[k0], 0  # 0: in B, 1: ypath, 2: y
        while val != 0:
            opts = []
            for u, w in zip(out_n[v], out_w[v]):
                s = slot[u]
                if mode == 0:
                    if s >= 0:
                        if s > slot[v] and w + yb[s] == val:
                            opts.append((u, 0))
                    elif inv[u] >= self.ib:
                        m = 1 if on_path[u] and blk[u] == self.bj else 2
                        if w + (ypath[u] if m == 1 else y[u]) == val:
                            opts.append((u, m))
                elif inv[u] > inv[v] and s < 0:
                    if mode == 1 and blk[u] == blk[v]:
                        if on_path[u] and w + ypath[u] == val:
                            opts.append((u, 1))
                    elif w + y[u] == val:
                        opts.append((u, 2))
            if not opts:
                break
            v, mode = rng.choice(opts)
            val = yb[slot[v]] if mode == 0 else ypath[v] if mode == 1 else y[v]
            fwd.append(v)
        for u in block:
            slot[u] = -1
        back.reverse()
        return back + [block[k0]] + fwd


def _refine_list(nbrs: list[list[int]], block: list[int], pos: dict[int, int], steps: int, rng: random.Random) -> None:
    k = len(block)
    for _ in range(steps):
        pu = rng.randrange(k)
        u = block[pu]
        behind = [v for v in nbrs[u] if pos.get(v, k) < pu]
        if behind:
            v = behind[rng.randrange(len(behind))] if len(behind) > 1 else behind[0]
            pv = pos[v]
            block[pu], block[pv] = v, u
            pos[u], pos[v] = pv, pu


class PathImprover:
    """Local search that opens path edges until no opening improves the path.

    Each sweep draws a fresh random order, imposes the path and tries every
    gap (between consecutive path vertices, before the head, after the
    tail) in random order. With ``plateau > 0`` an opening that yields a
    different path of equal weight is also taken, up to ``plateau`` such
    moves in a row.

    ``events`` records ``(seconds since start, weight)`` for each accepted
    improvement; ``openings`` counts evaluated gaps.
    """

    def __init__(
        self,
        graph: Digraph,
        info: SccInfo,
        rng: random.Random,
        strategy: str = "all",
        refine_steps_factor: float = 4.0,
        rotate: bool = True,
        plateau: int = 0,
    ):
        if strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {strategy!r}")
        self.graph = graph
        self.info = info
        self.rng = rng
        self.strategy = strategy
        self.refine_steps_factor = refine_steps_factor
        self.rotate = rotate
        self.plateau = plateau
        self.plateau_moves = 0
        self.events: list[tuple[float, float]] = []
        self.openings = 0
        self.sweeps = 0
        self.converged = False
        self._slot = [-1] * graph.n

    def _arrangements(self, groups: list[list[int]]):
        rng = self.rng
        for g in groups:
            rng.shuffle(g)
        block = [v for g in groups for v in g]
        yield block
        if self.strategy in ("reverse", "all"):
            block = [v for g in groups for v in reversed(g)]
            yield block
        if self.strategy in ("heuristic", "all") and len(block) > 1:
            block = block[:]
            steps = max(1, int(self.refine_steps_factor * len(block)))
            _refine_list(self.graph.out_lists[0], block, {v: k for k, v in enumerate(block)}, steps, rng)
            yield block

    def run(self, path: Path | Sequence[int], time_ms: float | None = None) -> Path:
        graph, info, rng = self.graph, self.info, self.rng
        verts = path.vertices() if isinstance(path, Path) else list(path)
        if graph.n == 0:
            return Path(graph, [])
        if not verts:
            verts = [0]
        weight = graph.path_weight(verts)
        t0 = time.perf_counter()
        deadline = float("inf") if time_ms is None else t0 + time_ms / 1000.0
        self.converged = False
        flat = 0

        def accept(new_verts: list[int], strict: bool) -> None:
            nonlocal verts, weight, flat
            verts, weight = new_verts, graph.path_weight(new_verts)
            if strict:
                flat = 0
                self.events.append((time.perf_counter() - t0, weight))
            else:
                flat += 1
                self.plateau_moves += 1

        while time.perf_counter() < deadline:
            self.sweeps += 1
            base = random_pto(graph, info, rng)
            base.impose(verts)
            recompute_from(graph, base, 0)
            if _better(max(base.x), weight):
                accept(backtrack(graph, base), True)
                continue
            rot = best_rotation(graph, verts, rng) if self.rotate else None
            if rot is not None and _better(rot[0], weight):
                accept(rot[1], True)
                continue
            frame = _Frame(graph, info, base, verts)
            if _better(max(frame.x), weight):
                accept(backtrack(graph, frame.pto), True)
                continue
            targets = list(range(-1, len(verts)))
            rng.shuffle(targets)
            moved = False
            timed_out = False
            for i in targets:
                ia, ib, bj, groups = frame.gap(i)
                self.openings += 1
                if not groups:
                    continue
                for block in self._arrangements(groups):
                    score = _GapScore(graph, frame, ia, ib, bj, block, self._slot)
                    if _better(score.best, weight):
                        accept(score.trace(graph, rng), True)
                        moved = True
                        break
                    if flat < self.plateau and not _better(weight, score.best):
                        accept(score.trace(graph, rng), False)
                        moved = True
                        break
                if moved:
                    break
                if time.perf_counter() >= deadline:
                    timed_out = True
                    break
            if moved:
                continue
            if rot is not None and flat < self.plateau and rot[1] != verts and not _better(weight, rot[0]):
                accept(rot[1], False)
                continue
            self.converged = not timed_out
            break
        return Path(graph, verts)


def improve_path(
    graph: Digraph,
    info: SccInfo,
    path: Path | Sequence[int],
    rng: random.Random,
    time_ms: float | None = None,
    strategy: str = "all",
    refine_steps_factor: float = 4.0,
    plateau: int = 0,
) -> Path:
    """Improve ``path`` by edge openings until a full sweep finds nothing or time runs out.

    ``plateau`` allows that many equal-weight moves in a row; see :class:`PathImprover`.
    """
    return PathImprover(graph, info, rng, strategy, refine_steps_factor, plateau=plateau).run(path, time_ms)
