"""Compiled inner loops.

Each kernel mirrors a pure-Python routine that stays the reference
implementation; the tests run both and compare.
"""

from __future__ import annotations

import numpy as np
from numba import njit

# dfs_steps status codes
CHUNK_DONE = 0
EXHAUSTED = 1
STAGNATED = 2


@njit(cache=True)
def dfs_steps(indptr, heads, weights, verts, cursor, prefix, in_path, state, best, best_w, max_steps, stagnation):
    """Run up to ``max_steps`` steps of depth-first path enumeration in place.

    Same visiting order as ``dfs.next_path``. ``cursor[j]`` holds the CSR
    index of the edge ``verts[j] -> verts[j+1]``. ``state`` is
    ``[length, floor, best_len, since]`` and ``best_w`` a one-element array;
    both are updated. Returns ``(steps, status)``.
    """
    length = state[0]
    floor = state[1]
    best_len = state[2]
    since = state[3]
    bw = best_w[0]
    steps = 0
    status = CHUNK_DONE
    # A chunk always starts right after a push (or at the start vertex), so
    # the top vertex is scanned from its first edge.
    u = verts[length - 1]
    i = indptr[u]
    while steps < max_steps:
        end = indptr[u + 1]
        while i < end and in_path[heads[i]]:
            i += 1
        if i == end:
            if length <= floor:
                status = EXHAUSTED
                break
            length -= 1
            in_path[verts[length]] = 0
            u = verts[length - 1]
            i = cursor[length - 1] + 1
            continue
        v = heads[i]
        verts[length] = v
        in_path[v] = 1
        cursor[length - 1] = i
        w = prefix[length - 1] + weights[i]
        prefix[length] = w
        length += 1
        steps += 1
        if w > bw:
            bw = w
            best[:length] = verts[:length]
            best_len = length
            since = 0
        else:
            since += 1
            if stagnation > 0 and since >= stagnation:
                status = STAGNATED
                break
        u = v
        i = indptr[u]
    state[0] = length
    state[2] = best_len
    state[3] = since
    best_w[0] = bw
    return steps, status


@njit(cache=True)
def tarjan(n, indptr, heads):
    """Iterative Tarjan over a CSR graph.

    Returns ``(finished, count)`` where ``finished[v]`` numbers the component
    of ``v`` in completion order (sink components first). Mirrors
    ``graph.strongly_connected_components(compiled=False)``.
    """
    index = np.full(n, -1, dtype=np.int64)
    low = np.zeros(n, dtype=np.int64)
    on_stack = np.zeros(n, dtype=np.uint8)
    stack = np.empty(n, dtype=np.int64)
    work_v = np.empty(n, dtype=np.int64)
    work_i = np.empty(n, dtype=np.int64)
    finished = np.full(n, -1, dtype=np.int64)
    sp = 0
    count = 0
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        index[root] = counter
        low[root] = counter
        counter += 1
        stack[sp] = root
        sp += 1
        on_stack[root] = 1
        work_v[0] = root
        work_i[0] = indptr[root]
        wp = 1
        while wp > 0:
            v = work_v[wp - 1]
            i = work_i[wp - 1]
            end = indptr[v + 1]
            pushed = False
            while i < end:
                w = heads[i]
                i += 1
                if index[w] == -1:
                    work_i[wp - 1] = i
                    index[w] = counter
                    low[w] = counter
                    counter += 1
                    stack[sp] = w
                    sp += 1
                    on_stack[w] = 1
                    work_v[wp] = w
                    work_i[wp] = indptr[w]
                    wp += 1
                    pushed = True
                    break
                if on_stack[w] and index[w] < low[v]:
                    low[v] = index[w]
            if pushed:
                continue
            wp -= 1
            if wp > 0:
                p = work_v[wp - 1]
                if low[v] < low[p]:
                    low[p] = low[v]
            if low[v] == index[v]:
                while True:
                    sp -= 1
                    w = stack[sp]
                    on_stack[w] = 0
                    finished[w] = count
                    if w == v:
                        break
                count += 1
    return finished, count


@njit(cache=True)
def weak_labels(n, src, dst):
    """Union-find weak components, numbered by smallest member."""
    parent = np.arange(n)
    for e in range(len(src)):
        a = src[e]
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        b = dst[e]
        while parent[b] != b:
            parent[b] = parent[parent[b]]
            b = parent[b]
        if a < b:
            parent[b] = a
        elif b < a:
            parent[a] = b
    label = np.full(n, -1, dtype=np.int64)
    out = np.empty(n, dtype=np.int64)
    count = 0
    for v in range(n):
        r = v
        while parent[r] != r:
            r = parent[r]
        if label[r] < 0:
            label[r] = count
            count += 1
        out[v] = label[r]
    return out


def warm_up() -> None:
    """Compile (or load from cache) every kernel on a tiny input."""
    indptr = np.array([0, 1, 1], dtype=np.int64)
    heads = np.array([1], dtype=np.int64)
    weights = np.array([1.0])
    verts = np.zeros(2, dtype=np.int64)
    dfs_steps(
        indptr, heads, weights, verts, np.zeros(2, dtype=np.int64), np.zeros(2),
        np.array([1, 0], dtype=np.uint8), np.array([1, 1, 1, 0], dtype=np.int64),
        verts.copy(), np.zeros(1), 10, 0,
    )
    tarjan(2, indptr, heads)
    weak_labels(2, heads, heads)
