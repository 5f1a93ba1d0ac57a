"""Random instances: planted Hamiltonian paths and plain random digraphs."""

from __future__ import annotations

import random

from .graph import Digraph


def generate_planted(n: int, m: int, seed: int) -> tuple[Digraph, float]:
    """Random digraph with ``m`` unit-weight edges around a hidden Hamiltonian path.

    A random permutation ``v_1..v_n`` contributes the edges ``v_i -> v_{i+1}``;
    the other ``m - (n - 1)`` edges are distinct, loop-free and uniform over
    the remaining ordered pairs. Returns the graph and its optimum ``n - 1``.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if m < n - 1 or m > n * (n - 1):
        raise ValueError(f"need n-1 <= m <= n(n-1), got n={n}, m={m}")
    rng = random.Random(seed)
    perm = list(range(n))
    rng.shuffle(perm)
    taken = {perm[i] * n + perm[i + 1] for i in range(n - 1)}
    extra = m - (n - 1)
    free = n * (n - 1) - (n - 1)
    if extra > free // 2:
        pool = [
            u * n + v
            for u in range(n)
            for v in range(n)
            if u != v and u * n + v not in taken
        ]
        taken.update(rng.sample(pool, extra))
    else:
        target = m
        while len(taken) < target:
            u = rng.randrange(n)
            v = rng.randrange(n)
            if u != v:
                taken.add(u * n + v)
    edges = [(code // n, code % n, 1.0) for code in taken]
    return Digraph.from_edges(n, edges), float(n - 1)


def random_digraph(
    n: int, density: float, rng: random.Random, unit_weights: bool = False
) -> Digraph:
    """Each ordered pair becomes an edge with probability ``density``.

    Weights are uniform on (0, 1] unless ``unit_weights``.
    """
    edges = []
    for u in range(n):
        for v in range(n):
            if u != v and rng.random() < density:
                edges.append((u, v, 1.0 if unit_weights else 1.0 - rng.random()))
    return Digraph.from_edges(n, edges)
