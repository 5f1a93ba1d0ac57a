import random

import pytest
from hypothesis import strategies as st

from longpath import Digraph, parse_edge_list
from longpath.graph import analyze

G1_TEXT = "0 1 1\n1 2 1\n2 0 1\n2 3 1\n"


@pytest.fixture
def g1() -> Digraph:
    return parse_edge_list(G1_TEXT)


@st.composite
def digraphs(draw, max_n=10, min_n=1, unit=None):
    """Small weighted digraphs; weights drawn from a few values to provoke ties."""
    n = draw(st.integers(min_n, max_n))
    pairs = [(u, v) for u in range(n) for v in range(n) if u != v]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=len(pairs))) if pairs else []
    if unit is None:
        unit = draw(st.booleans())
    weight = st.just(1.0) if unit else st.sampled_from([0.0, 0.5, 1.0, 2.0, 3.25])
    return Digraph.from_edges(n, [(u, v, draw(weight)) for u, v in chosen])


def random_walk_path(graph: Digraph, rng: random.Random, stop: float = 0.15) -> list[int]:
    """A random simple path: greedy random walk from a random vertex."""
    path = [rng.randrange(graph.n)]
    seen = {path[0]}
    while rng.random() > stop:
        nxt = [v for v, _ in graph.out_adj[path[-1]] if v not in seen]
        if not nxt:
            break
        path.append(rng.choice(nxt))
        seen.add(path[-1])
    return path


def info_of(graph: Digraph):
    return analyze(graph)
