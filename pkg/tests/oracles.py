"""Brute-force reference implementations used only by the tests."""

from itertools import combinations

import numpy as np
from hypothesis import strategies as st
from scipy.sparse.csgraph import shortest_path

from mdgraph.graph import Graph


def adjacency(g: Graph) -> np.ndarray:
    a = np.zeros((g.n, g.n), dtype=np.int64)
    for u, v in g.edges:
        a[u, v] = a[v, u] = 1
    return a


def brute_is_module(g: Graph, m) -> bool:
    m = set(m)
    for z in range(g.n):
        if z in m:
            continue
        hits = {g.has_edge(z, b) for b in m}
        if len(hits) > 1:
            return False
    return True


def brute_nontrivial_modules(g: Graph):
    for size in range(2, g.n):
        for m in combinations(range(g.n), size):
            if brute_is_module(g, m):
                yield m


def brute_is_prime(g: Graph) -> bool:
    return g.n >= 3 and next(brute_nontrivial_modules(g), None) is None


def triangles_matrix(g: Graph) -> list[int]:
    a = adjacency(g)
    return (np.diag(a @ a @ a) // 2).tolist()


def global_clustering_triples(g: Graph):
    closed = open_ = 0
    for v in range(g.n):
        nbrs = [u for u in range(g.n) if g.has_edge(u, v)]
        for a, b in combinations(nbrs, 2):
            if g.has_edge(a, b):
                closed += 1
            else:
                open_ += 1
    total = closed + open_
    return None if total == 0 else closed / total


def all_pairs(g: Graph) -> np.ndarray:
    return shortest_path(adjacency(g), unweighted=True, directed=False)


def components_count(g: Graph) -> int:
    seen, count = set(), 0
    for s in range(g.n):
        if s in seen:
            continue
        count += 1
        stack = [s]
        seen.add(s)
        while stack:
            u = stack.pop()
            for w in range(g.n):
                if w not in seen and g.has_edge(u, w):
                    seen.add(w)
                    stack.append(w)
    return count


def random_graph(n: int, p: float, rng) -> Graph:
    return Graph(n, [(u, v) for u, v in combinations(range(n), 2) if rng.random() < p])


@st.composite
def graphs(draw, max_n=12):
    n = draw(st.integers(1, max_n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    chosen = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Graph(n, [e for e, keep in zip(pairs, chosen) if keep])
