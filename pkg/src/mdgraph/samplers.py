"""Random graph baselines and uniform sampling of prime graphs.

Every stochastic function takes an explicit :class:`numpy.random.Generator`.
Use :func:`make_rng` for a seeded generator and :func:`derive_rng` for the
per-replicate generators of batch runs.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np

from .graph import Graph
from .md import _is_prime_masks

MAX_ENUMERATION_M = 6


def make_rng(seed: int | None) -> np.random.Generator:
    return np.random.default_rng(seed)


def derive_rng(seed: int, *keys: int) -> np.random.Generator:
    """Independent generator for the draw identified by ``keys`` under ``seed``."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), *(int(k) for k in keys)]))


def _pair_masks(n: int, present: np.ndarray) -> list[int]:
    adj = [0] * n
    iu, ju = np.triu_indices(n, k=1)
    for u, v in zip(iu[present].tolist(), ju[present].tolist()):
        adj[u] |= 1 << v
        adj[v] |= 1 << u
    return adj


def er_graph(n: int, p: float, rng: np.random.Generator) -> Graph:
    """G(n, p): each of the C(n, 2) edges independently with probability p."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"edge probability must lie in [0, 1], got {p}")
    iu, ju = np.triu_indices(n, k=1)
    present = rng.random(iu.size) < p
    return Graph(n, zip(iu[present].tolist(), ju[present].tolist()))


def ba_graph(n: int, edges_per_step: int, rng: np.random.Generator) -> Graph:
    """Preferential attachment grown with the "bag" method.

    The bag holds every vertex once plus once more for each edge it received
    as a target.  Vertex 0 starts alone; each new vertex draws
    ``edges_per_step`` targets uniformly from the bag, then joins it.
    Repeated targets within a step collapse to a single edge.
    """
    if n < 2:
        raise ValueError("BA graph needs n >= 2")
    if edges_per_step < 1:
        raise ValueError("edges_per_step must be >= 1")
    bag = [0]
    edges = set()
    for v in range(1, n):
        targets = [bag[i] for i in rng.integers(0, len(bag), size=edges_per_step)]
        for t in targets:
            edges.add((t, v))
        bag.append(v)
        bag.extend(targets)
    return Graph(n, edges)


def enumerate_primes(m: int) -> int:
    """Exact number of labeled prime graphs on ``m`` vertices (2 <= m <= 6)."""
    return len(list_primes(m))


def list_primes(m: int) -> list[Graph]:
    """All labeled prime graphs on ``m`` vertices, by exhaustive search."""
    if not 2 <= m <= MAX_ENUMERATION_M:
        raise ValueError(f"exhaustive enumeration supports 2 <= m <= {MAX_ENUMERATION_M}")
    pairs = list(combinations(range(m), 2))
    found = []
    for code in range(1 << len(pairs)):
        adj = [0] * m
        for bit, (u, v) in enumerate(pairs):
            if code >> bit & 1:
                adj[u] |= 1 << v
                adj[v] |= 1 << u
        if _is_prime_masks(adj, m):
            found.append(Graph.from_masks(adj))
    return found


def sample_prime_uniform(
    m: int, rng: np.random.Generator, max_tries: int | None = None
) -> Graph:
    """Uniform labeled prime graph on ``m`` vertices.

    Proposals are G(m, 1/2), i.e. uniform over all labeled graphs, and are
    accepted iff prime.
    """
    graph, _ = sample_prime_uniform_counted(m, rng, max_tries)
    return graph


def sample_prime_uniform_counted(
    m: int, rng: np.random.Generator, max_tries: int | None = None
) -> tuple[Graph, int]:
    """As :func:`sample_prime_uniform`, also returning the number of proposals."""
    if m < 4:
        raise ValueError(f"no prime graphs exist on {m} < 4 vertices")
    n_pairs = m * (m - 1) // 2
    tries = 0
    while max_tries is None or tries < max_tries:
        tries += 1
        adj = _pair_masks(m, rng.random(n_pairs) < 0.5)
        if _is_prime_masks(adj, m):
            return Graph.from_masks(adj), tries
    raise RuntimeError(f"no prime graph accepted in {max_tries} proposals")


def prime_acceptance_rate(m: int, proposals: int, rng: np.random.Generator) -> float:
    """Fraction of G(m, 1/2) proposals that are prime."""
    n_pairs = m * (m - 1) // 2
    hits = 0
    for _ in range(proposals):
        if _is_prime_masks(_pair_masks(m, rng.random(n_pairs) < 0.5), m):
            hits += 1
    return hits / proposals
