"""Simple undirected graphs: representation, I/O and adjacency-based metrics.

Vertices are the integers ``0..n-1``.  Adjacency is kept as one Python int
per vertex used as a bitset, which makes neighbourhood intersections and
BFS frontiers cheap for the desk-scale graphs this package targets.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator


class GraphError(ValueError):
    """Invalid graph data (self-loop, out-of-range endpoint, bad document)."""


class EdgeListParseError(GraphError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


def iter_bits(mask: int) -> Iterator[int]:
    """Yield the indices of the set bits of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class Graph:
    """Immutable simple undirected graph on vertices ``0..n-1``."""

    __slots__ = ("n", "edges", "_adj")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = ()):
        if n < 0:
            raise GraphError(f"vertex count must be non-negative, got {n}")
        adj = [0] * n
        normalized = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise GraphError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) out of range for n={n}")
            if u > v:
                u, v = v, u
            normalized.add((u, v))
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        self.n = n
        self.edges = frozenset(normalized)
        self._adj = tuple(adj)

    @classmethod
    def from_masks(cls, masks: Iterable[int]) -> "Graph":
        """Build from symmetric adjacency bitsets (no validation of symmetry)."""
        masks = list(masks)
        edges = [(u, v) for u, m in enumerate(masks) for v in iter_bits(m) if u < v]
        return cls(len(masks), edges)

    @classmethod
    def complete(cls, n: int) -> "Graph":
        return cls(n, ((u, v) for u in range(n) for v in range(u + 1, n)))

    @classmethod
    def path(cls, n: int) -> "Graph":
        return cls(n, ((i, i + 1) for i in range(n - 1)))

    @classmethod
    def cycle(cls, n: int) -> "Graph":
        return cls(n, [(i, (i + 1) % n) for i in range(n)])

    @property
    def adj_masks(self) -> tuple[int, ...]:
        return self._adj

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def neighbors(self, v: int) -> list[int]:
        self._check_vertex(v)
        return list(iter_bits(self._adj[v]))

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self._adj[u] >> v & 1)

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def complement(self) -> "Graph":
        full = self.full_mask
        return Graph.from_masks((~m & full) & ~(1 << v) for v, m in enumerate(self._adj))

    def induced_subgraph(self, vertices: Iterable[int]) -> "Graph":
        """Subgraph on ``vertices`` relabelled to ``0..k-1`` in the given order."""
        vertices = list(vertices)
        index = {v: i for i, v in enumerate(vertices)}
        edges = [
            (index[u], index[w])
            for u in vertices
            for w in iter_bits(self._adj[u])
            if w in index and u < w
        ]
        return Graph(len(vertices), edges)

    def _check_vertex(self, v: int) -> None:
        if not 0 <= v < self.n:
            raise IndexError(f"vertex {v} out of range for n={self.n}")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((self.n, self.edges))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={len(self.edges)})"


# ---------------------------------------------------------------------------
# I/O
# ---------------------------------------------------------------------------

def from_edge_list(text: str, one_based: bool = False, drop_loops: bool = False) -> Graph:
    """Parse a whitespace-separated edge list.

    Lines starting with ``#`` are comments and blank lines are skipped.  An
    optional ``n=<count>`` line fixes the vertex count so isolated vertices
    with the highest ids survive.  Duplicate edges collapse.
    """
    offset = 1 if one_based else 0
    declared_n = None
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.lower().startswith("n="):
            try:
                declared_n = int(line[2:].strip())
            except ValueError:
                raise EdgeListParseError(lineno, f"bad vertex-count header {line!r}") from None
            continue
        tokens = line.split()
        if len(tokens) != 2:
            raise EdgeListParseError(lineno, f"expected two vertex ids, got {len(tokens)} tokens")
        try:
            u, v = (int(t) - offset for t in tokens)
        except ValueError:
            raise EdgeListParseError(lineno, f"non-integer token in {line!r}") from None
        if u < 0 or v < 0:
            raise EdgeListParseError(lineno, f"vertex id below {offset} in {line!r}")
        if u == v:
            if drop_loops:
                continue
            raise EdgeListParseError(lineno, f"self-loop at vertex {u + offset}")
        pairs.append((u, v))
    n = max((max(p) for p in pairs), default=-1) + 1
    if declared_n is not None:
        if declared_n < n:
            raise GraphError(f"header declares n={declared_n} but ids reach {n - 1 + offset}")
        n = declared_n
    return Graph(n, pairs)


def to_edge_list(g: Graph, one_based: bool = False) -> str:
    offset = 1 if one_based else 0
    lines = [f"n={g.n}"]
    lines += [f"{u + offset} {v + offset}" for u, v in g.sorted_edges()]
    return "\n".join(lines) + "\n"


def graph_to_dict(g: Graph) -> dict:
    return {"n": g.n, "edges": [list(e) for e in g.sorted_edges()]}


def graph_from_dict(doc: dict) -> Graph:
    try:
        return Graph(int(doc["n"]), [tuple(e) for e in doc["edges"]])
    except (KeyError, TypeError, ValueError) as exc:
        raise GraphError(f"malformed graph document: {exc}") from exc


def to_json(g: Graph) -> str:
    return json.dumps(graph_to_dict(g))


def from_json(text: str) -> Graph:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphError(f"invalid JSON: {exc}") from exc
    return graph_from_dict(doc)


def to_dot(g: Graph, name: str = "G", labels: list | None = None) -> str:
    """Render as an undirected DOT graph; ``labels`` overrides vertex labels."""
    lines = [f"graph {name} {{"]
    for v in range(g.n):
        if labels is None:
            lines.append(f"  {v};")
        else:
            lines.append(f'  {v} [label="{labels[v]}"];')
    lines += [f"  {u} -- {v};" for u, v in g.sorted_edges()]
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Local quantities
# ---------------------------------------------------------------------------

def degree(g: Graph, v: int) -> int:
    g._check_vertex(v)
    return g.adj_masks[v].bit_count()


def degrees(g: Graph) -> list[int]:
    return [m.bit_count() for m in g.adj_masks]


def triangles_at(g: Graph, v: int) -> int:
    """Number of adjacent neighbour pairs of ``v``."""
    g._check_vertex(v)
    adj = g.adj_masks
    nv = adj[v]
    return sum((adj[u] & nv).bit_count() for u in iter_bits(nv)) // 2


def local_clustering(g: Graph, v: int) -> float:
    """Watts-Strogatz coefficient; 0.0 for vertices of degree below 2."""
    d = degree(g, v)
    if d < 2:
        return 0.0
    return 2.0 * triangles_at(g, v) / (d * (d - 1))


def global_clustering(g: Graph) -> float | None:
    """Transitivity 3 * triangles / connected triples, ``None`` without triples."""
    triples = sum(d * (d - 1) // 2 for d in degrees(g))
    if triples == 0:
        return None
    closed = sum(triangles_at(g, v) for v in range(g.n))  # = 3 * #triangles
    return closed / triples


def distances_from(g: Graph, v: int) -> list[int | None]:
    """BFS hop distances from ``v``; ``None`` marks unreachable vertices."""
    g._check_vertex(v)
    adj = g.adj_masks
    dist: list[int | None] = [None] * g.n
    seen = frontier = 1 << v
    d = 0
    while frontier:
        for u in iter_bits(frontier):
            dist[u] = d
        nxt = 0
        for u in iter_bits(frontier):
            nxt |= adj[u]
        frontier = nxt & ~seen
        seen |= frontier
        d += 1
    return dist


def connected_components(g: Graph) -> list[list[int]]:
    adj = g.adj_masks
    rest = g.full_mask
    comps = []
    while rest:
        comp = frontier = rest & -rest
        while frontier:
            nxt = 0
            for u in iter_bits(frontier):
                nxt |= adj[u]
            frontier = nxt & ~comp
            comp |= frontier
        comps.append(list(iter_bits(comp)))
        rest &= ~comp
    return comps


def is_connected(g: Graph) -> bool:
    return g.n <= 1 or len(connected_components(g)) == 1


# ---------------------------------------------------------------------------
# Report
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MetricsReport:
    n: int
    num_edges: int
    edge_density: float
    connected: bool
    # Diameter of the whole graph when connected, else of the largest component.
    diameter: int
    avg_distance: float | None
    global_clustering: float | None
    mean_local_clustering: float
    # Average over degree >= 2 vertices only (the convention of some toolkits).
    mean_local_clustering_deg2: float | None
    degree_histogram: dict[int, int] = field(default_factory=dict)

    def as_row(self) -> dict:
        return {
            "n": self.n,
            "num_edges": self.num_edges,
            "edge_density": self.edge_density,
            "connected": int(self.connected),
            "diameter": self.diameter,
            "avg_distance": self.avg_distance,
            "global_clustering": self.global_clustering,
            "mean_local_clustering": self.mean_local_clustering,
            "mean_local_clustering_deg2": self.mean_local_clustering_deg2,
        }


def metrics(g: Graph) -> MetricsReport:
    n = g.n
    adj = g.adj_masks
    pairs = n * (n - 1) // 2
    density = g.num_edges / pairs if pairs else 0.0

    comps = connected_components(g)
    largest = max(comps, key=len) if comps else []
    largest_set = set(largest)
    dist_sum = 0
    dist_count = 0
    diameter = 0
    for s in range(n):
        seen = frontier = 1 << s
        d = 0
        while True:
            nxt = 0
            for u in iter_bits(frontier):
                nxt |= adj[u]
            frontier = nxt & ~seen
            if not frontier:
                break
            seen |= frontier
            d += 1
            dist_sum += d * frontier.bit_count()
            dist_count += frontier.bit_count()
        if s in largest_set:
            diameter = max(diameter, d)

    local = [local_clustering(g, v) for v in range(n)]
    degs = degrees(g)
    deg2 = [c for c, d in zip(local, degs) if d >= 2]
    return MetricsReport(
        n=n,
        num_edges=g.num_edges,
        edge_density=density,
        connected=len(comps) <= 1,
        diameter=diameter,
        avg_distance=dist_sum / dist_count if dist_count else None,
        global_clustering=global_clustering(g),
        mean_local_clustering=math.fsum(local) / n if n else 0.0,
        mean_local_clustering_deg2=math.fsum(deg2) / len(deg2) if deg2 else None,
        degree_histogram=dict(sorted(Counter(degs).items())),
    )
